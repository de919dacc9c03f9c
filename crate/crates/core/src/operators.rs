//! Gradient, mean curvature, weighted mean curvature and the area-energy gradient.
//!
//! Finite-difference operators use central differences with replicate
//! boundaries. The half-Laplace operator evaluates the eight half-window
//! kernels and keeps the signed response of smallest magnitude; it has no
//! division and is defined everywhere.

use crate::error::{Error, Result};
use crate::image::{neighborhood, par_rows, row_triplet, Image2D};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DiffScheme {
    #[default]
    Central,
}

/// Settings for the finite-difference curvature operators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiffConfig {
    eps_grad: f64,
    scheme: DiffScheme,
}

impl DiffConfig {
    pub const DEFAULT_EPS: f64 = 1e-8;

    /// `eps_grad` guards `|grad U|^2` in denominators and must be positive.
    pub fn new(eps_grad: f64) -> Result<Self> {
        if !(eps_grad > 0.0 && eps_grad.is_finite()) {
            return Err(Error::Parameter(format!(
                "eps_grad must be positive, got {eps_grad}"
            )));
        }
        Ok(Self {
            eps_grad,
            scheme: DiffScheme::Central,
        })
    }

    pub fn eps_grad(&self) -> f64 {
        self.eps_grad
    }

    pub fn scheme(&self) -> DiffScheme {
        self.scheme
    }
}

impl Default for DiffConfig {
    fn default() -> Self {
        Self {
            eps_grad: Self::DEFAULT_EPS,
            scheme: DiffScheme::Central,
        }
    }
}

/// First and second central differences at one pixel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub ux: f64,
    pub uy: f64,
    pub uxx: f64,
    pub uyy: f64,
    pub uxy: f64,
}

impl Jet {
    #[inline]
    pub(crate) fn from_neighborhood(n: &[[f64; 3]; 3]) -> Self {
        let c = n[1][1];
        Self {
            ux: (n[1][2] - n[1][0]) / 2.0,
            uy: (n[2][1] - n[0][1]) / 2.0,
            uxx: n[1][2] - 2.0 * c + n[1][0],
            uyy: n[2][1] - 2.0 * c + n[0][1],
            uxy: (n[2][2] - n[2][0] - n[0][2] + n[0][0]) / 4.0,
        }
    }

    #[inline]
    pub fn grad_sq(&self) -> f64 {
        self.ux * self.ux + self.uy * self.uy
    }

    /// Five-point Laplacian.
    #[inline]
    pub fn laplacian(&self) -> f64 {
        self.uxx + self.uyy
    }

    /// `U_y^2 U_yy + 2 U_x U_y U_xy + U_x^2 U_xx`, the unnormalized second
    /// derivative along the gradient direction.
    #[inline]
    pub fn normal_term(&self) -> f64 {
        self.uy * self.uy * self.uyy
            + 2.0 * self.ux * self.uy * self.uxy
            + self.ux * self.ux * self.uxx
    }

    /// `U_x^2 U_yy - 2 U_x U_y U_xy + U_y^2 U_xx`, the unnormalized second
    /// derivative along the level line.
    #[inline]
    pub fn tangent_term(&self) -> f64 {
        self.ux * self.ux * self.uyy - 2.0 * self.ux * self.uy * self.uxy
            + self.uy * self.uy * self.uxx
    }
}

/// Central-difference jet at `(x, y)`.
pub fn jet_at(img: &Image2D, x: usize, y: usize) -> Jet {
    Jet::from_neighborhood(&neighborhood(row_triplet(img, y), x))
}

fn map_jets(img: &Image2D, f: impl Fn(Jet) -> f64 + Sync) -> Image2D {
    par_rows(img.width(), img.height(), |y, out| {
        let rows = row_triplet(img, y);
        for (x, o) in out.iter_mut().enumerate() {
            *o = f(Jet::from_neighborhood(&neighborhood(rows, x)));
        }
    })
}

/// Central-difference gradient `(U_x, U_y)`.
pub fn gradient(img: &Image2D) -> (Image2D, Image2D) {
    (map_jets(img, |j| j.ux), map_jets(img, |j| j.uy))
}

/// Forward differences `U[x+1] - U[x]` and `U[y+1] - U[y]`.
///
/// With replicate boundaries the last column of `gx` and last row of `gy`
/// are zero.
pub fn forward_differences(img: &Image2D) -> (Image2D, Image2D) {
    let (w, h) = img.dims();
    let gx = Image2D::from_fn(w, h, |x, y| img.get((x + 1).min(w - 1), y) - img.get(x, y));
    let gy = Image2D::from_fn(w, h, |x, y| img.get(x, (y + 1).min(h - 1)) - img.get(x, y));
    (gx, gy)
}

/// `|grad U|` from central differences.
pub fn gradient_magnitude(img: &Image2D) -> Image2D {
    map_jets(img, |j| j.grad_sq().sqrt())
}

/// Five-point Laplacian with replicate boundaries.
pub fn laplacian(img: &Image2D) -> Image2D {
    map_jets(img, |j| j.laplacian())
}

/// Mean curvature of the level lines,
/// `H = (U_x^2 U_yy - 2 U_x U_y U_xy + U_y^2 U_xx) / (2 (U_x^2 + U_y^2 + eps)^(3/2))`.
pub fn mean_curvature_fd(img: &Image2D, cfg: &DiffConfig) -> Image2D {
    let eps = cfg.eps_grad;
    map_jets(img, move |j| {
        j.tangent_term() / (2.0 * (j.grad_sq() + eps).powf(1.5))
    })
}

/// Weighted mean curvature by finite differences,
/// `H^w = lap U - (U_y^2 U_yy + 2 U_x U_y U_xy + U_x^2 U_xx) / (U_x^2 + U_y^2 + eps)`.
///
/// Where the gradient is exactly zero the second term vanishes and the
/// result is the Laplacian.
pub fn wmc_fd(img: &Image2D, cfg: &DiffConfig) -> Image2D {
    let eps = cfg.eps_grad;
    map_jets(img, move |j| {
        j.laplacian() - j.normal_term() / (j.grad_sq() + eps)
    })
}

/// Negative gradient of the area energy in the form
/// `lap U - (U_y^2 U_yy + 2 U_x U_y U_xy + U_x^2 U_xx) / (1 + U_x^2 + U_y^2)`.
pub fn area_gradient_fd(img: &Image2D) -> Image2D {
    map_jets(img, |j| {
        j.laplacian() - j.normal_term() / (1.0 + j.grad_sq())
    })
}

/// Picks the response of smallest magnitude; the lowest index wins ties.
#[inline]
fn select_min_abs(d: &[f64; 8]) -> (usize, f64) {
    let mut best = 0;
    for i in 1..8 {
        if d[i].abs() < d[best].abs() {
            best = i;
        }
    }
    (best, d[best])
}

/// The eight half-Laplace responses, unrolled.
///
/// Each sum visits the nonzero numerators of `h_i` in row-major order and
/// divides once, exactly as [`crate::stencil::convolve3`] does with the
/// stencils of [`KernelBank::standard`], so the results are bit-identical.
#[inline]
fn half_laplace_responses(n: &[[f64; 3]; 3]) -> [f64; 8] {
    let [[a, b, c], [d, e, f], [g, h, i]] = *n;
    [
        (a + b + 2.0 * d - 6.0 * e + g + h) / 6.0,
        (a + 2.0 * b + c + d - 6.0 * e + f) / 6.0,
        (b + c - 6.0 * e + 2.0 * f + h + i) / 6.0,
        (d - 6.0 * e + f + g + 2.0 * h + i) / 6.0,
        (2.0 * a + 4.0 * b + c + 4.0 * d - 12.0 * e + g) / 12.0,
        (a + 4.0 * b + 2.0 * c - 12.0 * e + 4.0 * f + i) / 12.0,
        (c - 12.0 * e + 4.0 * f + g + 4.0 * h + 2.0 * i) / 12.0,
        (a + 4.0 * d - 12.0 * e + 2.0 * g + 4.0 * h + i) / 12.0,
    ]
}

/// Discrete weighted mean curvature by the half-Laplace scheme.
///
/// For every pixel the eight signed distances `d_i = h_i * U` are computed
/// and the one with the smallest absolute value is returned.
pub fn wmc_half_laplace(img: &Image2D) -> Image2D {
    par_rows(img.width(), img.height(), |y, out| {
        let rows = row_triplet(img, y);
        for (x, o) in out.iter_mut().enumerate() {
            *o = select_min_abs(&half_laplace_responses(&neighborhood(rows, x))).1;
        }
    })
}

/// Like [`wmc_half_laplace`] but also returns the selected kernel index
/// (`0` for `h1` through `7` for `h8`) per pixel.
pub fn wmc_half_laplace_indexed(img: &Image2D) -> (Image2D, Vec<u8>) {
    let (w, h) = img.dims();
    let mut values = Image2D::zeros(w, h);
    let mut index = vec![0u8; w * h];
    for y in 0..h {
        let rows = row_triplet(img, y);
        for x in 0..w {
            let (m, v) = select_min_abs(&half_laplace_responses(&neighborhood(rows, x)));
            values.set(x, y, v);
            index[y * w + x] = m as u8;
        }
    }
    (values, index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{kernel, KernelBank, KernelName};
    use crate::stencil::convolve3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_image(seed: u64, w: usize, h: usize) -> Image2D {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Image2D::from_fn(w, h, |_, _| rng.random_range(0.0..255.0))
    }

    fn interior(img: &Image2D, margin: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (w, h) = img.dims();
        (margin..h - margin).flat_map(move |y| (margin..w - margin).map(move |x| (x, y)))
    }

    #[test]
    fn gradient_of_ramp_and_constant() {
        let ramp = Image2D::from_fn(6, 5, |x, _| 3.0 * x as f64);
        let (gx, gy) = gradient(&ramp);
        for (x, y) in interior(&ramp, 1) {
            assert_eq!(gx.get(x, y), 3.0);
            assert_eq!(gy.get(x, y), 0.0);
        }
        let (cx, cy) = gradient(&Image2D::filled(4, 4, 9.0));
        assert!(cx.data().iter().chain(cy.data()).all(|&v| v == 0.0));
    }

    #[test]
    fn central_difference_exact_for_quadratic() {
        let img = Image2D::from_fn(7, 7, |x, _| (x * x) as f64);
        let (gx, _) = gradient(&img);
        assert_eq!(gx.get(2, 3), 4.0);
    }

    #[test]
    fn forward_differences_match_definition() {
        let img = Image2D::from_fn(4, 3, |x, y| (x * x + 5 * y) as f64);
        let (gx, gy) = forward_differences(&img);
        assert_eq!(gx.get(1, 0), 3.0);
        assert_eq!(gx.get(3, 0), 0.0);
        assert_eq!(gy.get(2, 1), 5.0);
        assert_eq!(gy.get(2, 2), 0.0);
    }

    #[test]
    fn invalid_eps_rejected() {
        assert!(DiffConfig::new(0.0).is_err());
        assert!(DiffConfig::new(-1.0).is_err());
        assert!(DiffConfig::new(f64::NAN).is_err());
        assert_eq!(DiffConfig::default().eps_grad(), 1e-8);
    }

    #[test]
    fn fd_operators_vanish_on_ramp_interior() {
        let img = Image2D::from_fn(8, 8, |x, y| 2.0 * x as f64 - 0.5 * y as f64 + 4.0);
        let cfg = DiffConfig::default();
        for op in [
            mean_curvature_fd(&img, &cfg),
            wmc_fd(&img, &cfg),
            area_gradient_fd(&img),
        ] {
            for (x, y) in interior(&img, 1) {
                assert!(op.get(x, y).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn cone_mean_curvature() {
        let n = 101;
        let c = 50.0;
        let img = Image2D::from_fn(n, n, |x, y| (x as f64 - c).hypot(y as f64 - c));
        let h = mean_curvature_fd(&img, &DiffConfig::default());
        let v = h.get(60, 50);
        assert!((v - 0.05).abs() / 0.05 < 0.05, "H(r=10) = {v}");
    }

    #[test]
    fn mean_curvature_is_contrast_invariant() {
        let img = random_image(3, 12, 12);
        let cfg = DiffConfig::default();
        let h1 = mean_curvature_fd(&img, &cfg);
        let h2 = mean_curvature_fd(&img.map(|v| 2.0 * v), &cfg);
        let g = gradient_magnitude(&img);
        for i in 0..img.len() {
            if g.data()[i] > 100.0 * cfg.eps_grad() {
                let (a, b) = (h1.data()[i], h2.data()[i]);
                assert!((a - b).abs() <= 1e-9 * a.abs().max(1e-12), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn wmc_fd_is_twice_gradient_times_mean_curvature() {
        let img = random_image(4, 16, 16);
        let cfg = DiffConfig::default();
        let w = wmc_fd(&img, &cfg);
        let h = mean_curvature_fd(&img, &cfg);
        let g = gradient_magnitude(&img);
        for i in 0..img.len() {
            let gi = g.data()[i];
            if gi > 1.0 {
                let expected = 2.0 * gi * h.data()[i];
                assert!(
                    (w.data()[i] - expected).abs() < 1e-6,
                    "{} vs {expected}",
                    w.data()[i]
                );
            }
        }
    }

    #[test]
    fn wmc_fd_is_degree_one_homogeneous() {
        // The gradient guard is the only non-homogeneous part; make it negligible.
        let img = random_image(5, 10, 10);
        let cfg = DiffConfig::new(1e-300).unwrap();
        let base = wmc_fd(&img, &cfg);
        let scaled = wmc_fd(&img.map(|v| 3.0 * v), &cfg);
        for (a, b) in base.data().iter().zip(scaled.data()) {
            assert!((3.0 * a - b).abs() <= 1e-9 * b.abs().max(1.0), "{a} {b}");
        }
    }

    #[test]
    fn wmc_fd_at_zero_gradient_is_laplacian() {
        // Saddle-free bump whose center has an exactly zero central gradient.
        let img = Image2D::from_fn(5, 5, |x, y| if (x, y) == (2, 2) { 10.0 } else { 0.0 });
        let w = wmc_fd(&img, &DiffConfig::default());
        assert_eq!(w.get(2, 2), laplacian(&img).get(2, 2));
        assert_eq!(w.get(2, 2), -40.0);
    }

    #[test]
    fn half_laplace_constant_ramp_impulse() {
        let c = wmc_half_laplace(&Image2D::filled(5, 4, 42.0));
        assert!(c.data().iter().all(|&v| v == 0.0));

        let ramp = Image2D::from_fn(6, 6, |x, _| x as f64);
        let r = wmc_half_laplace(&ramp);
        for (x, y) in interior(&ramp, 1) {
            assert!(r.get(x, y).abs() < 1e-12);
        }

        let mut imp = Image2D::zeros(5, 5);
        imp.set(2, 2, 1.0);
        assert_eq!(wmc_half_laplace(&imp).get(2, 2), -1.0);
    }

    #[test]
    fn half_laplace_is_smallest_response() {
        let img = random_image(6, 9, 7);
        let out = wmc_half_laplace(&img);
        let responses: Vec<Image2D> = KernelName::HALF_LAPLACE
            .iter()
            .map(|&k| convolve3(&img, &kernel(k)))
            .collect();
        for i in 0..img.len() {
            let o = out.data()[i].abs();
            assert!(responses.iter().all(|d| o <= d.data()[i].abs()));
            assert!(responses.iter().any(|d| d.data()[i] == out.data()[i]));
            assert!(o <= 2.0 * img.max().abs().max(img.min().abs()));
        }
    }

    #[test]
    fn unrolled_responses_match_the_kernel_bank() {
        let img = random_image(12, 7, 7);
        let bank = KernelBank::standard();
        for y in 0..7 {
            let rows = row_triplet(&img, y);
            for x in 0..7 {
                let n = neighborhood(rows, x);
                let d = half_laplace_responses(&n);
                for (k, s) in bank.half_laplace.iter().enumerate() {
                    assert_eq!(d[k].to_bits(), s.apply_neighborhood(&n).to_bits());
                }
            }
        }
    }

    #[test]
    fn ties_go_to_the_lowest_index() {
        // Constant image: all responses are zero, h1 is selected.
        let (_, idx) = wmc_half_laplace_indexed(&Image2D::filled(3, 3, 1.0));
        assert!(idx.iter().all(|&i| i == 0));
        assert_eq!(
            select_min_abs(&[3.0, -1.0, 1.0, 2.0, -1.0, 5.0, 6.0, 7.0]),
            (1, -1.0)
        );
    }

    #[test]
    fn half_laplace_selection_is_contrast_invariant() {
        let img = random_image(8, 12, 12);
        let (_, base) = wmc_half_laplace_indexed(&img);
        for alpha in [0.5, 2.0, 4.0] {
            let (_, idx) = wmc_half_laplace_indexed(&img.map(|v| alpha * v));
            assert_eq!(base, idx);
        }
    }

    #[test]
    fn area_gradient_of_constant_is_zero() {
        let out = area_gradient_fd(&Image2D::filled(4, 4, 3.0));
        assert!(out.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn area_gradient_approximates_wmc_on_steep_pixels() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/natural/camera.png");
        let img = crate::io::load_gray(path).unwrap();
        let cfg = DiffConfig::default();
        let (a, w, g) = (
            area_gradient_fd(&img),
            wmc_fd(&img, &cfg),
            gradient_magnitude(&img),
        );
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..img.len() {
            if g.data()[i] >= 10.0 {
                num += (a.data()[i] - w.data()[i]).abs();
                den += w.data()[i].abs();
            }
        }
        assert!(num / den <= 0.15, "aggregate relative error {}", num / den);
    }

    #[test]
    fn area_gradient_matches_energy_gradient_for_gentle_slopes() {
        let img = random_image(3, 8, 8).map(|v| v * 1e-4);
        let analytic = area_gradient_fd(&img);
        let step = 1e-6;
        for (x, y) in [(0, 0), (3, 4), (7, 7), (2, 6)] {
            let mut p = img.clone();
            p.set(x, y, img.get(x, y) + step);
            let mut m = img.clone();
            m.set(x, y, img.get(x, y) - step);
            let num = -(crate::energies::area_energy(&p) - crate::energies::area_energy(&m))
                / (2.0 * step);
            let scale = analytic.data().iter().fold(0.0f64, |s, v| s.max(v.abs()));
            assert!(
                (num - analytic.get(x, y)).abs() <= 1e-3 * scale,
                "({x},{y}) {num} vs {}",
                analytic.get(x, y)
            );
        }
    }
}
