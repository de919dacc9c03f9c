//! Regularization energies evaluated as pixel sums.
//!
//! The first-order energies (TV, anisotropic TV, eps-TV, area) use forward
//! differences with replicate boundaries, the usual discretization for
//! these functionals. The curvature energies use [`mean_curvature_fd`] and
//! either the half-Laplace or the finite-difference weighted mean curvature.

use crate::error::{Error, Result};
use crate::image::{par_rows, Image2D};
use crate::operators::{mean_curvature_fd, wmc_fd, wmc_half_laplace, DiffConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnergyKind {
    /// Isotropic total variation, `sum |grad U|_2`.
    Tv,
    /// Anisotropic total variation, `sum |U_x| + |U_y|`.
    TvL1,
    /// `sum sqrt(eps + |grad U|^2)`.
    EpsTv,
    /// Graph surface area, `sum sqrt(1 + |grad U|^2)`.
    Area,
    /// `sum |H|^q`.
    Mc,
    /// `sum |H^w|^q`.
    Wmc,
}

impl std::str::FromStr for EnergyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tv" => Ok(Self::Tv),
            "tvl1" => Ok(Self::TvL1),
            "epstv" | "eps-tv" => Ok(Self::EpsTv),
            "area" => Ok(Self::Area),
            "mc" => Ok(Self::Mc),
            "wmc" => Ok(Self::Wmc),
            _ => Err(Error::Parameter(format!("unknown regularizer '{s}'"))),
        }
    }
}

/// Discretization used for `H^w` inside [`EnergyKind::Wmc`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum WmcScheme {
    #[default]
    HalfLaplace,
    FiniteDifference,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyConfig {
    pub kind: EnergyKind,
    /// Exponent for the curvature energies.
    pub q: f64,
    /// Smoothing constant for eps-TV.
    pub eps: f64,
    pub wmc_scheme: WmcScheme,
    pub diff: DiffConfig,
}

impl EnergyConfig {
    pub fn new(kind: EnergyKind) -> Self {
        Self {
            kind,
            q: 1.0,
            eps: 0.0,
            wmc_scheme: WmcScheme::HalfLaplace,
            diff: DiffConfig::default(),
        }
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = q;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_wmc_scheme(mut self, scheme: WmcScheme) -> Self {
        self.wmc_scheme = scheme;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q > 0.0 && self.q.is_finite()) {
            return Err(Error::Parameter(format!(
                "q must be positive, got {}",
                self.q
            )));
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(Error::Parameter(format!(
                "eps must be non-negative, got {}",
                self.eps
            )));
        }
        Ok(())
    }
}

#[inline]
fn forward_pair(img: &Image2D, x: usize, y: usize) -> (f64, f64) {
    let (w, h) = img.dims();
    let c = img.get(x, y);
    (
        img.get((x + 1).min(w - 1), y) - c,
        img.get(x, (y + 1).min(h - 1)) - c,
    )
}

fn first_order(img: &Image2D, f: impl Fn(f64, f64) -> f64 + Sync) -> Image2D {
    par_rows(img.width(), img.height(), |y, out| {
        for (x, o) in out.iter_mut().enumerate() {
            let (gx, gy) = forward_pair(img, x, y);
            *o = f(gx, gy);
        }
    })
}

fn powq(v: f64, q: f64) -> f64 {
    if q == 1.0 {
        v.abs()
    } else {
        v.abs().powf(q)
    }
}

/// Per-pixel integrand of the configured energy.
pub fn integrand(img: &Image2D, cfg: &EnergyConfig) -> Result<Image2D> {
    cfg.validate()?;
    let q = cfg.q;
    Ok(match cfg.kind {
        EnergyKind::Tv => first_order(img, |gx, gy| gx.hypot(gy)),
        EnergyKind::TvL1 => first_order(img, |gx, gy| gx.abs() + gy.abs()),
        EnergyKind::EpsTv => {
            let eps = cfg.eps;
            first_order(img, move |gx, gy| (eps + gx * gx + gy * gy).sqrt())
        }
        EnergyKind::Area => first_order(img, |gx, gy| (1.0 + gx * gx + gy * gy).sqrt()),
        EnergyKind::Mc => mean_curvature_fd(img, &cfg.diff).map(|v| powq(v, q)),
        EnergyKind::Wmc => match cfg.wmc_scheme {
            WmcScheme::HalfLaplace => wmc_half_laplace(img).map(|v| powq(v, q)),
            WmcScheme::FiniteDifference => wmc_fd(img, &cfg.diff).map(|v| powq(v, q)),
        },
    })
}

/// Pixel sum (unit pixel area) of the configured integrand.
///
/// Rows are summed left to right and the row totals top to bottom, so the
/// value is independent of thread count.
pub fn energy(img: &Image2D, cfg: &EnergyConfig) -> Result<f64> {
    let density = integrand(img, cfg)?;
    Ok((0..density.height())
        .map(|y| density.row(y).iter().sum::<f64>())
        .sum())
}

/// Area energy, `sum sqrt(1 + |grad U|^2)` with forward differences.
pub fn area_energy(img: &Image2D) -> f64 {
    energy(img, &EnergyConfig::new(EnergyKind::Area)).expect("area config is valid")
}

/// One point of the eps-TV versus TV comparison curves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsCurvePoint {
    pub eps: f64,
    pub ratio: f64,
    pub difference: f64,
}

/// `EpsTV / TV` and `EpsTV - TV` for each `eps`.
///
/// The ratio is infinite when TV is zero.
pub fn eps_tv_curves(img: &Image2D, eps_values: &[f64]) -> Result<Vec<EpsCurvePoint>> {
    let tv = energy(img, &EnergyConfig::new(EnergyKind::Tv))?;
    eps_values
        .iter()
        .map(|&eps| {
            let e = energy(img, &EnergyConfig::new(EnergyKind::EpsTv).with_eps(eps))?;
            Ok(EpsCurvePoint {
                eps,
                ratio: if tv > 0.0 { e / tv } else { f64::INFINITY },
                difference: e - tv,
            })
        })
        .collect()
}

/// Curvature energies of a sampled closed-or-open curve.
///
/// Each interior sample carries the curvature of the circle through it and
/// its two neighbours. `curvature_sum` adds these curvatures, while
/// `weighted_sum` multiplies each by the sample's share of arc length (half
/// the two adjacent chords), the discrete analogue of weighting curvature
/// by the gradient magnitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveEnergies {
    pub curvature_sum: f64,
    pub weighted_sum: f64,
}

/// Evaluates [`CurveEnergies`] for `points`, treating the first and last
/// point as neighbours only (they carry no sample of their own).
pub fn curve_energies(points: &[[f64; 2]]) -> CurveEnergies {
    let mut out = CurveEnergies {
        curvature_sum: 0.0,
        weighted_sum: 0.0,
    };
    for w in points.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        let ab = (b[0] - a[0]).hypot(b[1] - a[1]);
        let bc = (c[0] - b[0]).hypot(c[1] - b[1]);
        let ca = (a[0] - c[0]).hypot(a[1] - c[1]);
        let cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
        let curvature = 2.0 * cross.abs() / (ab * bc * ca);
        out.curvature_sum += curvature;
        out.weighted_sum += curvature * 0.5 * (ab + bc);
    }
    out
}

/// [`CurveEnergies`] of an arc of `quarters` quarter turns sampled at
/// `samples_per_quarter` points per quarter, every sample having its
/// neighbours on the circle.
pub fn arc_energies(radius: f64, samples_per_quarter: usize, quarters: usize) -> CurveEnergies {
    let n = (samples_per_quarter * quarters) as isize;
    let points: Vec<[f64; 2]> = (-1..=n)
        .map(|k| crate::synth::arc_point(radius, samples_per_quarter, k))
        .collect();
    curve_energies(&points)
}
