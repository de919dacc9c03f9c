//! Mean curvature flow `U <- U + dt * H^w(U)`.
//!
//! `H^w` is evaluated either by finite differences ([`wmc_fd`]) or by the
//! half-Laplace scheme ([`wmc_half_laplace`]). The explicit finite-difference
//! scheme needs `dt <= 0.25`; the half-Laplace update with `dt <= 1` moves
//! each pixel toward a positive half-window average and obeys a maximum
//! principle.

use crate::error::{Error, Result};
use crate::image::Image2D;
use crate::operators::{wmc_fd, wmc_half_laplace, DiffConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowScheme {
    FiniteDifference,
    HalfLaplace,
}

impl FlowScheme {
    pub fn default_dt(self) -> f64 {
        match self {
            Self::FiniteDifference => 0.2,
            Self::HalfLaplace => 1.0,
        }
    }

    pub fn max_dt(self) -> f64 {
        match self {
            Self::FiniteDifference => 0.25,
            Self::HalfLaplace => 1.0,
        }
    }
}

impl std::str::FromStr for FlowScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fd" | "deriv" => Ok(Self::FiniteDifference),
            "half" | "half_laplace" | "half-laplace" => Ok(Self::HalfLaplace),
            _ => Err(Error::Parameter(format!("unknown flow scheme '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowConfig {
    pub dt: f64,
    pub iters: usize,
    pub scheme: FlowScheme,
    pub diff: DiffConfig,
}

impl FlowConfig {
    /// Default step for `scheme` and the given number of iterations.
    pub fn new(scheme: FlowScheme, iters: usize) -> Self {
        Self {
            dt: scheme.default_dt(),
            iters,
            scheme,
            diff: DiffConfig::default(),
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let max = self.scheme.max_dt();
        if !(self.dt > 0.0 && self.dt <= max) {
            return Err(Error::Parameter(format!(
                "dt must be in (0, {max}] for {:?}, got {}",
                self.scheme, self.dt
            )));
        }
        Ok(())
    }
}

/// One explicit flow update.
pub fn flow_step(img: &Image2D, scheme: FlowScheme, dt: f64, diff: &DiffConfig) -> Image2D {
    let hw = match scheme {
        FlowScheme::FiniteDifference => wmc_fd(img, diff),
        FlowScheme::HalfLaplace => wmc_half_laplace(img),
    };
    img.zip_map(&hw, |u, h| u + dt * h)
        .expect("operator preserves dimensions")
}

/// Runs the flow, calling `observe(t, &U_t)` after every iteration `t = 1..=iters`.
pub fn mc_flow_observed(
    img: &Image2D,
    cfg: &FlowConfig,
    mut observe: impl FnMut(usize, &Image2D),
) -> Result<Image2D> {
    cfg.validate()?;
    let mut u = img.clone();
    for t in 1..=cfg.iters {
        u = flow_step(&u, cfg.scheme, cfg.dt, &cfg.diff);
        if !u.is_finite() {
            return Err(Error::Divergence {
                iteration: t,
                context: format!("{:?} flow with dt {}", cfg.scheme, cfg.dt),
            });
        }
        observe(t, &u);
    }
    Ok(u)
}

pub fn mc_flow(img: &Image2D, cfg: &FlowConfig) -> Result<Image2D> {
    mc_flow_observed(img, cfg, |_, _| {})
}

/// Runs the flow on each channel independently.
pub fn mc_flow_channels(channels: &[Image2D], cfg: &FlowConfig) -> Result<Vec<Image2D>> {
    channels.iter().map(|c| mc_flow(c, cfg)).collect()
}

/// Distance in samples between the 10% and 90% crossings of a monotone-ish
/// edge profile, using the first and last samples as the two plateaus.
///
/// Crossings are located by linear interpolation between samples. A perfect
/// one-sample step has width 0.8. Returns `None` when the profile is flat.
pub fn edge_transition_width(profile: &[f64]) -> Option<f64> {
    let (&lo, &hi) = (profile.first()?, profile.last()?);
    if lo == hi {
        return None;
    }
    let crossing = |level: f64| -> Option<f64> {
        profile.windows(2).enumerate().find_map(|(i, w)| {
            let (p, q) = (w[0], w[1]);
            ((p - level) * (q - level) <= 0.0 && p != q).then(|| i as f64 + (level - p) / (q - p))
        })
    };
    let a = crossing(lo + 0.1 * (hi - lo))?;
    let b = crossing(lo + 0.9 * (hi - lo))?;
    Some((b - a).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn zero_iterations_is_identity() {
        let img = synth::random_image(6, 6, 0.0, 255.0, 1);
        for scheme in [FlowScheme::FiniteDifference, FlowScheme::HalfLaplace] {
            assert_eq!(mc_flow(&img, &FlowConfig::new(scheme, 0)).unwrap(), img);
        }
    }

    #[test]
    fn constant_image_is_stationary() {
        let img = Image2D::filled(8, 8, 77.0);
        for scheme in [FlowScheme::FiniteDifference, FlowScheme::HalfLaplace] {
            assert_eq!(mc_flow(&img, &FlowConfig::new(scheme, 25)).unwrap(), img);
        }
    }

    #[test]
    fn step_limits() {
        let img = Image2D::zeros(2, 2);
        let bad = FlowConfig::new(FlowScheme::FiniteDifference, 1).with_dt(0.3);
        assert!(matches!(mc_flow(&img, &bad), Err(Error::Parameter(_))));
        let bad = FlowConfig::new(FlowScheme::HalfLaplace, 1).with_dt(1.5);
        assert!(mc_flow(&img, &bad).is_err());
        assert!(mc_flow(
            &img,
            &FlowConfig::new(FlowScheme::HalfLaplace, 1).with_dt(0.0)
        )
        .is_err());
    }

    #[test]
    fn divergence_names_the_iteration() {
        let mut img = Image2D::zeros(4, 4);
        img.set(1, 1, f64::MAX);
        let err = mc_flow(&img, &FlowConfig::new(FlowScheme::HalfLaplace, 3)).unwrap_err();
        assert!(
            matches!(err, Error::Divergence { iteration: 1, .. }),
            "{err}"
        );
    }

    #[test]
    fn half_laplace_preserves_noisy_step() {
        let clean = synth::step_edge(64, 64, 0.0, 100.0);
        let noisy = synth::add_uniform_noise(&clean, 5.0, 7);
        let out = mc_flow(&noisy, &FlowConfig::new(FlowScheme::HalfLaplace, 100)).unwrap();
        let left = |img: &Image2D| img.crop(4, 4, 24, 56).unwrap();
        let right = |img: &Image2D| img.crop(36, 4, 24, 56).unwrap();
        let height = right(&out).mean() - left(&out).mean();
        assert!(height >= 95.0, "edge height {height}");
        let before = left(&noisy).variance();
        let after = left(&out).variance();
        assert!(before / after >= 10.0, "variance {before} -> {after}");
    }

    #[test]
    fn transition_width_of_ideal_step() {
        assert!((edge_transition_width(&[0.0, 0.0, 100.0, 100.0]).unwrap() - 0.8).abs() < 1e-12);
        assert!((edge_transition_width(&[0.0, 50.0, 100.0]).unwrap() - 1.6).abs() < 1e-12);
        assert_eq!(edge_transition_width(&[3.0, 3.0]), None);
    }

    #[test]
    fn scheme_names() {
        assert_eq!(
            "half".parse::<FlowScheme>().unwrap(),
            FlowScheme::HalfLaplace
        );
        assert_eq!(
            "fd".parse::<FlowScheme>().unwrap(),
            FlowScheme::FiniteDifference
        );
    }
}
