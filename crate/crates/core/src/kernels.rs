//! The four 3x3 Laplace kernels and the eight half-Laplace kernels.
//!
//! Weights are stored as exact rationals (integer grid over a common
//! denominator) and lowered to `f64` once. The half-Laplace kernels
//! `h1..h8` each cover one half of the 3x3 window: `h1..h4` the left, top,
//! right and bottom halves, `h5..h8` the four diagonal halves starting at
//! the top-left corner and turning clockwise.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::image::Image2D;
use crate::stencil::Stencil3;

pub type Rational = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KernelName {
    K1,
    K2,
    K3,
    K4,
    H1,
    H2,
    H3,
    H4,
    H5,
    H6,
    H7,
    H8,
}

impl KernelName {
    pub const LAPLACE: [KernelName; 4] = [Self::K1, Self::K2, Self::K3, Self::K4];
    pub const HALF_LAPLACE: [KernelName; 8] = [
        Self::H1,
        Self::H2,
        Self::H3,
        Self::H4,
        Self::H5,
        Self::H6,
        Self::H7,
        Self::H8,
    ];
    pub const ALL: [KernelName; 12] = [
        Self::K1,
        Self::K2,
        Self::K3,
        Self::K4,
        Self::H1,
        Self::H2,
        Self::H3,
        Self::H4,
        Self::H5,
        Self::H6,
        Self::H7,
        Self::H8,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::K1 => "k1",
            Self::K2 => "k2",
            Self::K3 => "k3",
            Self::K4 => "k4",
            Self::H1 => "h1",
            Self::H2 => "h2",
            Self::H3 => "h3",
            Self::H4 => "h4",
            Self::H5 => "h5",
            Self::H6 => "h6",
            Self::H7 => "h7",
            Self::H8 => "h8",
        }
    }

    /// Integer weights and their common denominator.
    fn table(self) -> ([[i64; 3]; 3], i64) {
        match self {
            Self::K1 => ([[1, 1, 1], [1, -8, 1], [1, 1, 1]], 8),
            Self::K2 => ([[-1, 5, -1], [5, -16, 5], [-1, 5, -1]], 16),
            Self::K3 => ([[1, 4, 1], [4, -20, 4], [1, 4, 1]], 20),
            Self::K4 => ([[1, 2, 1], [2, -12, 2], [1, 2, 1]], 12),
            Self::H1 => ([[1, 1, 0], [2, -6, 0], [1, 1, 0]], 6),
            Self::H2 => ([[1, 2, 1], [1, -6, 1], [0, 0, 0]], 6),
            Self::H3 => ([[0, 1, 1], [0, -6, 2], [0, 1, 1]], 6),
            Self::H4 => ([[0, 0, 0], [1, -6, 1], [1, 2, 1]], 6),
            Self::H5 => ([[2, 4, 1], [4, -12, 0], [1, 0, 0]], 12),
            Self::H6 => ([[1, 4, 2], [0, -12, 4], [0, 0, 1]], 12),
            Self::H7 => ([[0, 0, 1], [0, -12, 4], [1, 4, 2]], 12),
            Self::H8 => ([[1, 0, 0], [4, -12, 0], [2, 4, 1]], 12),
        }
    }
}

impl fmt::Display for KernelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KernelName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parameter(format!("unknown kernel '{s}'")))
    }
}

/// Exact rational weights of a kernel, indexed `[row][col]`.
pub fn exact_weights(name: KernelName) -> [[Rational; 3]; 3] {
    let (grid, den) = name.table();
    grid.map(|row| row.map(|n| Rational::new(n, den)))
}

/// The kernel lowered to floating point.
pub fn kernel(name: KernelName) -> Stencil3 {
    let (grid, den) = name.table();
    Stencil3::rational(grid.map(|row| row.map(|n| n as f64)), den as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelBank {
    pub laplace: [Stencil3; 4],
    pub half_laplace: [Stencil3; 8],
}

impl KernelBank {
    pub fn standard() -> &'static KernelBank {
        static BANK: OnceLock<KernelBank> = OnceLock::new();
        BANK.get_or_init(|| KernelBank {
            laplace: KernelName::LAPLACE.map(kernel),
            half_laplace: KernelName::HALF_LAPLACE.map(kernel),
        })
    }
}

/// Magnitude of the stencil's frequency response at `(wx, wy)` radians per pixel.
pub fn transfer_magnitude(s: &Stencil3, wx: f64, wy: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (r, row) in s.numerators().iter().enumerate() {
        for (c, &w) in row.iter().enumerate() {
            let phase = -(wx * (c as f64 - 1.0) + wy * (r as f64 - 1.0));
            re += w * phase.cos();
            im += w * phase.sin();
        }
    }
    re.hypot(im) / s.denominator().abs()
}

/// |DFT| of the zero-padded stencil on a `grid x grid` frequency lattice.
///
/// Entry `(kx, ky)` holds the magnitude at `(2 pi kx / grid, 2 pi ky / grid)`,
/// so the DC term sits at `(0, 0)`.
pub fn spectral_magnitude(s: &Stencil3, grid: usize) -> Result<Image2D> {
    if grid < 8 {
        return Err(Error::Parameter(format!(
            "spectrum grid must be at least 8, got {grid}"
        )));
    }
    let step = 2.0 * PI / grid as f64;
    Ok(Image2D::from_fn(grid, grid, |kx, ky| {
        transfer_magnitude(s, kx as f64 * step, ky as f64 * step)
    }))
}

/// Spread (max - min) of the response magnitude around one frequency ring.
pub fn ring_anisotropy(s: &Stencil3, radius: f64, samples: usize) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..samples {
        let t = 2.0 * PI * i as f64 / samples as f64;
        let m = transfer_magnitude(s, radius * t.cos(), radius * t.sin());
        lo = lo.min(m);
        hi = hi.max(m);
    }
    hi - lo
}

/// Worst ring spread over radii in `(0, pi]`.
///
/// This is the scalar summary of the isolines of the full spectrum: a kernel
/// is more isotropic when no ring inside the Nyquist disc deviates much from
/// circular.
pub fn anisotropy_score(s: &Stencil3) -> f64 {
    const RINGS: usize = 64;
    const SAMPLES: usize = 720;
    (1..=RINGS)
        .map(|i| ring_anisotropy(s, PI * i as f64 / RINGS as f64, SAMPLES))
        .fold(0.0, f64::max)
}
