//! Weighted mean curvature for images.
//!
//! The core of the crate is [`operators::wmc_half_laplace`], which computes
//! the weighted mean curvature `H^w = |grad U| * div(grad U / |grad U|)` of
//! an image with eight 3x3 half-window stencils, keeping at every pixel the
//! response of smallest magnitude. Around it sit:
//!
//! * [`kernels`]: the stencil tables and their spectral properties,
//! * [`operators`]: central-difference derivatives, mean curvature and the
//!   area-energy gradient,
//! * [`energies`]: TV, eps-TV, area and curvature energies,
//! * [`flow`]: mean curvature flow,
//! * [`solvers`]: l2 and l1 smoothing with the area regularizer,
//! * [`stats`], [`metrics`] and [`bench`]: corpus histograms, SSIM and timing.
//!
//! ```
//! use curveflow::{operators::wmc_half_laplace, synth, Image2D};
//!
//! let plane = synth::affine(16, 16, 2.0, 0.0, 10.0);
//! let hw = wmc_half_laplace(&plane);
//! assert!(hw.crop(1, 1, 14, 14).unwrap().data().iter().all(|&v| v == 0.0));
//! # let _ = Image2D::zeros(1, 1);
//! ```

pub mod bench;
pub mod energies;
pub mod error;
pub mod flow;
pub mod image;
pub mod io;
pub mod kernels;
pub mod linop;
pub mod metrics;
pub mod operators;
pub mod parallel;
#[cfg(test)]
mod proptests;
pub mod solvers;
pub mod stats;
pub mod stencil;
pub mod synth;

pub use crate::error::{Error, Result};
pub use crate::image::{merge_channels, split_channels, Image2D, PixelBuffer};
pub use crate::kernels::{KernelBank, KernelName};
pub use crate::linop::{Identity, LinearOperator, StencilOperator};
pub use crate::stencil::{convolve3, Stencil3};
