//! Linear imaging operators `A` with their adjoints.

use crate::image::Image2D;
use crate::stencil::{convolve3, Stencil3};

/// A linear map between images together with its adjoint.
pub trait LinearOperator: Send + Sync {
    fn apply(&self, u: &Image2D) -> Image2D;

    /// Applies the transpose, satisfying `<A u, v> = <u, A^T v>`.
    fn adjoint(&self, v: &Image2D) -> Image2D;

    /// Output dimensions for an input of `(width, height)`, or `None` when
    /// the operator cannot accept that shape.
    fn output_dims(&self, input: (usize, usize)) -> Option<(usize, usize)> {
        Some(input)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Identity;

impl LinearOperator for Identity {
    fn apply(&self, u: &Image2D) -> Image2D {
        u.clone()
    }

    fn adjoint(&self, v: &Image2D) -> Image2D {
        v.clone()
    }
}

/// Replicate-boundary 3x3 correlation as an operator.
///
/// The adjoint scatters each pixel back through the clamped taps, which is
/// the exact transpose of [`convolve3`] including at the borders.
#[derive(Clone, Copy, Debug)]
pub struct StencilOperator {
    pub stencil: Stencil3,
}

impl LinearOperator for StencilOperator {
    fn apply(&self, u: &Image2D) -> Image2D {
        convolve3(u, &self.stencil)
    }

    fn adjoint(&self, v: &Image2D) -> Image2D {
        let (w, h) = v.dims();
        let mut out = Image2D::zeros(w, h);
        for y in 0..h {
            for x in 0..w {
                let val = v.get(x, y);
                for dy in -1isize..=1 {
                    for dx in -1isize..=1 {
                        let weight = self.stencil.at(dy, dx);
                        if weight == 0.0 {
                            continue;
                        }
                        let sx = (x as isize + dx).clamp(0, w as isize - 1) as usize;
                        let sy = (y as isize + dy).clamp(0, h as isize - 1) as usize;
                        let cur = out.get(sx, sy);
                        out.set(sx, sy, cur + weight * val);
                    }
                }
            }
        }
        out
    }
}
