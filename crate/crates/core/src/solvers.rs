//! Variational smoothing with a data term and a curvature-based regularizer.
//!
//! * [`solve_l2_area`]: `1/2 |AU - f|^2 + lambda R_area(U)` by explicit
//!   descent, with the area gradient replaced by `-H^w(U)`.
//! * [`solve_l1_area`]: `|AU - f|_1 + lambda R_area(U)` by a primal-dual
//!   alternation of soft shrinkage, a clamped dual update and one descent
//!   step on `U`.
//! * [`solve_l2_epstv`]: `1/2 |AU - f|^2 + lambda EpsTV(U)` by plain
//!   gradient descent, a baseline that tends to lose contrast.
//!
//! All solvers start from `U = f` and stop early once the relative update
//! `|U_new - U| / |U|` drops below the tolerance.
//!
//! The half-Laplace update `U + s H^w(U)` only moves a pixel part of the way
//! toward a half-window average while `s <= 1`. The area solvers therefore
//! use the step `min(dt, 1 / lambda)`; see [`SolverConfig::effective_dt`].

use std::sync::Arc;

use crate::energies::{area_energy, energy, EnergyConfig, EnergyKind};
use crate::error::{param, Error, Result};
use crate::image::{par_rows, Image2D};
use crate::linop::{Identity, LinearOperator};
use crate::operators::wmc_half_laplace;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmoothModel {
    L2Area,
    L1Area,
    L2EpsTv,
}

impl std::str::FromStr for SmoothModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l2" | "l2_area" => Ok(Self::L2Area),
            "l1" | "l1_area" => Ok(Self::L1Area),
            "tv" | "epstv" | "l2_epstv" => Ok(Self::L2EpsTv),
            _ => Err(param(format!("unknown model '{s}'"))),
        }
    }
}

#[derive(Clone)]
pub struct SolverConfig {
    pub model: SmoothModel,
    pub lambda: f64,
    /// Dual bound of the l1 model.
    pub alpha: f64,
    pub dt: f64,
    pub iters: usize,
    /// Smoothing constant of the eps-TV baseline.
    pub eps: f64,
    /// Relative update below which the run counts as converged.
    pub tol: f64,
    pub operator: Arc<dyn LinearOperator>,
}

impl std::fmt::Debug for SolverConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SolverConfig")
            .field("model", &self.model)
            .field("lambda", &self.lambda)
            .field("alpha", &self.alpha)
            .field("dt", &self.dt)
            .field("iters", &self.iters)
            .field("eps", &self.eps)
            .field("tol", &self.tol)
            .finish_non_exhaustive()
    }
}

impl SolverConfig {
    pub fn new(model: SmoothModel, lambda: f64) -> Self {
        Self {
            model,
            lambda,
            alpha: 1.0,
            dt: 0.15,
            iters: 500,
            eps: 1.0,
            tol: 1e-6,
            operator: Arc::new(Identity),
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_iters(mut self, iters: usize) -> Self {
        self.iters = iters;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_operator(mut self, op: Arc<dyn LinearOperator>) -> Self {
        self.operator = op;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            (
                self.lambda >= 0.0 && self.lambda.is_finite(),
                "lambda must be >= 0",
            ),
            (
                self.alpha > 0.0 && self.alpha.is_finite(),
                "alpha must be > 0",
            ),
            (self.dt > 0.0 && self.dt.is_finite(), "dt must be > 0"),
            (self.iters > 0, "iters must be positive"),
            (self.tol >= 0.0, "tol must be >= 0"),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(param(msg));
            }
        }
        if self.model == SmoothModel::L2EpsTv && !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(param(format!("eps-TV needs eps > 0, got {}", self.eps)));
        }
        Ok(())
    }

    /// Step actually taken: `dt`, capped at `1 / lambda` for the area
    /// models so that `dt * lambda <= 1`.
    pub fn effective_dt(&self) -> f64 {
        match self.model {
            SmoothModel::L2Area | SmoothModel::L1Area if self.lambda > 0.0 => {
                self.dt.min(1.0 / self.lambda)
            }
            _ => self.dt,
        }
    }

    fn check_model(&self, model: SmoothModel) -> Result<()> {
        if self.model != model {
            return Err(param(format!(
                "config is for {:?}, solver expects {model:?}",
                self.model
            )));
        }
        self.validate()
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub image: Image2D,
    /// Data term after each iteration.
    pub fidelity: Vec<f64>,
    /// Unweighted regularization energy after each iteration.
    pub regularization: Vec<f64>,
    /// For the l1 model, `max |b - (r - d_new)|` per iteration; empty otherwise.
    pub split_residual: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Step used, see [`SolverConfig::effective_dt`].
    pub dt: f64,
}

impl SolveReport {
    /// `fidelity + lambda * regularization` per iteration.
    pub fn objective(&self, lambda: f64) -> Vec<f64> {
        self.fidelity
            .iter()
            .zip(&self.regularization)
            .map(|(f, r)| f + lambda * r)
            .collect()
    }
}

/// Soft shrinkage: `r - alpha` above `alpha`, `r + alpha` below `-alpha`,
/// zero in between.
pub fn shrink(r: f64, alpha: f64) -> f64 {
    if r > alpha {
        r - alpha
    } else if r < -alpha {
        r + alpha
    } else {
        0.0
    }
}

/// Dual update `clamp(r, -alpha, alpha)`.
pub fn dual_clamp(r: f64, alpha: f64) -> f64 {
    r.clamp(-alpha, alpha)
}

fn residual(op: &dyn LinearOperator, u: &Image2D, f: &Image2D) -> Result<Image2D> {
    op.apply(u).zip_map(f, |a, b| a - b)
}

fn check_shapes(op: &dyn LinearOperator, f: &Image2D) -> Result<()> {
    match op.output_dims(f.dims()) {
        Some(d) if d == f.dims() => Ok(()),
        _ => Err(param(
            "operator output shape must match the observation shape",
        )),
    }
}

fn relative_change(old: &Image2D, new: &Image2D) -> f64 {
    let diff: f64 = old
        .data()
        .iter()
        .zip(new.data())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let norm: f64 = old.data().iter().map(|a| a * a).sum();
    if norm == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (diff / norm).sqrt()
    }
}

fn diverged(model: SmoothModel, iteration: usize) -> Error {
    Error::Divergence {
        iteration,
        context: format!("{model:?} solver"),
    }
}

/// One descent step of the l2 area model,
/// `U + dt (-A^T (AU - f) + lambda H^w(U))`.
pub fn l2_area_step(
    u: &Image2D,
    f: &Image2D,
    op: &dyn LinearOperator,
    lambda: f64,
    dt: f64,
) -> Result<Image2D> {
    let grad = op.adjoint(&residual(op, u, f)?);
    let hw = wmc_half_laplace(u);
    Ok(par_rows(u.width(), u.height(), |y, out| {
        let (ur, gr, hr) = (u.row(y), grad.row(y), hw.row(y));
        for x in 0..out.len() {
            out[x] = ur[x] + dt * (-gr[x] + lambda * hr[x]);
        }
    }))
}

pub fn solve_l2_area(f: &Image2D, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.check_model(SmoothModel::L2Area)?;
    let op = cfg.operator.as_ref();
    check_shapes(op, f)?;
    let mut report = SolveReport {
        image: f.clone(),
        fidelity: Vec::new(),
        regularization: Vec::new(),
        split_residual: Vec::new(),
        converged: false,
        iterations: 0,
        dt: cfg.effective_dt(),
    };
    for it in 1..=cfg.iters {
        let next = l2_area_step(&report.image, f, op, cfg.lambda, report.dt)?;
        if !next.is_finite() {
            return Err(diverged(cfg.model, it));
        }
        let change = relative_change(&report.image, &next);
        report.image = next;
        let r = residual(op, &report.image, f)?;
        report.fidelity.push(0.5 * r.dot(&r)?);
        report.regularization.push(area_energy(&report.image));
        report.iterations = it;
        if change < cfg.tol {
            report.converged = true;
            break;
        }
    }
    Ok(report)
}

pub fn solve_l1_area(f: &Image2D, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.check_model(SmoothModel::L1Area)?;
    let op = cfg.operator.as_ref();
    check_shapes(op, f)?;
    let alpha = cfg.alpha;
    let dt = cfg.effective_dt();
    let mut u = f.clone();
    let mut d = Image2D::zeros(f.width(), f.height());
    let mut report = SolveReport {
        image: f.clone(),
        fidelity: Vec::new(),
        regularization: Vec::new(),
        split_residual: Vec::new(),
        converged: false,
        iterations: 0,
        dt: cfg.effective_dt(),
    };
    for it in 1..=cfg.iters {
        let r = residual(op, &u, f)?.zip_map(&d, |a, b| a + b)?;
        let b = r.map(|v| shrink(v, alpha));
        let d_new = r.map(|v| dual_clamp(v, alpha));
        let split = b
            .data()
            .iter()
            .zip(r.data())
            .zip(d_new.data())
            .map(|((b, r), d)| (b - (r - d)).abs())
            .fold(0.0, f64::max);
        let dual = op.adjoint(&d_new.zip_map(&d, |n, o| 2.0 * n - o)?);
        let hw = wmc_half_laplace(&u);
        let next = par_rows(u.width(), u.height(), |y, out| {
            let (ur, hr, pr) = (u.row(y), hw.row(y), dual.row(y));
            for x in 0..out.len() {
                out[x] = ur[x] + dt * (cfg.lambda * hr[x] - pr[x] / alpha);
            }
        });
        if !next.is_finite() {
            return Err(diverged(cfg.model, it));
        }
        let change = relative_change(&u, &next);
        u = next;
        d = d_new;
        let res = residual(op, &u, f)?;
        report
            .fidelity
            .push(res.data().iter().map(|v| v.abs()).sum());
        report.regularization.push(area_energy(&u));
        report.split_residual.push(split);
        report.iterations = it;
        if change < cfg.tol {
            report.converged = true;
            break;
        }
    }
    report.image = u;
    Ok(report)
}

/// Adjoint of the forward-difference gradient (negative backward divergence).
fn forward_adjoint(px: &Image2D, py: &Image2D) -> Image2D {
    let (w, h) = px.dims();
    par_rows(w, h, |y, out| {
        for (x, o) in out.iter_mut().enumerate() {
            let mut v = 0.0;
            if x > 0 {
                v += px.get(x - 1, y);
            }
            if x + 1 < w {
                v -= px.get(x, y);
            }
            if y > 0 {
                v += py.get(x, y - 1);
            }
            if y + 1 < h {
                v -= py.get(x, y);
            }
            *o = v;
        }
    })
}

/// Gradient of `EpsTV(U) = sum sqrt(eps + |D U|^2)` with forward differences `D`.
pub fn eps_tv_gradient(u: &Image2D, eps: f64) -> Image2D {
    let (w, h) = u.dims();
    let mut px = Image2D::zeros(w, h);
    let mut py = Image2D::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let c = u.get(x, y);
            let gx = u.get((x + 1).min(w - 1), y) - c;
            let gy = u.get(x, (y + 1).min(h - 1)) - c;
            let n = (eps + gx * gx + gy * gy).sqrt();
            px.set(x, y, gx / n);
            py.set(x, y, gy / n);
        }
    }
    forward_adjoint(&px, &py)
}

pub fn solve_l2_epstv(f: &Image2D, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.check_model(SmoothModel::L2EpsTv)?;
    let op = cfg.operator.as_ref();
    check_shapes(op, f)?;
    let reg = EnergyConfig::new(EnergyKind::EpsTv).with_eps(cfg.eps);
    let mut report = SolveReport {
        image: f.clone(),
        fidelity: Vec::new(),
        regularization: Vec::new(),
        split_residual: Vec::new(),
        converged: false,
        iterations: 0,
        dt: cfg.effective_dt(),
    };
    for it in 1..=cfg.iters {
        let u = &report.image;
        let data = op.adjoint(&residual(op, u, f)?);
        let tv = eps_tv_gradient(u, cfg.eps);
        let next = par_rows(u.width(), u.height(), |y, out| {
            let (ur, dr, tr) = (u.row(y), data.row(y), tv.row(y));
            for x in 0..out.len() {
                out[x] = ur[x] - cfg.dt * (dr[x] + cfg.lambda * tr[x]);
            }
        });
        if !next.is_finite() {
            return Err(diverged(cfg.model, it));
        }
        let change = relative_change(u, &next);
        report.image = next;
        let r = residual(op, &report.image, f)?;
        report.fidelity.push(0.5 * r.dot(&r)?);
        report.regularization.push(energy(&report.image, &reg)?);
        report.iterations = it;
        if change < cfg.tol {
            report.converged = true;
            break;
        }
    }
    Ok(report)
}

/// Dispatches on `cfg.model`.
pub fn solve(f: &Image2D, cfg: &SolverConfig) -> Result<SolveReport> {
    match cfg.model {
        SmoothModel::L2Area => solve_l2_area(f, cfg),
        SmoothModel::L1Area => solve_l1_area(f, cfg),
        SmoothModel::L2EpsTv => solve_l2_epstv(f, cfg),
    }
}

/// Background level of [`phantom_discs`].
pub const PHANTOM_BACKGROUND: f64 = 0.0;

/// Grid of discs on a constant background: row `i` uses `radii[i]`, column
/// `j` adds `contrasts[j]` to the background.
///
/// Each disc is centred in its grid cell and must leave at least one
/// background pixel to the cell border, so discs never touch.
pub fn phantom_discs(
    size: usize,
    rows: usize,
    cols: usize,
    contrasts: &[f64],
    radii: &[f64],
) -> Result<Image2D> {
    if size == 0 || rows == 0 || cols == 0 {
        return Err(param("phantom size and grid must be positive"));
    }
    if contrasts.len() != cols || radii.len() != rows {
        return Err(param(format!(
            "expected {cols} contrasts and {rows} radii, got {} and {}",
            contrasts.len(),
            radii.len()
        )));
    }
    let cell_w = size as f64 / cols as f64;
    let cell_h = size as f64 / rows as f64;
    let limit = 0.5 * cell_w.min(cell_h) - 1.0;
    for &r in radii {
        if r.is_nan() || r <= 0.0 {
            return Err(param(format!("disc radius must be positive, got {r}")));
        }
        if r > limit {
            return Err(param(format!(
                "disc radius {r} overlaps neighbours (limit {limit:.2} for a {rows}x{cols} grid on {size} pixels)"
            )));
        }
    }
    let mut img = Image2D::filled(size, size, PHANTOM_BACKGROUND);
    for (i, &r) in radii.iter().enumerate() {
        let cy = (i as f64 + 0.5) * cell_h - 0.5;
        for (j, &c) in contrasts.iter().enumerate() {
            let cx = (j as f64 + 0.5) * cell_w - 0.5;
            let y0 = (cy - r).floor().max(0.0) as usize;
            let y1 = ((cy + r).ceil() as usize).min(size - 1);
            let x0 = (cx - r).floor().max(0.0) as usize;
            let x1 = ((cx + r).ceil() as usize).min(size - 1);
            for y in y0..=y1 {
                for x in x0..=x1 {
                    let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                    if dx * dx + dy * dy <= r * r {
                        img.set(x, y, PHANTOM_BACKGROUND + c);
                    }
                }
            }
        }
    }
    Ok(img)
}

/// Centre pixel of disc `(row, col)` in a phantom built by [`phantom_discs`].
pub fn phantom_center(
    size: usize,
    rows: usize,
    cols: usize,
    row: usize,
    col: usize,
) -> (usize, usize) {
    let cx = (col as f64 + 0.5) * size as f64 / cols as f64 - 0.5;
    let cy = (row as f64 + 0.5) * size as f64 / rows as f64 - 0.5;
    (cx.round() as usize, cy.round() as usize)
}
