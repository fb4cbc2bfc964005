//! Krylov solvers with operation counting.
//!
//! Both solvers stop on the relative 2-norm of the *true* residual
//! `||b - A x|| / ||b||`. The recursively updated residual is only used to
//! decide when to look: the true residual is recomputed every
//! [`SolverOptions::check_interval`] iterations and whenever the recursive
//! one drops below the tolerance. A false alarm replaces the recursive
//! residual (PCG) or restarts the iteration from the true residual
//! (BiCGSTAB).
//!
//! Flops count a multiply-add as two operations: a mat-vec costs `2 nnz`,
//! an inner product or axpy `2 n`, a Jacobi application `n`.

use alloc::vec;
use alloc::vec::Vec;

use crate::sparse::CsrMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OpCounter {
    pub flops: u64,
    /// Mat-vecs performed by the iteration itself.
    pub matvecs: u64,
    /// Inner products performed by the iteration itself.
    pub inner_products: u64,
    /// Norms evaluated only to monitor convergence.
    pub residual_norms: u64,
    /// Mat-vecs spent recomputing the true residual.
    pub residual_matvecs: u64,
}

impl OpCounter {
    fn matvec(&mut self, a: &CsrMatrix, x: &[f64], y: &mut [f64]) {
        a.mul_vec_into(x, y);
        self.flops += 2 * a.nnz() as u64;
        self.matvecs += 1;
    }

    fn dot(&mut self, x: &[f64], y: &[f64]) -> f64 {
        self.flops += 2 * x.len() as u64;
        self.inner_products += 1;
        dot(x, y)
    }

    fn norm(&mut self, x: &[f64]) -> f64 {
        self.flops += 2 * x.len() as u64;
        self.residual_norms += 1;
        libm::sqrt(dot(x, x))
    }

    /// `y += alpha x`
    fn axpy(&mut self, alpha: f64, x: &[f64], y: &mut [f64]) {
        self.flops += 2 * x.len() as u64;
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi += alpha * xi;
        }
    }

    fn true_residual(&mut self, a: &CsrMatrix, b: &[f64], x: &[f64], r: &mut [f64]) {
        a.mul_vec_into(x, r);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
        self.flops += 2 * a.nnz() as u64 + b.len() as u64;
        self.residual_matvecs += 1;
    }

    pub fn merge(&mut self, other: &OpCounter) {
        self.flops += other.flops;
        self.matvecs += other.matvecs;
        self.inner_products += other.inner_products;
        self.residual_norms += other.residual_norms;
        self.residual_matvecs += other.residual_matvecs;
    }
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub(crate) fn norm2(x: &[f64]) -> f64 {
    libm::sqrt(dot(x, x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Preconditioner {
    None,
    #[default]
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative residual target.
    pub tol: f64,
    pub max_iter: usize,
    pub preconditioner: Preconditioner,
    pub check_interval: usize,
}

impl SolverOptions {
    pub fn new(tol: f64, max_iter: usize) -> Self {
        SolverOptions {
            tol,
            max_iter,
            preconditioner: Preconditioner::Jacobi,
            check_interval: 10,
        }
    }

    pub fn with_preconditioner(mut self, p: Preconditioner) -> Self {
        self.preconditioner = p;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Pcg,
    BiCgStab,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Breakdown {
    /// `(r_hat, r)` or `(r_hat, v)` vanished.
    Rho,
    /// Stabilization parameter vanished.
    Omega,
    /// `p^T A p <= 0` in PCG: the matrix is not positive definite.
    Curvature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Breakdown(Breakdown),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub method: Method,
    /// Twice the iteration count; BiCGSTAB can stop after the first half of
    /// an iteration.
    pub half_iterations: usize,
    pub status: SolveStatus,
    /// Recursive relative residual after every (half-)step, starting with
    /// the initial one.
    pub residual_history: Vec<f64>,
    /// True relative residual of the returned iterate.
    pub final_residual: f64,
    pub ops: OpCounter,
    /// Zero unless the `std` feature is enabled.
    pub wall_time_seconds: f64,
}

impl SolveReport {
    pub fn iterations(&self) -> f64 {
        self.half_iterations as f64 / 2.0
    }

    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}

struct Timer {
    #[cfg(feature = "std")]
    start: std::time::Instant,
}

impl Timer {
    fn start() -> Self {
        Timer {
            #[cfg(feature = "std")]
            start: std::time::Instant::now(),
        }
    }

    fn elapsed(&self) -> f64 {
        #[cfg(feature = "std")]
        {
            self.start.elapsed().as_secs_f64()
        }
        #[cfg(not(feature = "std"))]
        {
            0.0
        }
    }
}

fn check_inputs(a: &CsrMatrix, b: &[f64], x0: Option<&[f64]>, opts: &SolverOptions) -> Result<()> {
    if b.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.len(),
        });
    }
    if let Some(x0) = x0 {
        if x0.len() != a.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: x0.len(),
            });
        }
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter("solver tolerance must be positive"));
    }
    if opts.check_interval == 0 {
        return Err(Error::InvalidParameter("check interval must be positive"));
    }
    Ok(())
}

/// Inverse diagonal (ones for [`Preconditioner::None`] or zero pivots).
fn inverse_diagonal(a: &CsrMatrix, p: Preconditioner) -> Option<Vec<f64>> {
    match p {
        Preconditioner::None => None,
        Preconditioner::Jacobi => Some(
            a.diagonal()
                .into_iter()
                .map(|d| if d != 0.0 { 1.0 / d } else { 1.0 })
                .collect(),
        ),
    }
}

fn apply_preconditioner(ops: &mut OpCounter, inv_diag: Option<&[f64]>, r: &[f64], z: &mut [f64]) {
    match inv_diag {
        Some(d) => {
            ops.flops += r.len() as u64;
            for ((zi, ri), di) in z.iter_mut().zip(r).zip(d) {
                *zi = ri * di;
            }
        }
        None => z.copy_from_slice(r),
    }
}

struct Start {
    x: Vec<f64>,
    r: Vec<f64>,
    b_norm: f64,
}

fn start(a: &CsrMatrix, b: &[f64], x0: Option<&[f64]>, ops: &mut OpCounter) -> Start {
    let n = a.dim();
    let (x, r) = match x0 {
        Some(x0) => {
            let mut r = vec![0.0; n];
            ops.true_residual(a, b, x0, &mut r);
            (x0.to_vec(), r)
        }
        None => (vec![0.0; n], b.to_vec()),
    };
    Start {
        x,
        r,
        b_norm: norm2(b),
    }
}

/// Preconditioned conjugate gradients for symmetric positive definite `a`.
pub fn pcg(a: &CsrMatrix, b: &[f64], x0: Option<&[f64]>, opts: &SolverOptions) -> Result<(Vec<f64>, SolveReport)> {
    pcg_observed(a, b, x0, opts, |_| {})
}

/// [`pcg`] calling `observe` with the iterate after every iteration.
pub fn pcg_observed(
    a: &CsrMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    opts: &SolverOptions,
    mut observe: impl FnMut(&[f64]),
) -> Result<(Vec<f64>, SolveReport)> {
    check_inputs(a, b, x0, opts)?;
    let timer = Timer::start();
    let n = a.dim();
    let mut ops = OpCounter::default();
    let Start { mut x, mut r, b_norm } = start(a, b, x0, &mut ops);
    let mut report = SolveReport {
        method: Method::Pcg,
        half_iterations: 0,
        status: SolveStatus::MaxIterations,
        residual_history: Vec::new(),
        final_residual: 0.0,
        ops,
        wall_time_seconds: 0.0,
    };
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        report.status = SolveStatus::Converged;
        report.residual_history.push(0.0);
        return Ok((x, report));
    }

    let inv_diag = inverse_diagonal(a, opts.preconditioner);
    let mut rel = ops.norm(&r) / b_norm;
    report.residual_history.push(rel);
    let mut true_rel = rel;
    let mut scratch = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut q = vec![0.0; n];

    let mut status = if rel <= opts.tol {
        SolveStatus::Converged
    } else {
        SolveStatus::MaxIterations
    };
    let mut iterations = 0;
    if status != SolveStatus::Converged {
        apply_preconditioner(&mut ops, inv_diag.as_deref(), &r, &mut z);
        let mut p = z.clone();
        let mut rz = ops.dot(&r, &z);
        for k in 1..=opts.max_iter {
            iterations = k;
            ops.matvec(a, &p, &mut q);
            let pq = ops.dot(&p, &q);
            if !(pq > 0.0) {
                status = SolveStatus::Breakdown(Breakdown::Curvature);
                break;
            }
            let alpha = rz / pq;
            ops.axpy(alpha, &p, &mut x);
            ops.axpy(-alpha, &q, &mut r);
            observe(&x);
            rel = ops.norm(&r) / b_norm;
            report.residual_history.push(rel);
            if rel <= opts.tol || k % opts.check_interval == 0 {
                ops.true_residual(a, b, &x, &mut scratch);
                true_rel = ops.norm(&scratch) / b_norm;
                if true_rel <= opts.tol {
                    status = SolveStatus::Converged;
                    break;
                }
                if rel <= opts.tol {
                    r.copy_from_slice(&scratch);
                }
            }
            apply_preconditioner(&mut ops, inv_diag.as_deref(), &r, &mut z);
            let rz_new = ops.dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            ops.flops += 2 * n as u64;
            for (pi, zi) in p.iter_mut().zip(&z) {
                *pi = zi + beta * *pi;
            }
        }
    }
    if status != SolveStatus::Converged {
        ops.true_residual(a, b, &x, &mut scratch);
        true_rel = ops.norm(&scratch) / b_norm;
    }
    report.half_iterations = 2 * iterations;
    report.status = status;
    report.final_residual = true_rel;
    report.ops = ops;
    report.wall_time_seconds = timer.elapsed();
    Ok((x, report))
}

/// Right-preconditioned BiCGSTAB: two mat-vecs and four inner products per
/// full iteration. Convergence after the first half of an iteration counts
/// as half an iteration.
pub fn bicgstab(
    a: &CsrMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    opts: &SolverOptions,
) -> Result<(Vec<f64>, SolveReport)> {
    check_inputs(a, b, x0, opts)?;
    let timer = Timer::start();
    let n = a.dim();
    let mut ops = OpCounter::default();
    let Start { mut x, mut r, b_norm } = start(a, b, x0, &mut ops);
    let mut report = SolveReport {
        method: Method::BiCgStab,
        half_iterations: 0,
        status: SolveStatus::MaxIterations,
        residual_history: Vec::new(),
        final_residual: 0.0,
        ops,
        wall_time_seconds: 0.0,
    };
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        report.status = SolveStatus::Converged;
        report.residual_history.push(0.0);
        return Ok((x, report));
    }

    let inv_diag = inverse_diagonal(a, opts.preconditioner);
    let mut rel = ops.norm(&r) / b_norm;
    report.residual_history.push(rel);
    let mut true_rel = rel;
    let mut status = if rel <= opts.tol {
        SolveStatus::Converged
    } else {
        SolveStatus::MaxIterations
    };

    let mut r_hat = r.clone();
    let mut r_hat_norm = rel * b_norm;
    let mut p = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut p_hat = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut s_hat = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    let (mut rho_prev, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut fresh = true;
    let mut half = 0;

    // Relative size below which (r_hat, r) counts as a breakdown.
    const RHO_FLOOR: f64 = 1e-30;

    let mut k = 0;
    while status != SolveStatus::Converged && k < opts.max_iter {
        k += 1;
        let rho = ops.dot(&r_hat, &r);
        if rho.abs() <= RHO_FLOOR * r_hat_norm * rel * b_norm {
            status = SolveStatus::Breakdown(Breakdown::Rho);
            break;
        }
        if fresh {
            p.copy_from_slice(&r);
            fresh = false;
        } else {
            let beta = (rho / rho_prev) * (alpha / omega);
            ops.flops += 4 * n as u64;
            for ((pi, ri), vi) in p.iter_mut().zip(&r).zip(&v) {
                *pi = ri + beta * (*pi - omega * vi);
            }
        }
        apply_preconditioner(&mut ops, inv_diag.as_deref(), &p, &mut p_hat);
        ops.matvec(a, &p_hat, &mut v);
        let r_hat_v = ops.dot(&r_hat, &v);
        if r_hat_v == 0.0 {
            status = SolveStatus::Breakdown(Breakdown::Rho);
            break;
        }
        alpha = rho / r_hat_v;
        s.copy_from_slice(&r);
        ops.axpy(-alpha, &v, &mut s);

        let s_rel = ops.norm(&s) / b_norm;
        report.residual_history.push(s_rel);
        half = 2 * k - 1;
        if s_rel <= opts.tol {
            ops.axpy(alpha, &p_hat, &mut x);
            ops.true_residual(a, b, &x, &mut scratch);
            true_rel = ops.norm(&scratch) / b_norm;
            if true_rel <= opts.tol {
                status = SolveStatus::Converged;
                break;
            }
            // false convergence: restart from the true residual
            r.copy_from_slice(&scratch);
            r_hat.copy_from_slice(&r);
            r_hat_norm = true_rel * b_norm;
            rel = true_rel;
            fresh = true;
            rho_prev = 1.0;
            continue;
        }

        apply_preconditioner(&mut ops, inv_diag.as_deref(), &s, &mut s_hat);
        ops.matvec(a, &s_hat, &mut t);
        let ts = ops.dot(&t, &s);
        let tt = ops.dot(&t, &t);
        if tt == 0.0 {
            status = SolveStatus::Breakdown(Breakdown::Omega);
            break;
        }
        omega = ts / tt;
        ops.axpy(alpha, &p_hat, &mut x);
        ops.axpy(omega, &s_hat, &mut x);
        r.copy_from_slice(&s);
        ops.axpy(-omega, &t, &mut r);
        half = 2 * k;
        rel = ops.norm(&r) / b_norm;
        report.residual_history.push(rel);
        if rel <= opts.tol || k % opts.check_interval == 0 {
            ops.true_residual(a, b, &x, &mut scratch);
            true_rel = ops.norm(&scratch) / b_norm;
            if true_rel <= opts.tol {
                status = SolveStatus::Converged;
                break;
            }
            if rel <= opts.tol {
                r.copy_from_slice(&scratch);
                r_hat.copy_from_slice(&r);
                r_hat_norm = true_rel * b_norm;
                rel = true_rel;
                fresh = true;
                rho_prev = 1.0;
                continue;
            }
        }
        if omega == 0.0 || !omega.is_finite() {
            status = SolveStatus::Breakdown(Breakdown::Omega);
            break;
        }
        rho_prev = rho;
    }
    if status != SolveStatus::Converged {
        ops.true_residual(a, b, &x, &mut scratch);
        true_rel = ops.norm(&scratch) / b_norm;
    }
    report.half_iterations = half;
    report.status = status;
    report.final_residual = true_rel;
    report.ops = ops;
    report.wall_time_seconds = timer.elapsed();
    Ok((x, report))
}
