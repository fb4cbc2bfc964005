//! Fixed-point (Picard) iteration for the linearized stream-function
//! problem, seeded by a biharmonic solve.
//!
//! Each outer step freezes the convecting field at the previous iterate and
//! solves `(A + B(psi_{i-1})) psi_i = l` with BiCGSTAB, warm-started from
//! `psi_{i-1}`. The run stops once both the update `||psi_i - psi_{i-1}||`
//! (2-norm over free coefficients) and the relative nonlinear residual
//! `||(A + B(psi_i)) psi_i - l|| / ||l||` are below the tolerance.

use alloc::vec::Vec;

use crate::assembly::{assemble_biharmonic, assemble_convection, assemble_load, ArgyrisSpace};
use crate::manufactured::Forcing;
use crate::mesh::{BoundaryClamp, Mesh, OrderingScheme};
use crate::quadrature::{rule, QuadratureRule};
use crate::solvers::{bicgstab, norm2, pcg, OpCounter, Preconditioner, SolveReport, SolveStatus, SolverOptions};
use crate::sparse::CsrMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardConfig {
    pub reynolds: f64,
    /// Outer tolerance on the update and the nonlinear residual.
    pub tol: f64,
    pub max_outer: usize,
    pub quadrature_points: usize,
    pub ordering: OrderingScheme,
    pub clamp: BoundaryClamp,
    /// Relative residual target of every linear solve.
    pub linear_tol: f64,
    pub max_linear_iter: usize,
    pub preconditioner: Preconditioner,
    /// When false the convection form is dropped (`B = 0`).
    pub convection: bool,
}

impl Default for PicardConfig {
    fn default() -> Self {
        PicardConfig {
            reynolds: 1.0,
            tol: 1e-5,
            max_outer: 20,
            quadrature_points: 6,
            ordering: OrderingScheme::VertexBlock,
            clamp: BoundaryClamp::AllVertexDofs,
            linear_tol: 1e-5,
            max_linear_iter: 20_000,
            preconditioner: Preconditioner::Jacobi,
            convection: true,
        }
    }
}

impl PicardConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.reynolds > 0.0) {
            return Err(Error::InvalidParameter("Reynolds number must be positive"));
        }
        if !(self.tol > 0.0) || !(self.linear_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive"));
        }
        if self.max_outer == 0 || self.max_linear_iter == 0 {
            return Err(Error::InvalidParameter("iteration limits must be positive"));
        }
        Ok(())
    }

    fn solver_options(&self) -> SolverOptions {
        SolverOptions::new(self.linear_tol, self.max_linear_iter).with_preconditioner(self.preconditioner)
    }
}

/// Assembled biharmonic system of one configuration.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub space: ArgyrisSpace,
    pub rule: QuadratureRule,
    pub stiffness: CsrMatrix,
    pub load: Vec<f64>,
}

impl Discretization {
    pub fn new(mesh: &Mesh, config: &PicardConfig, forcing: &Forcing) -> Result<Self> {
        config.validate()?;
        let space = ArgyrisSpace::new(mesh, config.ordering, config.clamp)?;
        let rule = rule(config.quadrature_points)?;
        let stiffness = assemble_biharmonic(&space, &rule, config.reynolds)?.matrix;
        let load = assemble_load(&space, &rule, |p| forcing.eval(p));
        Ok(Discretization {
            space,
            rule,
            stiffness,
            load,
        })
    }
}

/// Solves `A psi = l` with PCG from a zero initial guess. Returns the full
/// coefficient vector (clamped entries zero); a solve that does not
/// converge is reported through [`SolveReport::status`].
pub fn solve_biharmonic_problem(mesh: &Mesh, config: &PicardConfig, forcing: &Forcing) -> Result<(Vec<f64>, SolveReport)> {
    let disc = Discretization::new(mesh, config, forcing)?;
    solve_biharmonic(&disc, config)
}

pub fn solve_biharmonic(disc: &Discretization, config: &PicardConfig) -> Result<(Vec<f64>, SolveReport)> {
    let (x, report) = pcg(&disc.stiffness, &disc.load, None, &config.solver_options())?;
    Ok((disc.space.extend(&x)?, report))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OuterRecord {
    pub iteration: usize,
    pub update_norm: f64,
    pub residual: f64,
    pub solve: SolveReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PicardStatus {
    Converged,
    MaxOuterIterations,
    /// The seeding biharmonic solve did not converge.
    SeedFailed,
    /// An inner BiCGSTAB solve broke down or hit its iteration limit.
    InnerSolveFailed { outer_iteration: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardTrace {
    pub seed: SolveReport,
    pub records: Vec<OuterRecord>,
    pub status: PicardStatus,
}

impl PicardTrace {
    pub fn converged(&self) -> bool {
        self.status == PicardStatus::Converged
    }

    /// Sum of inner BiCGSTAB iterations over all outer steps.
    pub fn total_inner_iterations(&self) -> f64 {
        self.records.iter().map(|r| r.solve.iterations()).sum()
    }

    pub fn mean_inner_iterations(&self) -> f64 {
        if self.records.is_empty() {
            0.0
        } else {
            self.total_inner_iterations() / self.records.len() as f64
        }
    }

    /// Operation counts of the inner BiCGSTAB solves.
    pub fn inner_ops(&self) -> OpCounter {
        let mut ops = OpCounter::default();
        for r in &self.records {
            ops.merge(&r.solve.ops);
        }
        ops
    }

    /// Operation counts including the seeding PCG solve.
    pub fn total_ops(&self) -> OpCounter {
        let mut ops = self.inner_ops();
        ops.merge(&self.seed.ops);
        ops
    }
}

/// Runs the Picard iteration on a fresh discretization.
pub fn solve_linearized_nse(mesh: &Mesh, config: &PicardConfig, forcing: &Forcing) -> Result<(Vec<f64>, PicardTrace)> {
    let disc = Discretization::new(mesh, config, forcing)?;
    picard(&disc, config)
}

pub fn picard(disc: &Discretization, config: &PicardConfig) -> Result<(Vec<f64>, PicardTrace)> {
    config.validate()?;
    let space = &disc.space;
    let opts = config.solver_options();
    let (seed_full, seed) = solve_biharmonic(disc, config)?;
    let mut trace = PicardTrace {
        seed,
        records: Vec::new(),
        status: PicardStatus::MaxOuterIterations,
    };
    if !trace.seed.converged() {
        trace.status = PicardStatus::SeedFailed;
        return Ok((seed_full, trace));
    }

    let load_norm = norm2(&disc.load);
    let relative = |r: f64| if load_norm > 0.0 { r / load_norm } else { r };
    let system = |full: &[f64]| -> Result<CsrMatrix> {
        if config.convection {
            disc.stiffness.add(&assemble_convection(space, &disc.rule, full)?.matrix)
        } else {
            Ok(disc.stiffness.clone())
        }
    };

    let mut prev = space.restrict(&seed_full)?;
    let mut matrix = system(&seed_full)?;
    for i in 1..=config.max_outer {
        let (next, solve) = bicgstab(&matrix, &disc.load, Some(&prev), &opts)?;
        let failed = solve.status != SolveStatus::Converged;
        let update_norm = norm2(&next.iter().zip(&prev).map(|(a, b)| a - b).collect::<Vec<_>>());
        let next_full = space.extend(&next)?;
        matrix = system(&next_full)?;
        let mut r = matrix.mul_vec(&next)?;
        for (ri, li) in r.iter_mut().zip(&disc.load) {
            *ri -= li;
        }
        let residual = relative(norm2(&r));
        trace.records.push(OuterRecord {
            iteration: i,
            update_norm,
            residual,
            solve,
        });
        prev = next;
        if failed {
            trace.status = PicardStatus::InnerSolveFailed { outer_iteration: i };
            break;
        }
        if update_norm <= config.tol && residual <= config.tol {
            trace.status = PicardStatus::Converged;
            break;
        }
    }
    Ok((space.extend(&prev)?, trace))
}

/// Relative residual `||(A + B(psi)) psi - l|| / ||l||` of a full
/// coefficient vector.
pub fn nonlinear_residual(disc: &Discretization, full: &[f64]) -> Result<f64> {
    let psi = disc.space.restrict(full)?;
    let b = assemble_convection(&disc.space, &disc.rule, full)?.matrix;
    let mut r = disc.stiffness.add(&b)?.mul_vec(&psi)?;
    for (ri, li) in r.iter_mut().zip(&disc.load) {
        *ri -= li;
    }
    let ln = norm2(&disc.load);
    Ok(if ln > 0.0 { norm2(&r) / ln } else { norm2(&r) })
}
