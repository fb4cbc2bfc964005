//! Batch runs over (mesh size, quadrature, ordering) cells, rendered as
//! fixed-width text (six significant digits) and full-precision CSV.
//! Timings go to their own CSV so the other outputs stay reproducible.

use std::fmt::Write as _;
use std::time::Instant;

use argyris_core::analysis::ErrorReport;
use argyris_core::sparse::bandwidth_stats;

use crate::commands::{run_biharmonic, run_nse};
use crate::config::RunConfig;
use crate::formats::{sig6, status_name};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Biharmonic,
    LinearizedNse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub problem: Problem,
    pub config: RunConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub problem: Problem,
    pub n: usize,
    pub nqp: usize,
    pub ordering: usize,
    /// `converged`, a solver status, or an error message.
    pub status: String,
    pub converged: bool,
    /// PCG iterations, or the BiCGSTAB total over all outer steps.
    pub iterations: f64,
    pub outer_iterations: usize,
    pub nco: u64,
    pub bandwidth: usize,
    pub profile: usize,
    pub errors: Option<ErrorReport>,
    pub seconds: f64,
}

pub fn run_cell(cell: &Cell) -> Row {
    let c = &cell.config;
    let start = Instant::now();
    let mut row = Row {
        problem: cell.problem,
        n: c.n,
        nqp: c.nqp,
        ordering: c.ordering,
        status: String::new(),
        converged: false,
        iterations: 0.0,
        outer_iterations: 0,
        nco: 0,
        bandwidth: 0,
        profile: 0,
        errors: None,
        seconds: 0.0,
    };
    let outcome = match cell.problem {
        Problem::Biharmonic => run_biharmonic(c).map(|r| {
            let b = bandwidth_stats(&r.disc.stiffness);
            row.status = status_name(r.report.status);
            row.converged = r.report.converged();
            row.iterations = r.report.iterations();
            row.nco = r.report.ops.flops;
            row.bandwidth = b.bandwidth;
            row.profile = b.profile;
            row.errors = Some(r.errors);
        }),
        Problem::LinearizedNse => run_nse(c).map(|r| {
            let b = bandwidth_stats(&r.disc.stiffness);
            row.status = format!("{:?}", r.trace.status).to_ascii_lowercase();
            row.converged = r.trace.converged();
            row.iterations = r.trace.total_inner_iterations();
            row.outer_iterations = r.trace.records.len();
            row.nco = r.trace.total_ops().flops;
            row.bandwidth = b.bandwidth;
            row.profile = b.profile;
            row.errors = Some(r.errors);
        }),
    };
    if let Err(e) = outcome {
        row.status = format!("error: {e}");
        row.converged = false;
    }
    row.seconds = start.elapsed().as_secs_f64();
    row
}

/// Runs every cell, at most `jobs` at a time; rows come back in input order.
pub fn run_tables(cells: &[Cell], jobs: usize) -> Vec<Row> {
    let jobs = jobs.max(1);
    let mut rows: Vec<Option<Row>> = vec![None; cells.len()];
    for (chunk_cells, chunk_rows) in cells.chunks(jobs).zip(rows.chunks_mut(jobs)) {
        std::thread::scope(|s| {
            for (cell, slot) in chunk_cells.iter().zip(chunk_rows.iter_mut()) {
                s.spawn(move || *slot = Some(run_cell(cell)));
            }
        });
    }
    rows.into_iter().map(|r| r.expect("every cell ran")).collect()
}

fn h_label(n: usize) -> String {
    format!("1/{n}")
}

fn err_field(e: Option<&ErrorReport>, f: impl Fn(&ErrorReport) -> f64) -> String {
    e.map(|e| sig6(f(e))).unwrap_or_else(|| "-".into())
}

/// Text table in the layout of the corresponding experiment.
pub fn render_text(problem: Problem, rows: &[Row]) -> String {
    let mut s = String::new();
    match problem {
        Problem::Biharmonic => {
            let _ = writeln!(
                s,
                "{:>6} {:>5} {:>12} {:>12} {:>12} {:>9} status",
                "h", "nqp", "n.c.o.", "nodal_err", "l2_err", "pcg_itr"
            );
            for r in rows {
                let _ = writeln!(
                    s,
                    "{:>6} {:>5} {:>12} {:>12} {:>12} {:>9} {}",
                    h_label(r.n),
                    r.nqp,
                    r.nco,
                    err_field(r.errors.as_ref(), |e| e.nodal_max),
                    err_field(r.errors.as_ref(), |e| e.l2),
                    r.iterations,
                    r.status
                );
            }
        }
        Problem::LinearizedNse => {
            let _ = writeln!(
                s,
                "{:>6} {:>5} {:>3} {:>12} {:>12} {:>12} {:>12} {:>9} {:>5} {:>5} {:>7} status",
                "h", "nqp", "ord", "n.c.o.", "l2_err", "h1_err", "h2_err", "bicg_itr", "outer", "bw", "profile"
            );
            for r in rows {
                let _ = writeln!(
                    s,
                    "{:>6} {:>5} {:>3} {:>12} {:>12} {:>12} {:>12} {:>9} {:>5} {:>5} {:>7} {}",
                    h_label(r.n),
                    r.nqp,
                    r.ordering,
                    r.nco,
                    err_field(r.errors.as_ref(), |e| e.l2),
                    err_field(r.errors.as_ref(), |e| e.h1_semi),
                    err_field(r.errors.as_ref(), |e| e.h2_semi),
                    r.iterations,
                    r.outer_iterations,
                    r.bandwidth,
                    r.profile,
                    r.status
                );
            }
        }
    }
    s
}

/// Full-precision CSV without timings.
pub fn render_csv(rows: &[Row]) -> String {
    let mut s = String::from(
        "problem,n,h,nqp,ordering,status,converged,iterations,outer_iterations,nco,bandwidth,profile,l2,h1_semi,h2_semi,nodal_max\n",
    );
    for r in rows {
        let e = |f: fn(&ErrorReport) -> f64| r.errors.as_ref().map(|e| format!("{:e}", f(e))).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{:e},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            match r.problem {
                Problem::Biharmonic => "biharmonic",
                Problem::LinearizedNse => "nse",
            },
            r.n,
            1.0 / r.n as f64,
            r.nqp,
            r.ordering,
            r.status.replace(',', ";"),
            r.converged as u8,
            r.iterations,
            r.outer_iterations,
            r.nco,
            r.bandwidth,
            r.profile,
            e(|e| e.l2),
            e(|e| e.h1_semi),
            e(|e| e.h2_semi),
            e(|e| e.nodal_max)
        );
    }
    s
}

pub fn timing_csv(rows: &[Row]) -> String {
    let mut s = String::from("problem,n,nqp,ordering,seconds\n");
    for r in rows {
        let _ = writeln!(s, "{:?},{},{},{},{:e}", r.problem, r.n, r.nqp, r.ordering, r.seconds);
    }
    s
}
