//! One function per subcommand. Each writes its files under the configured
//! output directory and returns the text meant for standard output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use argyris_core::analysis::{compute_errors, contours, ErrorReport};
use argyris_core::manufactured::Forcing;
use argyris_core::mesh::{build_uniform_mesh, constrained_dofs, enumerate_dofs, OrderingScheme};
use argyris_core::picard::{picard, solve_biharmonic, Discretization, PicardTrace};
use argyris_core::solvers::SolveReport;
use argyris_core::sparse::bandwidth_stats;

use crate::config::RunConfig;
use crate::formats::{self, write_file};
use crate::tables::{self, Cell, Problem};
use crate::{io_err, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    /// False when a solve did not converge; files are written regardless.
    pub success: bool,
    pub files: Vec<PathBuf>,
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl<'a> Writer<'a> {
    fn new(dir: &'a Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        Ok(Writer { dir, files: Vec::new() })
    }

    fn put(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        write_file(&path, contents)?;
        self.files.push(path);
        Ok(())
    }
}

pub struct BiharmonicRun {
    pub disc: Discretization,
    pub full: Vec<f64>,
    pub report: SolveReport,
    pub errors: ErrorReport,
}

pub struct NseRun {
    pub disc: Discretization,
    pub full: Vec<f64>,
    pub trace: PicardTrace,
    pub errors: ErrorReport,
}

/// Biharmonic solve with the Stokes part of the manufactured force, whose
/// exact solution is the manufactured stream function.
pub fn run_biharmonic(c: &RunConfig) -> Result<BiharmonicRun> {
    c.validate()?;
    let mesh = build_uniform_mesh(c.n)?;
    let m = c.manufactured();
    let pc = c.picard();
    let disc = Discretization::new(&mesh, &pc, &Forcing::Stokes(m))?;
    let (full, report) = solve_biharmonic(&disc, &pc)?;
    let errors = compute_errors(&disc.space, &full, |p| m.stream_function(p))?;
    Ok(BiharmonicRun {
        disc,
        full,
        report,
        errors,
    })
}

/// Picard iteration for the full manufactured force.
pub fn run_nse(c: &RunConfig) -> Result<NseRun> {
    c.validate()?;
    let mesh = build_uniform_mesh(c.n)?;
    let m = c.manufactured();
    let pc = c.picard();
    let disc = Discretization::new(&mesh, &pc, &Forcing::NavierStokes(m))?;
    let (full, trace) = picard(&disc, &pc)?;
    let errors = compute_errors(&disc.space, &full, |p| m.stream_function(p))?;
    Ok(NseRun {
        disc,
        full,
        trace,
        errors,
    })
}

fn config_text(c: &RunConfig) -> String {
    format!(
        "n = {}\nre = {:e}\ntol = {:e}\nmax_outer = {}\nnqp = {}\nordering = {}\nminimal_bc = {}\nflip_sign_convention = {}\n",
        c.n, c.reynolds, c.tol, c.max_outer, c.nqp, c.ordering, c.minimal_bc, c.flip_sign_convention
    )
}

fn suffix(c: &RunConfig) -> String {
    let mut s = String::new();
    if c.minimal_bc {
        s.push_str("_minbc");
    }
    if c.flip_sign_convention {
        s.push_str("_flip");
    }
    s
}

pub fn mesh_info(c: &RunConfig) -> Result<Outcome> {
    c.validate()?;
    let mesh = build_uniform_mesh(c.n)?;
    let map = enumerate_dofs(&mesh, c.scheme(), c.clamp());
    let constrained = constrained_dofs(&map).len();
    let stdout = format!(
        "vertices = {}\ntriangles = {}\nedges = {}\ndofs = {}\nconstrained = {}\nfree = {}\n",
        mesh.vertex_count(),
        mesh.triangle_count(),
        mesh.edge_count(),
        map.total_dofs(),
        constrained,
        map.total_dofs() - constrained
    );
    let stem = format!("mesh_n{}_o{}{}", c.n, c.ordering, suffix(c));
    let mut w = Writer::new(&c.out_dir)?;
    w.put(&format!("{stem}_summary.txt"), &stdout)?;
    w.put(&format!("{stem}_vertices.csv"), &formats::mesh_vertices_csv(&mesh))?;
    w.put(&format!("{stem}_triangles.csv"), &formats::mesh_triangles_csv(&mesh))?;
    w.put(&format!("{stem}_dofs.csv"), &formats::dofmap_csv(&map))?;
    Ok(Outcome {
        stdout,
        success: true,
        files: w.files,
    })
}

pub fn solve_biharmonic_cmd(c: &RunConfig) -> Result<Outcome> {
    let run = run_biharmonic(c)?;
    let stem = c.stem("biharmonic");
    let mut w = Writer::new(&c.out_dir)?;
    let report = format!(
        "{}{}{}",
        config_text(c),
        formats::solve_report_text(&run.report),
        formats::error_report_text(&run.errors)
    );
    w.put(&format!("{stem}_report.txt"), &report)?;
    w.put(&format!("{stem}_solution.csv"), &formats::vector_csv("psi", &run.full))?;
    w.put(&format!("{stem}_load.csv"), &formats::vector_csv("load", &run.disc.load))?;
    w.put(&format!("{stem}_residuals.csv"), &formats::residual_history_csv(&run.report))?;
    w.put(
        &format!("{stem}_timing.txt"),
        &formats::timing_text(&[("pcg_seconds", run.report.wall_time_seconds)]),
    )?;
    let stdout = format!(
        "status = {}\npcg_iterations = {}\nnodal_max = {}\nl2 = {}\nh1_semi = {}\nh2_semi = {}\n",
        formats::status_name(run.report.status),
        run.report.iterations(),
        formats::sig6(run.errors.nodal_max),
        formats::sig6(run.errors.l2),
        formats::sig6(run.errors.h1_semi),
        formats::sig6(run.errors.h2_semi)
    );
    Ok(Outcome {
        stdout,
        success: run.report.converged(),
        files: w.files,
    })
}

fn trace_summary(trace: &PicardTrace) -> String {
    let ops = trace.total_ops();
    format!(
        "picard_status = {:?}\nouter_iterations = {}\nseed_pcg_iterations = {}\nbicgstab_iterations_total = {}\nbicgstab_iterations_mean = {}\nflops = {}\nmatvecs = {}\ninner_products = {}\n",
        trace.status,
        trace.records.len(),
        trace.seed.iterations(),
        trace.total_inner_iterations(),
        trace.mean_inner_iterations(),
        ops.flops,
        ops.matvecs,
        ops.inner_products
    )
}

fn trace_timing(trace: &PicardTrace) -> String {
    let inner: f64 = trace.records.iter().map(|r| r.solve.wall_time_seconds).sum();
    formats::timing_text(&[("seed_seconds", trace.seed.wall_time_seconds), ("inner_seconds", inner)])
}

pub fn solve_nse_cmd(c: &RunConfig) -> Result<Outcome> {
    let run = run_nse(c)?;
    let stem = c.stem("nse");
    let mut w = Writer::new(&c.out_dir)?;
    let report = format!(
        "{}{}{}",
        config_text(c),
        trace_summary(&run.trace),
        formats::error_report_text(&run.errors)
    );
    w.put(&format!("{stem}_report.txt"), &report)?;
    w.put(&format!("{stem}_trace.csv"), &formats::trace_csv(&run.trace))?;
    w.put(&format!("{stem}_solution.csv"), &formats::vector_csv("psi", &run.full))?;
    w.put(&format!("{stem}_timing.txt"), &trace_timing(&run.trace))?;
    let stdout = format!(
        "status = {:?}\nouter_iterations = {}\nbicgstab_iterations_total = {}\nl2 = {}\nh1_semi = {}\nh2_semi = {}\nnodal_max = {}\n",
        run.trace.status,
        run.trace.records.len(),
        run.trace.total_inner_iterations(),
        formats::sig6(run.errors.l2),
        formats::sig6(run.errors.h1_semi),
        formats::sig6(run.errors.h2_semi),
        formats::sig6(run.errors.nodal_max)
    );
    Ok(Outcome {
        stdout,
        success: run.trace.converged(),
        files: w.files,
    })
}

/// Linearized solve under each of the three orderings.
pub fn compare_orderings(c: &RunConfig) -> Result<Outcome> {
    c.validate()?;
    let cells: Vec<Cell> = OrderingScheme::ALL
        .iter()
        .map(|o| Cell {
            problem: Problem::LinearizedNse,
            config: RunConfig {
                ordering: o.number(),
                ..c.clone()
            },
        })
        .collect();
    let rows = tables::run_tables(&cells, 1);
    let stem = format!("orderings_n{}_q{}{}", c.n, c.nqp, suffix(c));
    let text = tables::render_text(Problem::LinearizedNse, &rows);
    let mut w = Writer::new(&c.out_dir)?;
    w.put(&format!("{stem}.txt"), &text)?;
    w.put(&format!("{stem}.csv"), &tables::render_csv(&rows))?;
    w.put(&format!("{stem}_timing.csv"), &tables::timing_csv(&rows))?;
    Ok(Outcome {
        stdout: text,
        success: rows.iter().all(|r| r.converged),
        files: w.files,
    })
}

/// Sparsity pattern of the reduced biharmonic matrix.
pub fn export_sparsity(c: &RunConfig) -> Result<Outcome> {
    c.validate()?;
    let mesh = build_uniform_mesh(c.n)?;
    let disc = Discretization::new(&mesh, &c.picard(), &Forcing::Zero)?;
    let a = &disc.stiffness;
    let stats = bandwidth_stats(a);
    let stem = c.stem("sparsity");
    let title = format!("ordering {} n {}", c.ordering, c.n);
    let mut w = Writer::new(&c.out_dir)?;
    w.put(&format!("{stem}.pbm"), &formats::sparsity_pbm(a))?;
    w.put(&format!("{stem}.svg"), &formats::sparsity_svg(a, &title))?;
    w.put(&format!("{stem}.mtx"), &formats::matrix_market_string(a))?;
    let stdout = format!(
        "dim = {}\nnnz = {}\nbandwidth = {}\nprofile = {}\n",
        a.dim(),
        stats.nnz,
        stats.bandwidth,
        stats.profile
    );
    Ok(Outcome {
        stdout,
        success: true,
        files: w.files,
    })
}

/// Iso-lines of the linearized solution on a `grid x grid` sample.
pub fn export_contours(c: &RunConfig, levels: Option<&[f64]>) -> Result<Outcome> {
    let run = run_nse(c)?;
    let set = contours(&run.disc.space, &run.full, c.grid, levels)?;
    let stem = c.stem("contours");
    let title = format!("stream function, h = 1/{}, Re = {}", c.n, c.reynolds);
    let mut w = Writer::new(&c.out_dir)?;
    w.put(&format!("{stem}.svg"), &formats::contours_svg(&set, &title))?;
    w.put(&format!("{stem}_grid.csv"), &formats::grid_csv(&set))?;
    w.put(&format!("{stem}_lines.csv"), &formats::contour_csv(&set))?;
    let mut stdout = format!("picard_status = {:?}\n", run.trace.status);
    for (level, lines) in set.levels.iter().zip(&set.polylines) {
        let closed = lines.iter().filter(|l| l.closed).count();
        let _ = writeln!(stdout, "level {} : {} polylines, {} closed", formats::sig6(*level), lines.len(), closed);
    }
    Ok(Outcome {
        stdout,
        success: run.trace.converged(),
        files: w.files,
    })
}

/// Biharmonic rows for every supported quadrature and linearized rows for
/// the configured one, over the given mesh sizes.
pub fn convergence_table(c: &RunConfig, sizes: &[usize], jobs: usize) -> Result<Outcome> {
    c.validate()?;
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(crate::FemError::Config("sizes must be positive".into()));
    }
    let mut bih = Vec::new();
    for &nqp in &crate::config::ALLOWED_NQP {
        for &n in sizes {
            bih.push(Cell {
                problem: Problem::Biharmonic,
                config: RunConfig { n, nqp, ..c.clone() },
            });
        }
    }
    let nse: Vec<Cell> = sizes
        .iter()
        .map(|&n| Cell {
            problem: Problem::LinearizedNse,
            config: RunConfig { n, ..c.clone() },
        })
        .collect();
    let all: Vec<Cell> = bih.iter().chain(&nse).cloned().collect();
    let rows = tables::run_tables(&all, jobs);
    let (bih_rows, nse_rows) = rows.split_at(bih.len());

    let stem = format!("convergence{}", suffix(c));
    let bih_text = tables::render_text(Problem::Biharmonic, bih_rows);
    let nse_text = tables::render_text(Problem::LinearizedNse, nse_rows);
    let mut w = Writer::new(&c.out_dir)?;
    w.put(&format!("{stem}_biharmonic.txt"), &bih_text)?;
    w.put(&format!("{stem}_biharmonic.csv"), &tables::render_csv(bih_rows))?;
    w.put(&format!("{stem}_nse.txt"), &nse_text)?;
    w.put(&format!("{stem}_nse.csv"), &tables::render_csv(nse_rows))?;
    w.put(&format!("{stem}_timing.csv"), &tables::timing_csv(&rows))?;
    Ok(Outcome {
        stdout: format!("biharmonic\n{bih_text}\nlinearized\n{nse_text}"),
        success: rows.iter().all(|r| r.converged),
        files: w.files,
    })
}
