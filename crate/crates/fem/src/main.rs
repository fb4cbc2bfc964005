use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use argyris_fem::commands::{self, Outcome};
use argyris_fem::config::{Overrides, RunConfig};
use argyris_fem::FemError;

/// Argyris finite elements for the biharmonic and linearized stream-function
/// Navier-Stokes problems on the unit square.
#[derive(Parser, Debug)]
#[command(name = "argyris-fem", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print mesh and DOF counts; write mesh and DOF tables.
    MeshInfo(Common),
    /// Solve the biharmonic problem with PCG.
    SolveBiharmonic(Common),
    /// Solve the linearized problem by Picard iteration.
    SolveNse(Common),
    /// Run the linearized solve under all three DOF orderings.
    CompareOrderings(Common),
    /// Write the sparsity pattern of the biharmonic matrix (PBM, SVG, Matrix Market).
    ExportSparsity(Common),
    /// Write iso-lines of the linearized solution (SVG, CSV).
    ExportContours {
        #[command(flatten)]
        common: Common,
        /// Comma-separated iso-levels; eight levels up to the extreme by default.
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<f64>>,
    },
    /// Error and iteration tables over several mesh sizes.
    ConvergenceTable {
        #[command(flatten)]
        common: Common,
        /// Comma-separated subdivision counts.
        #[arg(long, value_delimiter = ',', default_value = "3,5,9")]
        sizes: Vec<usize>,
        /// Cells solved concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Subdivisions per side (h = 1/n).
    #[arg(long)]
    n: Option<usize>,
    /// Reynolds number.
    #[arg(long)]
    re: Option<f64>,
    /// Outer and linear solver tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Quadrature points per triangle: 4, 6 or 25.
    #[arg(long)]
    nqp: Option<usize>,
    /// DOF ordering scheme: 1, 2 or 3.
    #[arg(long)]
    ordering: Option<usize>,
    #[arg(long)]
    max_outer: Option<usize>,
    /// Contour grid samples per side.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// key = value file applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Clamp only the DOFs forced by the boundary conditions.
    #[arg(long)]
    minimal_bc: bool,
    /// Use u = (-psi_y, psi_x) for the manufactured velocity.
    #[arg(long)]
    flip_sign_convention: bool,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, FemError> {
        let flags = Overrides {
            n: self.n,
            reynolds: self.re,
            tol: self.tol,
            max_outer: self.max_outer,
            nqp: self.nqp,
            ordering: self.ordering,
            out_dir: self.out_dir.clone(),
            minimal_bc: self.minimal_bc.then_some(true),
            flip_sign_convention: self.flip_sign_convention.then_some(true),
            grid: self.grid,
            max_linear_iter: None,
        };
        RunConfig::resolve(self.config.as_deref(), &flags)
    }
}

fn run(cli: Cli) -> Result<Outcome, FemError> {
    match cli.command {
        Command::MeshInfo(c) => commands::mesh_info(&c.resolve()?),
        Command::SolveBiharmonic(c) => commands::solve_biharmonic_cmd(&c.resolve()?),
        Command::SolveNse(c) => commands::solve_nse_cmd(&c.resolve()?),
        Command::CompareOrderings(c) => commands::compare_orderings(&c.resolve()?),
        Command::ExportSparsity(c) => commands::export_sparsity(&c.resolve()?),
        Command::ExportContours { common, levels } => commands::export_contours(&common.resolve()?, levels.as_deref()),
        Command::ConvergenceTable { common, sizes, jobs } => commands::convergence_table(&common.resolve()?, &sizes, jobs),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            if outcome.success {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: solver did not converge; outputs were written");
                ExitCode::from(1)
            }
        }
        Err(e @ (FemError::Config(_) | FemError::Parse { .. })) => {
            eprintln!("error: {e}");
            eprintln!("run with --help for usage");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
