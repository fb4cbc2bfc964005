use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Mesh subdivision count must be positive.
    InvalidMeshSize(usize),
    /// The dual (Vandermonde) system of an element could not be inverted or
    /// the resulting basis failed the duality check.
    DegenerateElement {
        triangle: usize,
        condition: f64,
        duality_residual: f64,
    },
    UnsupportedQuadrature(usize),
    DimensionMismatch { expected: usize, found: usize },
    InvalidParameter(&'static str),
    PointOutsideDomain { x: f64, y: f64 },
    /// Inner linear solver broke down during a Picard step.
    SolverBreakdown { outer_iteration: usize },
    NotConverged { iterations: f64, residual: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidMeshSize(n) => write!(f, "invalid mesh size n = {n}, expected n >= 1"),
            Error::DegenerateElement {
                triangle,
                condition,
                duality_residual,
            } => write!(
                f,
                "element {triangle}: dual system is degenerate (condition estimate {condition:.3e}, duality residual {duality_residual:.3e})"
            ),
            Error::UnsupportedQuadrature(n) => write!(
                f,
                "no {n}-point triangle rule, supported counts are 1, 3, 4, 6, 12, 25"
            ),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::PointOutsideDomain { x, y } => {
                write!(f, "point ({x}, {y}) lies outside the unit square")
            }
            Error::SolverBreakdown { outer_iteration } => {
                write!(f, "linear solver breakdown in outer iteration {outer_iteration}")
            }
            Error::NotConverged {
                iterations,
                residual,
            } => write!(
                f,
                "no convergence after {iterations} iterations (residual {residual:.3e})"
            ),
        }
    }
}

impl core::error::Error for Error {}
