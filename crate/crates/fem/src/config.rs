//! Run configuration. Values come from built-in defaults, then an optional
//! `key = value` file, then command-line flags; later sources win.

use std::path::{Path, PathBuf};

use argyris_core::manufactured::{ManufacturedSolution, VelocityConvention};
use argyris_core::mesh::{BoundaryClamp, OrderingScheme};
use argyris_core::picard::PicardConfig;

use crate::{io_err, FemError, Result};

/// Quadrature point counts accepted on the command line.
pub const ALLOWED_NQP: [usize; 3] = [4, 6, 25];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub reynolds: f64,
    pub tol: f64,
    pub max_outer: usize,
    pub nqp: usize,
    /// Ordering scheme number, 1 to 3.
    pub ordering: usize,
    pub out_dir: PathBuf,
    pub minimal_bc: bool,
    pub flip_sign_convention: bool,
    /// Samples per side of the contour grid.
    pub grid: usize,
    pub max_linear_iter: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 3,
            reynolds: 1.0,
            tol: 1e-5,
            max_outer: 20,
            nqp: 6,
            ordering: 1,
            out_dir: PathBuf::from("out"),
            minimal_bc: false,
            flip_sign_convention: false,
            grid: 41,
            max_linear_iter: 20_000,
        }
    }
}

/// A partial configuration; `None` leaves the lower-precedence value alone.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<usize>,
    pub reynolds: Option<f64>,
    pub tol: Option<f64>,
    pub max_outer: Option<usize>,
    pub nqp: Option<usize>,
    pub ordering: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub minimal_bc: Option<bool>,
    pub flip_sign_convention: Option<bool>,
    pub grid: Option<usize>,
    pub max_linear_iter: Option<usize>,
}

impl Overrides {
    /// Parses `key = value` lines. Blank lines and `#` comments are skipped;
    /// unknown keys and repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut o = Overrides::default();
        let mut seen = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line_no = k + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| FemError::Parse { line: line_no, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, found {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.contains(&key.to_string()) {
                return Err(err(format!("duplicate key {key:?}")));
            }
            seen.push(key.to_string());
            fn num<T: std::str::FromStr>(key: &str, v: &str) -> std::result::Result<T, String> {
                v.parse().map_err(|_| format!("invalid value {v:?} for {key}"))
            }
            let parsed: std::result::Result<(), String> = (|| {
                match key {
                    "n" => o.n = Some(num(key, value)?),
                    "re" | "reynolds" => o.reynolds = Some(num(key, value)?),
                    "tol" => o.tol = Some(num(key, value)?),
                    "max_outer" => o.max_outer = Some(num(key, value)?),
                    "nqp" => o.nqp = Some(num(key, value)?),
                    "ordering" => o.ordering = Some(num(key, value)?),
                    "out_dir" => o.out_dir = Some(PathBuf::from(value)),
                    "minimal_bc" => o.minimal_bc = Some(num(key, value)?),
                    "flip_sign_convention" => o.flip_sign_convention = Some(num(key, value)?),
                    "grid" => o.grid = Some(num(key, value)?),
                    "max_linear_iter" => o.max_linear_iter = Some(num(key, value)?),
                    _ => return Err(format!("unknown key {key:?}")),
                }
                Ok(())
            })();
            parsed.map_err(err)?;
        }
        Ok(o)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::parse(&text)
    }

    pub fn apply(&self, c: &mut RunConfig) {
        macro_rules! set {
            ($($f:ident),*) => {$(if let Some(v) = &self.$f { c.$f = v.clone(); })*};
        }
        set!(n, reynolds, tol, max_outer, nqp, ordering, out_dir, minimal_bc, flip_sign_convention, grid, max_linear_iter);
    }
}

impl RunConfig {
    /// Defaults, then the file (if any), then the flags.
    pub fn resolve(file: Option<&Path>, flags: &Overrides) -> Result<Self> {
        let mut c = RunConfig::default();
        if let Some(path) = file {
            Overrides::from_file(path)?.apply(&mut c);
        }
        flags.apply(&mut c);
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(FemError::Config(m.to_string()));
        if self.n == 0 {
            return bad("n must be positive");
        }
        if !(self.reynolds > 0.0 && self.reynolds.is_finite()) {
            return bad("re must be positive");
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad("tol must be positive");
        }
        if self.max_outer == 0 || self.max_linear_iter == 0 {
            return bad("iteration limits must be positive");
        }
        if !ALLOWED_NQP.contains(&self.nqp) {
            return bad("nqp must be one of 4, 6, 25");
        }
        if OrderingScheme::from_number(self.ordering).is_none() {
            return bad("ordering must be 1, 2 or 3");
        }
        if self.grid < 16 {
            return bad("grid must have at least 16 samples per side");
        }
        Ok(())
    }

    pub fn scheme(&self) -> OrderingScheme {
        OrderingScheme::from_number(self.ordering).unwrap_or(OrderingScheme::VertexBlock)
    }

    pub fn clamp(&self) -> BoundaryClamp {
        if self.minimal_bc {
            BoundaryClamp::Minimal
        } else {
            BoundaryClamp::AllVertexDofs
        }
    }

    pub fn manufactured(&self) -> ManufacturedSolution {
        let convention = if self.flip_sign_convention {
            VelocityConvention::NegCurlOfPsi
        } else {
            VelocityConvention::CurlOfPsi
        };
        ManufacturedSolution::new(self.reynolds, convention)
    }

    pub fn picard(&self) -> PicardConfig {
        PicardConfig {
            reynolds: self.reynolds,
            tol: self.tol,
            max_outer: self.max_outer,
            quadrature_points: self.nqp,
            ordering: self.scheme(),
            clamp: self.clamp(),
            linear_tol: self.tol,
            max_linear_iter: self.max_linear_iter,
            ..PicardConfig::default()
        }
    }

    /// File-name stem shared by all outputs of one run.
    pub fn stem(&self, command: &str) -> String {
        let mut s = format!("{command}_n{}_q{}_o{}", self.n, self.nqp, self.ordering);
        if self.minimal_bc {
            s.push_str("_minbc");
        }
        if self.flip_sign_convention {
            s.push_str("_flip");
        }
        s
    }
}
