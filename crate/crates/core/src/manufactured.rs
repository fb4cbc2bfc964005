//! Manufactured solution on the unit square.
//!
//! The stream function is `psi = X(x) X(y)` with `X(t) = t^2 (t - 1)^2`,
//! the pressure `p = x^3 + y^3 - 1/2`, and the velocity `u = s (psi_y, -psi_x)`
//! with `s = +1` for [`VelocityConvention::CurlOfPsi`] and `s = -1` for
//! [`VelocityConvention::NegCurlOfPsi`]. The body force is
//! `f = -Re^-1 Lap u + (u . grad) u + grad p`.
//!
//! The weak form `a(psi, phi) + b(psi; psi, phi) = (f, curl phi)` with
//! `curl phi = (phi_y, -phi_x)` is satisfied by the stream function whose
//! curl is `u`, i.e. by `s * psi`. [`ManufacturedSolution::stream_function`]
//! returns that field.

use crate::poly::Jet;
use crate::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VelocityConvention {
    /// `u = (psi_y, -psi_x)`
    #[default]
    CurlOfPsi,
    /// `u = (-psi_y, psi_x)`
    NegCurlOfPsi,
}

impl VelocityConvention {
    fn sign(self) -> f64 {
        match self {
            VelocityConvention::CurlOfPsi => 1.0,
            VelocityConvention::NegCurlOfPsi => -1.0,
        }
    }
}

/// `X(t) = t^2 (t - 1)^2` and its first four derivatives.
fn profile(t: f64) -> [f64; 5] {
    [
        t * t * (t - 1.0) * (t - 1.0),
        4.0 * t * t * t - 6.0 * t * t + 2.0 * t,
        12.0 * t * t - 12.0 * t + 2.0,
        24.0 * t - 12.0,
        24.0,
    ]
}

/// Jet of `x^2 (x-1)^2 y^2 (y-1)^2`.
pub fn exact_psi(p: Point) -> Jet {
    let x = profile(p[0]);
    let y = profile(p[1]);
    Jet {
        value: x[0] * y[0],
        dx: x[1] * y[0],
        dy: x[0] * y[1],
        dxx: x[2] * y[0],
        dxy: x[1] * y[1],
        dyy: x[0] * y[2],
    }
}

pub fn exact_pressure(p: Point) -> f64 {
    p[0] * p[0] * p[0] + p[1] * p[1] * p[1] - 0.5
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedSolution {
    pub reynolds: f64,
    pub convention: VelocityConvention,
}

impl ManufacturedSolution {
    pub fn new(reynolds: f64, convention: VelocityConvention) -> Self {
        ManufacturedSolution { reynolds, convention }
    }

    /// Stream function solving the weak problem for this forcing.
    pub fn stream_function(&self, p: Point) -> Jet {
        exact_psi(p).scaled(self.convention.sign())
    }

    pub fn velocity(&self, p: Point) -> [f64; 2] {
        let s = self.convention.sign();
        let (x, y) = (profile(p[0]), profile(p[1]));
        [s * x[0] * y[1], -s * x[1] * y[0]]
    }

    /// `-Re^-1 Lap u`
    pub fn viscous_term(&self, p: Point) -> [f64; 2] {
        let s = self.convention.sign();
        let (x, y) = (profile(p[0]), profile(p[1]));
        let lap_u1 = s * (x[2] * y[1] + x[0] * y[3]);
        let lap_u2 = -s * (x[3] * y[0] + x[1] * y[2]);
        [-lap_u1 / self.reynolds, -lap_u2 / self.reynolds]
    }

    /// `(u . grad) u`; independent of the convention.
    pub fn convective_term(&self, p: Point) -> [f64; 2] {
        let (x, y) = (profile(p[0]), profile(p[1]));
        [
            x[0] * x[1] * (y[1] * y[1] - y[0] * y[2]),
            y[0] * y[1] * (x[1] * x[1] - x[0] * x[2]),
        ]
    }

    pub fn pressure_gradient(&self, p: Point) -> [f64; 2] {
        [3.0 * p[0] * p[0], 3.0 * p[1] * p[1]]
    }

    /// Full Navier-Stokes body force.
    pub fn force(&self, p: Point) -> [f64; 2] {
        let (v, c, g) = (self.viscous_term(p), self.convective_term(p), self.pressure_gradient(p));
        [v[0] + c[0] + g[0], v[1] + c[1] + g[1]]
    }

    /// Body force of the Stokes (biharmonic) problem with the same solution.
    pub fn stokes_force(&self, p: Point) -> [f64; 2] {
        let (v, g) = (self.viscous_term(p), self.pressure_gradient(p));
        [v[0] + g[0], v[1] + g[1]]
    }
}

/// Right-hand side selection for a solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Forcing {
    Zero,
    /// `-Re^-1 Lap u + grad p` of the manufactured solution.
    Stokes(ManufacturedSolution),
    /// The full manufactured Navier-Stokes force.
    NavierStokes(ManufacturedSolution),
}

impl Forcing {
    pub fn eval(&self, p: Point) -> [f64; 2] {
        match self {
            Forcing::Zero => [0.0, 0.0],
            Forcing::Stokes(m) => m.stokes_force(p),
            Forcing::NavierStokes(m) => m.force(p),
        }
    }

    pub fn solution(&self) -> Option<&ManufacturedSolution> {
        match self {
            Forcing::Zero => None,
            Forcing::Stokes(m) | Forcing::NavierStokes(m) => Some(m),
        }
    }
}
