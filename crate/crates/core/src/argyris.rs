//! The 21-DOF quintic Argyris triangle.
//!
//! The element is not affine-equivalent, so each physical triangle gets its
//! own dual basis: the 21 DOF functionals are applied to the 21 quintic
//! monomials and the resulting generalized Vandermonde matrix is inverted.
//! Monomials are taken in the triangle's centered frame
//! `((x - x_c) / d, (y - y_c) / d)`, with `d` the triangle diameter, and the
//! derivative functionals are scaled by `d^order` while solving; the shape
//! functions are rescaled afterwards so that the physical functionals are
//! dual to them.
//!
//! Local DOF order: for each local vertex `value, dx, dy, dxx, dxy, dyy`,
//! then the midside normal derivatives of local edges 0 (v0 v1), 1 (v1 v2),
//! 2 (v2 v0). Normals come from [`crate::mesh::Edge::normal`], which both
//! neighbours of an edge share.

use crate::linalg::Dense;
use crate::mesh::Mesh;
use crate::poly::{monomial_jets, Jet, QUINTIC_DIM};
use crate::{Error, Point, Result};

/// Number of local DOFs.
pub const ARGYRIS_DOFS: usize = 21;

/// Largest tolerated `|F_j(phi_i) - delta_ij|` after construction.
pub const DUALITY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionalKind {
    Value,
    Dx,
    Dy,
    Dxx,
    Dxy,
    Dyy,
    NormalDeriv,
}

impl FunctionalKind {
    const VERTEX: [FunctionalKind; 6] = [
        FunctionalKind::Value,
        FunctionalKind::Dx,
        FunctionalKind::Dy,
        FunctionalKind::Dxx,
        FunctionalKind::Dxy,
        FunctionalKind::Dyy,
    ];

    /// Derivative order.
    pub fn order(self) -> i32 {
        match self {
            FunctionalKind::Value => 0,
            FunctionalKind::Dx | FunctionalKind::Dy | FunctionalKind::NormalDeriv => 1,
            FunctionalKind::Dxx | FunctionalKind::Dxy | FunctionalKind::Dyy => 2,
        }
    }
}

/// One degree of freedom: a point evaluation of a derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DofFunctional {
    pub kind: FunctionalKind,
    pub anchor: Point,
    /// Unit normal, set only for [`FunctionalKind::NormalDeriv`].
    pub normal: Option<Point>,
}

impl DofFunctional {
    /// Applies the functional to the jet of a field at `anchor`.
    pub fn apply(&self, jet: &Jet) -> f64 {
        match self.kind {
            FunctionalKind::Value => jet.value,
            FunctionalKind::Dx => jet.dx,
            FunctionalKind::Dy => jet.dy,
            FunctionalKind::Dxx => jet.dxx,
            FunctionalKind::Dxy => jet.dxy,
            FunctionalKind::Dyy => jet.dyy,
            FunctionalKind::NormalDeriv => {
                let n = self.normal.expect("normal derivative functional without a normal");
                n[0] * jet.dx + n[1] * jet.dy
            }
        }
    }
}

/// Shape-function jets at one point.
#[derive(Debug, Clone)]
pub struct ShapeValues {
    pub jets: [Jet; ARGYRIS_DOFS],
    /// False when the point lies outside the triangle (beyond a small
    /// tolerance).
    pub inside: bool,
}

/// Dual Argyris basis of one physical triangle.
#[derive(Debug, Clone)]
pub struct ElementBasis {
    triangle: usize,
    vertices: [Point; 3],
    center: Point,
    scale: f64,
    /// `coeffs[i][k]`: coefficient of centered monomial `k` in shape `i`.
    coeffs: [[f64; QUINTIC_DIM]; ARGYRIS_DOFS],
    functionals: [DofFunctional; ARGYRIS_DOFS],
    duality_residual: f64,
    condition: f64,
}

/// Builds the dual basis of triangle `t` of `mesh`.
pub fn build_element_basis(mesh: &Mesh, t: usize) -> Result<ElementBasis> {
    let vertices = mesh.triangle_points(t);
    let edge_normals = mesh.triangle_edges[t].map(|e| mesh.edges[e].normal(mesh));
    build_basis_on(t, vertices, edge_normals)
}

/// Builds the dual basis for an arbitrary triangle with prescribed edge
/// normals (`normals[k]` belongs to the edge from vertex `k` to `k + 1`).
pub fn build_basis_on(triangle: usize, vertices: [Point; 3], normals: [Point; 3]) -> Result<ElementBasis> {
    let center = [
        (vertices[0][0] + vertices[1][0] + vertices[2][0]) / 3.0,
        (vertices[0][1] + vertices[1][1] + vertices[2][1]) / 3.0,
    ];
    let dist = |a: Point, b: Point| libm::hypot(a[0] - b[0], a[1] - b[1]);
    let scale = dist(vertices[0], vertices[1])
        .max(dist(vertices[1], vertices[2]))
        .max(dist(vertices[2], vertices[0]));
    let degenerate = |condition: f64, duality_residual: f64| Error::DegenerateElement {
        triangle,
        condition,
        duality_residual,
    };
    if !(scale > 0.0) {
        return Err(degenerate(f64::INFINITY, f64::INFINITY));
    }

    let mut functionals = [DofFunctional {
        kind: FunctionalKind::Value,
        anchor: [0.0; 2],
        normal: None,
    }; ARGYRIS_DOFS];
    for (v, p) in vertices.iter().enumerate() {
        for (k, kind) in FunctionalKind::VERTEX.iter().enumerate() {
            functionals[6 * v + k] = DofFunctional {
                kind: *kind,
                anchor: *p,
                normal: None,
            };
        }
    }
    for k in 0..3 {
        let (a, b) = (vertices[k], vertices[(k + 1) % 3]);
        let n = normals[k];
        functionals[18 + k] = DofFunctional {
            kind: FunctionalKind::NormalDeriv,
            anchor: [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])],
            normal: Some([n[0], n[1]]),
        };
    }

    // Scaled functionals applied to centered monomials: derivatives are
    // taken in the local frame, which is d^order times the physical one.
    let local = |p: Point| [(p[0] - center[0]) / scale, (p[1] - center[1]) / scale];
    let mut vandermonde = Dense::zeros(ARGYRIS_DOFS);
    for (j, f) in functionals.iter().enumerate() {
        let [u, w] = local(f.anchor);
        for (k, jet) in monomial_jets(u, w).iter().enumerate() {
            vandermonde.set(j, k, f.apply(jet));
        }
    }
    let inverse = vandermonde
        .inverse()
        .ok_or_else(|| degenerate(f64::INFINITY, f64::INFINITY))?;
    let condition = vandermonde.norm_1() * inverse.norm_1();

    let mut coeffs = [[0.0; QUINTIC_DIM]; ARGYRIS_DOFS];
    for (i, row) in coeffs.iter_mut().enumerate() {
        let rescale = libm::pow(scale, functionals[i].kind.order() as f64);
        for (k, c) in row.iter_mut().enumerate() {
            *c = inverse.get(k, i) * rescale;
        }
    }

    let mut basis = ElementBasis {
        triangle,
        vertices,
        center,
        scale,
        coeffs,
        functionals,
        duality_residual: 0.0,
        condition,
    };
    let residual = basis.duality_residual_recomputed();
    basis.duality_residual = residual;
    if !(residual <= DUALITY_TOLERANCE) || !condition.is_finite() {
        return Err(degenerate(condition, residual));
    }
    Ok(basis)
}

impl ElementBasis {
    pub fn triangle(&self) -> usize {
        self.triangle
    }

    pub fn vertices(&self) -> [Point; 3] {
        self.vertices
    }

    pub fn functionals(&self) -> &[DofFunctional; ARGYRIS_DOFS] {
        &self.functionals
    }

    /// Max `|F_j(phi_i) - delta_ij|` measured at construction.
    pub fn duality_residual(&self) -> f64 {
        self.duality_residual
    }

    /// 1-norm condition estimate of the scaled dual system.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Monomial coefficients of shape `i` in the centered frame, together
    /// with the frame's center and scale.
    pub fn shape_coefficients(&self, i: usize) -> (&[f64; QUINTIC_DIM], Point, f64) {
        (&self.coeffs[i], self.center, self.scale)
    }

    /// Barycentric coordinates of `p`.
    pub fn barycentric(&self, p: Point) -> [f64; 3] {
        let [a, b, c] = self.vertices;
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        let l1 = ((p[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (p[1] - a[1])) / det;
        let l2 = ((b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1])) / det;
        [1.0 - l1 - l2, l1, l2]
    }

    pub fn contains(&self, p: Point) -> bool {
        self.barycentric(p).iter().all(|&l| l >= -1e-12)
    }

    /// Jets of all 21 shape functions at `p`.
    pub fn eval(&self, p: Point) -> ShapeValues {
        let u = (p[0] - self.center[0]) / self.scale;
        let w = (p[1] - self.center[1]) / self.scale;
        let monos = monomial_jets(u, w);
        let s1 = 1.0 / self.scale;
        let s2 = s1 * s1;
        let mut jets = [Jet::default(); ARGYRIS_DOFS];
        for (jet, row) in jets.iter_mut().zip(self.coeffs.iter()) {
            let mut acc = Jet::default();
            for (c, m) in row.iter().zip(monos.iter()) {
                acc.add_scaled(*c, m);
            }
            *jet = Jet {
                value: acc.value,
                dx: acc.dx * s1,
                dy: acc.dy * s1,
                dxx: acc.dxx * s2,
                dxy: acc.dxy * s2,
                dyy: acc.dyy * s2,
            };
        }
        ShapeValues {
            jets,
            inside: self.contains(p),
        }
    }

    /// Jet at `p` of the field with local DOF values `dofs`.
    pub fn eval_field(&self, p: Point, dofs: &[f64; ARGYRIS_DOFS]) -> Jet {
        let shapes = self.eval(p);
        let mut out = Jet::default();
        for (d, jet) in dofs.iter().zip(shapes.jets.iter()) {
            out.add_scaled(*d, jet);
        }
        out
    }

    /// DOF values of the Argyris interpolant of a field given by its jet.
    pub fn interpolation_dofs(&self, field: impl Fn(Point) -> Jet) -> [f64; ARGYRIS_DOFS] {
        self.functionals.map(|f| f.apply(&field(f.anchor)))
    }

    /// `m[i][j] = F_j(phi_i)`, which is the identity up to rounding.
    pub fn duality_matrix(&self) -> [[f64; ARGYRIS_DOFS]; ARGYRIS_DOFS] {
        let mut m = [[0.0; ARGYRIS_DOFS]; ARGYRIS_DOFS];
        for (j, f) in self.functionals.iter().enumerate() {
            let shapes = self.eval(f.anchor);
            for (i, row) in m.iter_mut().enumerate() {
                row[j] = f.apply(&shapes.jets[i]);
            }
        }
        m
    }

    fn duality_residual_recomputed(&self) -> f64 {
        let m = self.duality_matrix();
        let mut worst: f64 = 0.0;
        for (i, row) in m.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let e = if i == j { 1.0 } else { 0.0 };
                let d = (v - e).abs();
                worst = if d.is_nan() { f64::INFINITY } else { worst.max(d) };
            }
        }
        worst
    }
}
