//! Global systems for the viscous form `a`, the convection form `b` and the
//! load functional `l` on the free (unclamped) Argyris DOFs.
//!
//! ```text
//! a(psi, phi)     = Re^-1 int Lap psi Lap phi
//! b(xi; psi, phi) = int Lap xi (psi_y phi_x - psi_x phi_y)
//! l(phi)          = int f . (phi_y, -phi_x)
//! ```
//!
//! Clamped DOFs are removed from the system; the free DOFs keep their
//! relative global order, so the reduced matrix inherits the ordering
//! scheme's pattern. Triplets are generated triangle by triangle and merged
//! per entry in that order, which makes every matrix bitwise reproducible.

use alloc::vec;
use alloc::vec::Vec;

use crate::argyris::{build_element_basis, ElementBasis, ShapeValues, ARGYRIS_DOFS};
use crate::mesh::{enumerate_dofs, BoundaryClamp, DofMap, Mesh, OrderingScheme, VertexDof};
use crate::poly::Jet;
use crate::quadrature::QuadratureRule;
use crate::sparse::{CsrMatrix, Structure};
use crate::{Error, Point, Result};

/// The Argyris space on a mesh: element bases, DOF numbering and the
/// free-DOF index.
#[derive(Debug, Clone)]
pub struct ArgyrisSpace {
    mesh: Mesh,
    dofmap: DofMap,
    bases: Vec<ElementBasis>,
    element_dofs: Vec<[usize; ARGYRIS_DOFS]>,
    free_of_global: Vec<Option<usize>>,
    global_of_free: Vec<usize>,
}

impl ArgyrisSpace {
    pub fn new(mesh: &Mesh, scheme: OrderingScheme, clamp: BoundaryClamp) -> Result<Self> {
        let dofmap = enumerate_dofs(mesh, scheme, clamp);
        let bases = (0..mesh.triangle_count())
            .map(|t| build_element_basis(mesh, t))
            .collect::<Result<Vec<_>>>()?;
        let element_dofs = (0..mesh.triangle_count())
            .map(|t| dofmap.element_dofs(mesh, t))
            .collect();
        let mut free_of_global = vec![None; dofmap.total_dofs()];
        let mut global_of_free = Vec::new();
        for (g, slot) in free_of_global.iter_mut().enumerate() {
            if !dofmap.is_constrained(g) {
                *slot = Some(global_of_free.len());
                global_of_free.push(g);
            }
        }
        Ok(ArgyrisSpace {
            mesh: mesh.clone(),
            dofmap,
            bases,
            element_dofs,
            free_of_global,
            global_of_free,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn dofmap(&self) -> &DofMap {
        &self.dofmap
    }

    pub fn basis(&self, t: usize) -> &ElementBasis {
        &self.bases[t]
    }

    pub fn element_dofs(&self, t: usize) -> &[usize; ARGYRIS_DOFS] {
        &self.element_dofs[t]
    }

    pub fn free_count(&self) -> usize {
        self.global_of_free.len()
    }

    pub fn free_index(&self, global: usize) -> Option<usize> {
        self.free_of_global[global]
    }

    pub fn free_dofs(&self) -> &[usize] {
        &self.global_of_free
    }

    /// Free entries of a full coefficient vector.
    pub fn restrict(&self, full: &[f64]) -> Result<Vec<f64>> {
        self.check_full(full)?;
        Ok(self.global_of_free.iter().map(|&g| full[g]).collect())
    }

    /// Full coefficient vector with zeros on the clamped DOFs.
    pub fn extend(&self, free: &[f64]) -> Result<Vec<f64>> {
        if free.len() != self.free_count() {
            return Err(Error::DimensionMismatch {
                expected: self.free_count(),
                found: free.len(),
            });
        }
        let mut full = vec![0.0; self.dofmap.total_dofs()];
        for (&g, &v) in self.global_of_free.iter().zip(free) {
            full[g] = v;
        }
        Ok(full)
    }

    fn check_full(&self, full: &[f64]) -> Result<()> {
        if full.len() != self.dofmap.total_dofs() {
            return Err(Error::DimensionMismatch {
                expected: self.dofmap.total_dofs(),
                found: full.len(),
            });
        }
        Ok(())
    }

    /// Global DOF values of the interpolant of a field given by its jet.
    /// Clamped DOFs are not zeroed.
    pub fn interpolate(&self, field: impl Fn(Point) -> Jet) -> Vec<f64> {
        let mesh = &self.mesh;
        let mut full = vec![0.0; self.dofmap.total_dofs()];
        for (v, p) in mesh.vertices.iter().enumerate() {
            let jet = field(*p).as_array();
            for dof in VertexDof::ALL {
                full[self.dofmap.vertex_dof(v, dof)] = jet[dof.slot()];
            }
        }
        for (e, edge) in mesh.edges.iter().enumerate() {
            let n = edge.normal(mesh);
            let jet = field(edge.midpoint);
            full[self.dofmap.edge_dof(e)] = n[0] * jet.dx + n[1] * jet.dy;
        }
        full
    }

    /// Local DOF values of triangle `t` from a full coefficient vector.
    pub fn local_coefficients(&self, t: usize, full: &[f64]) -> [f64; ARGYRIS_DOFS] {
        self.element_dofs[t].map(|g| full[g])
    }

    fn free_local(&self, t: usize) -> [Option<usize>; ARGYRIS_DOFS] {
        self.element_dofs[t].map(|g| self.free_of_global[g])
    }

    fn shapes_at(&self, t: usize, rule: &QuadratureRule) -> Vec<(ShapeValues, f64)> {
        let basis = &self.bases[t];
        rule.mapped(basis.vertices())
            .map(|(p, w)| (basis.eval(p), w))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Form {
    Biharmonic { reynolds: f64 },
    Convection,
}

/// An assembled bilinear form on the free DOFs.
#[derive(Debug, Clone)]
pub struct FormMatrix {
    pub matrix: CsrMatrix,
    pub form: Form,
}

fn check_rule(rule: &QuadratureRule) -> Result<()> {
    if rule.exact_degree < 3 {
        return Err(Error::InvalidParameter("assembly needs a quadrature rule of degree >= 3"));
    }
    Ok(())
}

/// `A_ij = Re^-1 sum_T int_T Lap phi_i Lap phi_j`.
pub fn assemble_biharmonic(space: &ArgyrisSpace, rule: &QuadratureRule, reynolds: f64) -> Result<FormMatrix> {
    check_rule(rule)?;
    if !(reynolds > 0.0) || !reynolds.is_finite() {
        return Err(Error::InvalidParameter("Reynolds number must be positive"));
    }
    let inv_re = 1.0 / reynolds;
    let mut triplets = Vec::new();
    for t in 0..space.mesh.triangle_count() {
        let mut local = [[0.0; ARGYRIS_DOFS]; ARGYRIS_DOFS];
        for (shapes, w) in space.shapes_at(t, rule) {
            let lap = shapes.jets.map(|j| j.laplacian());
            for i in 0..ARGYRIS_DOFS {
                let wi = w * lap[i];
                for j in i..ARGYRIS_DOFS {
                    local[i][j] += wi * lap[j];
                }
            }
        }
        let free = space.free_local(t);
        for i in 0..ARGYRIS_DOFS {
            let Some(fi) = free[i] else { continue };
            for j in 0..ARGYRIS_DOFS {
                let Some(fj) = free[j] else { continue };
                let v = if j >= i { local[i][j] } else { local[j][i] };
                triplets.push((fi, fj, inv_re * v));
            }
        }
    }
    let matrix = CsrMatrix::from_triplets(space.free_count(), triplets)?.with_structure(Structure::Symmetric);
    Ok(FormMatrix {
        matrix,
        form: Form::Biharmonic { reynolds },
    })
}

/// `B_ij = sum_T int_T Lap xi_h (phi_j,y phi_i,x - phi_j,x phi_i,y)`, so that
/// `(B psi)_i = b(xi; psi, phi_i)`. `xi` is a full coefficient vector.
pub fn assemble_convection(space: &ArgyrisSpace, rule: &QuadratureRule, xi: &[f64]) -> Result<FormMatrix> {
    check_rule(rule)?;
    space.check_full(xi)?;
    let mut triplets = Vec::new();
    for t in 0..space.mesh.triangle_count() {
        let coeffs = space.local_coefficients(t, xi);
        if coeffs.iter().all(|&c| c == 0.0) {
            continue;
        }
        let mut local = [[0.0; ARGYRIS_DOFS]; ARGYRIS_DOFS];
        for (shapes, w) in space.shapes_at(t, rule) {
            let lap_xi: f64 = coeffs.iter().zip(shapes.jets.iter()).map(|(c, j)| c * j.laplacian()).sum();
            let wl = w * lap_xi;
            for i in 0..ARGYRIS_DOFS {
                let gi = shapes.jets[i];
                for j in (i + 1)..ARGYRIS_DOFS {
                    let gj = shapes.jets[j];
                    local[i][j] += wl * (gj.dy * gi.dx - gj.dx * gi.dy);
                }
            }
        }
        let free = space.free_local(t);
        for i in 0..ARGYRIS_DOFS {
            let Some(fi) = free[i] else { continue };
            for j in 0..ARGYRIS_DOFS {
                let Some(fj) = free[j] else { continue };
                let v = match j.cmp(&i) {
                    core::cmp::Ordering::Greater => local[i][j],
                    core::cmp::Ordering::Less => -local[j][i],
                    core::cmp::Ordering::Equal => continue,
                };
                triplets.push((fi, fj, v));
            }
        }
    }
    let matrix = CsrMatrix::from_triplets(space.free_count(), triplets)?.with_structure(Structure::Antisymmetric);
    Ok(FormMatrix {
        matrix,
        form: Form::Convection,
    })
}

/// `l_i = sum_T int_T f . (phi_i,y, -phi_i,x)` on the free DOFs.
pub fn assemble_load(space: &ArgyrisSpace, rule: &QuadratureRule, f: impl Fn(Point) -> [f64; 2]) -> Vec<f64> {
    let mut load = vec![0.0; space.free_count()];
    for t in 0..space.mesh.triangle_count() {
        let basis = &space.bases[t];
        let mut local = [0.0; ARGYRIS_DOFS];
        for (p, w) in rule.mapped(basis.vertices()) {
            let fp = f(p);
            if fp == [0.0, 0.0] {
                continue;
            }
            let shapes = basis.eval(p);
            for (l, jet) in local.iter_mut().zip(shapes.jets.iter()) {
                *l += w * (fp[0] * jet.dy - fp[1] * jet.dx);
            }
        }
        for (fi, l) in space.free_local(t).iter().zip(local) {
            if let Some(fi) = fi {
                load[*fi] += l;
            }
        }
    }
    load
}
