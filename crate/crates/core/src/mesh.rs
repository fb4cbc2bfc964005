//! Structured triangulations of the unit square and global numbering of the
//! Argyris degrees of freedom.
//!
//! Vertices are numbered row-major, `v = j * (n + 1) + i` for the vertex at
//! `(i / n, j / n)`. Every cell is split by its bottom-left to top-right
//! diagonal. Edges are numbered horizontal first (row-major), then vertical,
//! then oblique, so the edge index is also the position of its midside DOF
//! within the midside block of every ordering scheme.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Point, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Horizontal,
    Vertical,
    Oblique,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Endpoints with `vertices[0] < vertices[1]`.
    pub vertices: [usize; 2],
    pub midpoint: Point,
    pub kind: EdgeKind,
    pub on_boundary: bool,
}

impl Edge {
    /// Unit normal shared by both neighbouring triangles: the direction from
    /// the lower to the higher vertex index, rotated by +90 degrees.
    pub fn normal(&self, mesh: &Mesh) -> Point {
        let a = mesh.vertices[self.vertices[0]];
        let b = mesh.vertices[self.vertices[1]];
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len = libm::hypot(dx, dy);
        [-dy / len, dx / len]
    }
}

/// Uniform triangulation of the unit square with `2 n^2` triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    n: usize,
    pub vertices: Vec<Point>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    /// Edge ids of each triangle, local edge `k` joining local vertices
    /// `k` and `(k + 1) % 3`.
    pub triangle_edges: Vec<[usize; 3]>,
    pub edges: Vec<Edge>,
    pub vertex_on_boundary: Vec<bool>,
}

/// Builds the structured mesh with `n` cells per side (`h = 1 / n`).
pub fn build_uniform_mesh(n: usize) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::InvalidMeshSize(n));
    }
    let h = 1.0 / n as f64;
    let side = n + 1;
    let vid = |i: usize, j: usize| j * side + i;

    let mut vertices = Vec::with_capacity(side * side);
    let mut vertex_on_boundary = Vec::with_capacity(side * side);
    for j in 0..side {
        for i in 0..side {
            vertices.push([i as f64 * h, j as f64 * h]);
            vertex_on_boundary.push(i == 0 || j == 0 || i == n || j == n);
        }
    }

    let mut edges = Vec::with_capacity(3 * n * n + 2 * n);
    let mut push_edge = |a: usize, b: usize, kind: EdgeKind, on_boundary: bool| {
        let pa: Point = vertices[a];
        let pb: Point = vertices[b];
        edges.push(Edge {
            vertices: [a.min(b), a.max(b)],
            midpoint: [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])],
            kind,
            on_boundary,
        });
    };
    for j in 0..side {
        for i in 0..n {
            push_edge(vid(i, j), vid(i + 1, j), EdgeKind::Horizontal, j == 0 || j == n);
        }
    }
    for j in 0..n {
        for i in 0..side {
            push_edge(vid(i, j), vid(i, j + 1), EdgeKind::Vertical, i == 0 || i == n);
        }
    }
    for j in 0..n {
        for i in 0..n {
            push_edge(vid(i, j), vid(i + 1, j + 1), EdgeKind::Oblique, false);
        }
    }

    let horizontal = |i: usize, j: usize| j * n + i;
    let vertical = |i: usize, j: usize| n * side + j * side + i;
    let oblique = |i: usize, j: usize| 2 * n * side + j * n + i;

    let mut triangles = Vec::with_capacity(2 * n * n);
    let mut triangle_edges = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (v00, v10, v01, v11) = (vid(i, j), vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1));
            triangles.push([v00, v10, v11]);
            triangle_edges.push([horizontal(i, j), vertical(i + 1, j), oblique(i, j)]);
            triangles.push([v00, v11, v01]);
            triangle_edges.push([oblique(i, j), horizontal(i, j + 1), vertical(i, j)]);
        }
    }

    Ok(Mesh {
        n,
        vertices,
        triangles,
        triangle_edges,
        edges,
        vertex_on_boundary,
    })
}

impl Mesh {
    /// Subdivisions per side.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    /// Locates the triangle containing `p` (closed unit square). Points on a
    /// shared edge resolve to one of the neighbours deterministically.
    pub fn locate(&self, p: Point) -> Result<usize> {
        let [x, y] = p;
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(Error::PointOutsideDomain { x, y });
        }
        let n = self.n;
        let nf = n as f64;
        let i = ((x * nf) as usize).min(n - 1);
        let j = ((y * nf) as usize).min(n - 1);
        let dx = x * nf - i as f64;
        let dy = y * nf - j as f64;
        let cell = j * n + i;
        Ok(if dy <= dx { 2 * cell } else { 2 * cell + 1 })
    }

    pub fn is_on_boundary(p: Point) -> bool {
        p[0] == 0.0 || p[1] == 0.0 || p[0] == 1.0 || p[1] == 1.0
    }
}

/// The six vertex degrees of freedom, in their local order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexDof {
    Value,
    Dx,
    Dy,
    Dxx,
    Dxy,
    Dyy,
}

impl VertexDof {
    pub const ALL: [VertexDof; 6] = [
        VertexDof::Value,
        VertexDof::Dx,
        VertexDof::Dy,
        VertexDof::Dxx,
        VertexDof::Dxy,
        VertexDof::Dyy,
    ];

    pub fn slot(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            VertexDof::Value => "value",
            VertexDof::Dx => "dx",
            VertexDof::Dy => "dy",
            VertexDof::Dxx => "dxx",
            VertexDof::Dxy => "dxy",
            VertexDof::Dyy => "dyy",
        }
    }
}

/// The three global numberings of the Argyris DOFs. All of them place the
/// midside DOFs last, in edge order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderingScheme {
    /// Six consecutive numbers per vertex, vertices in row-major order.
    VertexBlock,
    /// All function values first, then each derivative family in turn.
    FunctionFirst,
    /// Six consecutive numbers per vertex, visiting even-position vertices
    /// before odd-position ones.
    AlternatingVertex,
}

impl OrderingScheme {
    pub const ALL: [OrderingScheme; 3] = [
        OrderingScheme::VertexBlock,
        OrderingScheme::FunctionFirst,
        OrderingScheme::AlternatingVertex,
    ];

    /// 1-based option number used on the command line.
    pub fn from_number(k: usize) -> Option<Self> {
        match k {
            1 => Some(OrderingScheme::VertexBlock),
            2 => Some(OrderingScheme::FunctionFirst),
            3 => Some(OrderingScheme::AlternatingVertex),
            _ => None,
        }
    }

    pub fn number(self) -> usize {
        match self {
            OrderingScheme::VertexBlock => 1,
            OrderingScheme::FunctionFirst => 2,
            OrderingScheme::AlternatingVertex => 3,
        }
    }
}

/// Which vertex DOFs are clamped on the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BoundaryClamp {
    /// All six DOFs at every boundary vertex.
    #[default]
    AllVertexDofs,
    /// Only what `psi = dpsi/dn = 0` forces: the second normal derivative at
    /// non-corner boundary vertices stays free.
    Minimal,
}

/// What a global DOF index refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DofEntity {
    Vertex { vertex: usize, dof: VertexDof },
    /// Midside normal derivative of an edge.
    Edge(usize),
}

/// Global numbering of the `6 V + E` Argyris DOFs.
///
/// Internally every DOF has a canonical slot (`6 v + k` for vertex DOFs,
/// `6 V + e` for midside DOFs); the scheme is a permutation of slots.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    scheme: OrderingScheme,
    vertex_count: usize,
    slot_to_global: Vec<usize>,
    global_to_slot: Vec<usize>,
    constrained: Vec<bool>,
}

/// Numbers the DOFs of `mesh` with `scheme`, marking boundary DOFs per
/// `clamp`.
pub fn enumerate_dofs(mesh: &Mesh, scheme: OrderingScheme, clamp: BoundaryClamp) -> DofMap {
    let nv = mesh.vertex_count();
    let ne = mesh.edge_count();
    let total = 6 * nv + ne;
    let mut slot_to_global = vec![0; total];

    match scheme {
        OrderingScheme::VertexBlock => {
            for (slot, g) in slot_to_global.iter_mut().enumerate().take(6 * nv) {
                *g = slot;
            }
        }
        OrderingScheme::FunctionFirst => {
            for v in 0..nv {
                for k in 0..6 {
                    slot_to_global[6 * v + k] = k * nv + v;
                }
            }
        }
        OrderingScheme::AlternatingVertex => {
            let evens = nv.div_ceil(2);
            for v in 0..nv {
                let rank = if v % 2 == 0 { v / 2 } else { evens + v / 2 };
                for k in 0..6 {
                    slot_to_global[6 * v + k] = 6 * rank + k;
                }
            }
        }
    }
    for e in 0..ne {
        slot_to_global[6 * nv + e] = 6 * nv + e;
    }

    let mut global_to_slot = vec![0; total];
    for (slot, &g) in slot_to_global.iter().enumerate() {
        global_to_slot[g] = slot;
    }

    let mut constrained = vec![false; total];
    for v in 0..nv {
        if !mesh.vertex_on_boundary[v] {
            continue;
        }
        let [x, y] = mesh.vertices[v];
        let on_vertical = x == 0.0 || x == 1.0;
        let on_horizontal = y == 0.0 || y == 1.0;
        for dof in VertexDof::ALL {
            let clamp_it = match clamp {
                BoundaryClamp::AllVertexDofs => true,
                BoundaryClamp::Minimal => match dof {
                    VertexDof::Dxx => !on_vertical || on_horizontal,
                    VertexDof::Dyy => !on_horizontal || on_vertical,
                    _ => true,
                },
            };
            if clamp_it {
                constrained[slot_to_global[6 * v + dof.slot()]] = true;
            }
        }
    }
    for (e, edge) in mesh.edges.iter().enumerate() {
        if edge.on_boundary {
            constrained[slot_to_global[6 * nv + e]] = true;
        }
    }

    DofMap {
        scheme,
        vertex_count: nv,
        slot_to_global,
        global_to_slot,
        constrained,
    }
}

/// Sorted global indices of the clamped DOFs.
pub fn constrained_dofs(dofmap: &DofMap) -> Vec<usize> {
    dofmap
        .constrained
        .iter()
        .enumerate()
        .filter_map(|(g, &c)| c.then_some(g))
        .collect()
}

impl DofMap {
    pub fn scheme(&self) -> OrderingScheme {
        self.scheme
    }

    pub fn total_dofs(&self) -> usize {
        self.slot_to_global.len()
    }

    pub fn vertex_dof(&self, vertex: usize, dof: VertexDof) -> usize {
        self.slot_to_global[6 * vertex + dof.slot()]
    }

    pub fn edge_dof(&self, edge: usize) -> usize {
        self.slot_to_global[6 * self.vertex_count + edge]
    }

    pub fn entity(&self, global: usize) -> DofEntity {
        let slot = self.global_to_slot[global];
        if slot < 6 * self.vertex_count {
            DofEntity::Vertex {
                vertex: slot / 6,
                dof: VertexDof::ALL[slot % 6],
            }
        } else {
            DofEntity::Edge(slot - 6 * self.vertex_count)
        }
    }

    pub fn is_constrained(&self, global: usize) -> bool {
        self.constrained[global]
    }

    pub fn constrained_mask(&self) -> &[bool] {
        &self.constrained
    }

    /// Global indices of the 21 local DOFs of triangle `t`, in the local
    /// order used by [`crate::argyris::ElementBasis`].
    pub fn element_dofs(&self, mesh: &Mesh, t: usize) -> [usize; 21] {
        let mut out = [0; 21];
        for (local_v, &v) in mesh.triangles[t].iter().enumerate() {
            for dof in VertexDof::ALL {
                out[6 * local_v + dof.slot()] = self.vertex_dof(v, dof);
            }
        }
        for (k, &e) in mesh.triangle_edges[t].iter().enumerate() {
            out[18 + k] = self.edge_dof(e);
        }
        out
    }

    /// Permutation taking indices of `self` to indices of `other`.
    pub fn permutation_to(&self, other: &DofMap) -> Vec<usize> {
        self.global_to_slot
            .iter()
            .map(|&slot| other.slot_to_global[slot])
            .collect()
    }
}
