//! Post-processing of computed stream functions: error norms against an
//! exact field, point evaluation, and iso-lines by marching squares.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::assembly::ArgyrisSpace;
use crate::mesh::{Mesh, VertexDof};
use crate::poly::Jet;
use crate::quadrature::{rule, QuadratureRule};
use crate::{Error, Point, Result};

/// Number of points of the rule used for error norms.
pub const ERROR_RULE_POINTS: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    /// `|psi_h - psi|_0`
    pub l2: f64,
    /// `|psi_h - psi|_1`
    pub h1_semi: f64,
    /// `|psi_h - psi|_2`, with the mixed derivative counted twice.
    pub h2_semi: f64,
    /// Largest vertex value error.
    pub nodal_max: f64,
    pub quadrature_points: usize,
}

/// Error norms of the field with full coefficients `coeffs` against the
/// exact jet, integrated with the 25-point degree-10 rule.
pub fn compute_errors(space: &ArgyrisSpace, coeffs: &[f64], exact: impl Fn(Point) -> Jet) -> Result<ErrorReport> {
    let r = rule(ERROR_RULE_POINTS)?;
    compute_errors_with(space, coeffs, exact, &r, 0)
}

/// Like [`compute_errors`] with an explicit rule, applied on every triangle
/// after `refine` levels of uniform 4-way subdivision.
pub fn compute_errors_with(
    space: &ArgyrisSpace,
    coeffs: &[f64],
    exact: impl Fn(Point) -> Jet,
    r: &QuadratureRule,
    refine: u32,
) -> Result<ErrorReport> {
    let mesh = space.mesh();
    if coeffs.len() != space.dofmap().total_dofs() {
        return Err(Error::DimensionMismatch {
            expected: space.dofmap().total_dofs(),
            found: coeffs.len(),
        });
    }
    let (mut l2, mut h1, mut h2) = (0.0, 0.0, 0.0);
    for t in 0..mesh.triangle_count() {
        let basis = space.basis(t);
        let local = space.local_coefficients(t, coeffs);
        for sub in subdivide(basis.vertices(), refine) {
            for (p, w) in r.mapped(sub) {
                let e = basis.eval_field(p, &local);
                let x = exact(p);
                let d = [
                    e.value - x.value,
                    e.dx - x.dx,
                    e.dy - x.dy,
                    e.dxx - x.dxx,
                    e.dxy - x.dxy,
                    e.dyy - x.dyy,
                ];
                l2 += w * d[0] * d[0];
                h1 += w * (d[1] * d[1] + d[2] * d[2]);
                h2 += w * (d[3] * d[3] + 2.0 * d[4] * d[4] + d[5] * d[5]);
            }
        }
    }
    let nodal_max = mesh
        .vertices
        .iter()
        .enumerate()
        .map(|(v, p)| (coeffs[space.dofmap().vertex_dof(v, VertexDof::Value)] - exact(*p).value).abs())
        .fold(0.0, f64::max);
    Ok(ErrorReport {
        l2: libm::sqrt(l2),
        h1_semi: libm::sqrt(h1),
        h2_semi: libm::sqrt(h2),
        nodal_max,
        quadrature_points: r.len(),
    })
}

fn subdivide(tri: [Point; 3], levels: u32) -> Vec<[Point; 3]> {
    let mut out = vec![tri];
    for _ in 0..levels {
        let mut next = Vec::with_capacity(out.len() * 4);
        for [a, b, c] in out {
            let mid = |p: Point, q: Point| [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
            let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
            next.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        out = next;
    }
    out
}

/// Jets of the computed field at `points`. Points on the boundary of the
/// square get a zero value and gradient, as the clamping requires.
pub fn evaluate_field(space: &ArgyrisSpace, coeffs: &[f64], points: &[Point]) -> Result<Vec<Jet>> {
    if coeffs.len() != space.dofmap().total_dofs() {
        return Err(Error::DimensionMismatch {
            expected: space.dofmap().total_dofs(),
            found: coeffs.len(),
        });
    }
    points
        .iter()
        .map(|&p| {
            let t = space.mesh().locate(p)?;
            let mut jet = space.basis(t).eval_field(p, &space.local_coefficients(t, coeffs));
            if Mesh::is_on_boundary(p) {
                jet.value = 0.0;
                jet.dx = 0.0;
                jet.dy = 0.0;
            }
            Ok(jet)
        })
        .collect()
}

/// `m x m` uniform sample of the field, row-major with `y` the slow index;
/// sample `(i, j)` sits at `(i / (m-1), j / (m-1))`.
pub fn sample_grid(space: &ArgyrisSpace, coeffs: &[f64], m: usize) -> Result<Vec<f64>> {
    let points = grid_points(m)?;
    Ok(evaluate_field(space, coeffs, &points)?.into_iter().map(|j| j.value).collect())
}

pub fn grid_points(m: usize) -> Result<Vec<Point>> {
    if m < 2 {
        return Err(Error::InvalidParameter("grid needs at least 2 samples per side"));
    }
    let step = 1.0 / (m - 1) as f64;
    let coord = |k: usize| if k == m - 1 { 1.0 } else { k as f64 * step };
    Ok((0..m)
        .flat_map(|j| (0..m).map(move |i| [coord(i), coord(j)]))
        .collect())
}

/// `count` equally spaced levels strictly between zero and the extreme
/// value of the field (the one with the largest magnitude).
pub fn default_levels(grid: &[f64], count: usize) -> Vec<f64> {
    let max = grid.iter().copied().fold(0.0, f64::max);
    let min = grid.iter().copied().fold(0.0, f64::min);
    let extreme = if -min > max { min } else { max };
    if extreme == 0.0 {
        return Vec::new();
    }
    (1..=count)
        .map(|k| extreme * k as f64 / (count + 1) as f64)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<Point>,
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContourSet {
    /// Samples per side.
    pub m: usize,
    pub grid: Vec<f64>,
    pub levels: Vec<f64>,
    /// `polylines[k]` belong to `levels[k]`.
    pub polylines: Vec<Vec<Polyline>>,
}

/// Grid edge on which a contour crosses: horizontal `(i, j)-(i+1, j)` or
/// vertical `(i, j)-(i, j+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum GridEdge {
    H(usize, usize),
    V(usize, usize),
}

/// Marching squares on the sampled grid with linear interpolation along
/// cell edges. Saddle cells are resolved with the cell-center average.
pub fn extract_contours(grid: Vec<f64>, m: usize, levels: &[f64]) -> Result<ContourSet> {
    if grid.len() != m * m {
        return Err(Error::DimensionMismatch {
            expected: m * m,
            found: grid.len(),
        });
    }
    let points = grid_points(m)?;
    let polylines = levels
        .iter()
        .map(|&level| trace_level(&grid, &points, m, level))
        .collect();
    Ok(ContourSet {
        m,
        grid,
        levels: levels.to_vec(),
        polylines,
    })
}

fn trace_level(grid: &[f64], points: &[Point], m: usize, level: f64) -> Vec<Polyline> {
    let val = |i: usize, j: usize| grid[j * m + i];
    let crossing = |e: GridEdge| -> Point {
        let ((i0, j0), (i1, j1)) = match e {
            GridEdge::H(i, j) => ((i, j), (i + 1, j)),
            GridEdge::V(i, j) => ((i, j), (i, j + 1)),
        };
        let (a, b) = (val(i0, j0), val(i1, j1));
        let s = (level - a) / (b - a);
        let (p, q) = (points[j0 * m + i0], points[j1 * m + i1]);
        [p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]
    };

    let mut segments: Vec<(GridEdge, GridEdge)> = Vec::new();
    for j in 0..m - 1 {
        for i in 0..m - 1 {
            let c = [val(i, j), val(i + 1, j), val(i + 1, j + 1), val(i, j + 1)];
            let above = c.map(|v| v >= level);
            let case = above
                .iter()
                .enumerate()
                .fold(0u8, |acc, (k, &b)| acc | ((b as u8) << k));
            let (bottom, right, top, left) = (GridEdge::H(i, j), GridEdge::V(i + 1, j), GridEdge::H(i, j + 1), GridEdge::V(i, j));
            match case {
                0 | 15 => {}
                1 | 14 => segments.push((left, bottom)),
                2 | 13 => segments.push((bottom, right)),
                3 | 12 => segments.push((left, right)),
                4 | 11 => segments.push((right, top)),
                6 | 9 => segments.push((bottom, top)),
                7 | 8 => segments.push((left, top)),
                5 | 10 => {
                    let center_above = (c[0] + c[1] + c[2] + c[3]) / 4.0 >= level;
                    // corners 0 and 2 share a state in case 5
                    let diagonal_02_above = case == 5;
                    if center_above == diagonal_02_above {
                        segments.push((left, top));
                        segments.push((bottom, right));
                    } else {
                        segments.push((left, bottom));
                        segments.push((right, top));
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    // Each grid edge touches at most two segments.
    let mut touching: BTreeMap<GridEdge, Vec<usize>> = BTreeMap::new();
    for (k, (a, b)) in segments.iter().enumerate() {
        touching.entry(*a).or_default().push(k);
        touching.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    let other_end = |k: usize, e: GridEdge| if segments[k].0 == e { segments[k].1 } else { segments[k].0 };
    let next_segment = |e: GridEdge, from: usize, used: &[bool]| {
        touching[&e].iter().copied().find(|&s| s != from && !used[s])
    };

    // open chains start at grid edges touched once; then the closed loops
    let starts: Vec<usize> = (0..segments.len())
        .filter(|&k| touching[&segments[k].0].len() == 1 || touching[&segments[k].1].len() == 1)
        .chain(0..segments.len())
        .collect();
    for start in starts {
        if used[start] {
            continue;
        }
        let (first, mut cursor) = if touching[&segments[start].0].len() == 1 {
            (segments[start].0, segments[start].1)
        } else {
            (segments[start].1, segments[start].0)
        };
        let open = touching[&first].len() == 1;
        used[start] = true;
        let mut edges = vec![first, cursor];
        let mut current = start;
        while let Some(s) = next_segment(cursor, current, &used) {
            used[s] = true;
            cursor = other_end(s, cursor);
            current = s;
            edges.push(cursor);
        }
        let closed = !open && cursor == first;
        if closed {
            edges.pop();
        }
        out.push(Polyline {
            points: edges.into_iter().map(crossing).collect(),
            closed,
        });
    }
    out
}

/// Samples the field and extracts iso-lines; `levels = None` picks eight
/// levels between zero and the field extreme.
pub fn contours(space: &ArgyrisSpace, coeffs: &[f64], m: usize, levels: Option<&[f64]>) -> Result<ContourSet> {
    let grid = sample_grid(space, coeffs, m)?;
    let levels = match levels {
        Some(l) => l.to_vec(),
        None => default_levels(&grid, 8),
    };
    extract_contours(grid, m, &levels)
}
