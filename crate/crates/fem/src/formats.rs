//! Text and image formats: Matrix Market, CSV, PBM, SVG and `key = value`
//! reports. Floating-point values are written with Rust's shortest
//! round-trip representation so outputs are reproducible bit for bit.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use argyris_core::analysis::{ContourSet, ErrorReport};
use argyris_core::mesh::{DofEntity, DofMap, Mesh};
use argyris_core::picard::PicardTrace;
use argyris_core::solvers::{SolveReport, SolveStatus};
use argyris_core::sparse::{bandwidth_stats, CsrMatrix};

use crate::{io_err, FemError, Result};

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(io_err(path))
}

// ---- Matrix Market ----

pub fn write_matrix_market(out: &mut impl Write, a: &CsrMatrix) -> std::io::Result<()> {
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(out, "{} {} {}", a.dim(), a.dim(), a.nnz())?;
    for (i, j, v) in a.entries() {
        writeln!(out, "{} {} {:e}", i + 1, j + 1, v)?;
    }
    Ok(())
}

pub fn matrix_market_string(a: &CsrMatrix) -> String {
    let mut buf = Vec::new();
    write_matrix_market(&mut buf, a).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

/// Reads a square real coordinate matrix, `general` or `symmetric`.
pub fn read_matrix_market(input: impl BufRead) -> Result<CsrMatrix> {
    let mut lines = input.lines().enumerate();
    let perr = |line: usize, message: &str| FemError::Parse {
        line: line + 1,
        message: message.to_string(),
    };
    let (k, header) = lines.next().ok_or_else(|| perr(0, "empty input"))?;
    let header = header.map_err(io_err("<matrix market>"))?.to_ascii_lowercase();
    let words: Vec<&str> = header.split_whitespace().collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" || words[2] != "coordinate" || words[3] != "real" {
        return Err(perr(k, "expected a real coordinate Matrix Market header"));
    }
    let symmetric = match words[4] {
        "general" => false,
        "symmetric" => true,
        _ => return Err(perr(k, "only general and symmetric matrices are supported")),
    };
    let mut size: Option<(usize, usize)> = None;
    let mut triplets = Vec::new();
    for (k, line) in lines {
        let line = line.map_err(io_err("<matrix market>"))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let f: Vec<&str> = t.split_whitespace().collect();
        match size {
            None => {
                if f.len() != 3 {
                    return Err(perr(k, "expected rows cols nnz"));
                }
                let p = |s: &str| s.parse::<usize>().map_err(|_| perr(k, "invalid size"));
                let (r, c, nnz) = (p(f[0])?, p(f[1])?, p(f[2])?);
                if r != c {
                    return Err(perr(k, "matrix is not square"));
                }
                size = Some((r, nnz));
            }
            Some((dim, _)) => {
                if f.len() != 3 {
                    return Err(perr(k, "expected i j value"));
                }
                let i = f[0].parse::<usize>().map_err(|_| perr(k, "invalid row"))?;
                let j = f[1].parse::<usize>().map_err(|_| perr(k, "invalid column"))?;
                let v = f[2].parse::<f64>().map_err(|_| perr(k, "invalid value"))?;
                if i == 0 || j == 0 || i > dim || j > dim {
                    return Err(perr(k, "index out of range"));
                }
                triplets.push((i - 1, j - 1, v));
                if symmetric && i != j {
                    triplets.push((j - 1, i - 1, v));
                }
            }
        }
    }
    let (dim, nnz) = size.ok_or_else(|| perr(0, "missing size line"))?;
    let stored = if symmetric {
        triplets.iter().filter(|(i, j, _)| i <= j).count()
    } else {
        triplets.len()
    };
    if stored != nnz {
        return Err(perr(0, "entry count does not match the size line"));
    }
    Ok(CsrMatrix::from_triplets(dim, triplets)?)
}

// ---- CSV ----

pub fn mesh_vertices_csv(mesh: &Mesh) -> String {
    let mut s = String::from("vertex,x,y,on_boundary\n");
    for (v, p) in mesh.vertices.iter().enumerate() {
        let _ = writeln!(s, "{v},{:e},{:e},{}", p[0], p[1], mesh.vertex_on_boundary[v] as u8);
    }
    s
}

pub fn mesh_triangles_csv(mesh: &Mesh) -> String {
    let mut s = String::from("triangle,v0,v1,v2,e0,e1,e2\n");
    for (t, (tri, e)) in mesh.triangles.iter().zip(&mesh.triangle_edges).enumerate() {
        let _ = writeln!(s, "{t},{},{},{},{},{},{}", tri[0], tri[1], tri[2], e[0], e[1], e[2]);
    }
    s
}

pub fn dofmap_csv(map: &DofMap) -> String {
    let mut s = String::from("dof,entity,index,kind,constrained\n");
    for g in 0..map.total_dofs() {
        let (entity, index, kind) = match map.entity(g) {
            DofEntity::Vertex { vertex, dof } => ("vertex", vertex, dof.name()),
            DofEntity::Edge(edge) => ("edge", edge, "dn"),
        };
        let _ = writeln!(s, "{g},{entity},{index},{kind},{}", map.is_constrained(g) as u8);
    }
    s
}

pub fn vector_csv(header: &str, values: &[f64]) -> String {
    let mut s = format!("index,{header}\n");
    for (k, v) in values.iter().enumerate() {
        let _ = writeln!(s, "{k},{v:e}");
    }
    s
}

pub fn residual_history_csv(report: &SolveReport) -> String {
    let mut s = String::from("half_step,relative_residual\n");
    for (k, r) in report.residual_history.iter().enumerate() {
        let _ = writeln!(s, "{k},{r:e}");
    }
    s
}

/// One row per outer iteration; row 0 is the seeding solve.
pub fn trace_csv(trace: &PicardTrace) -> String {
    let mut s = String::from("iteration,update_norm,residual,inner_iterations,inner_status,flops\n");
    let _ = writeln!(
        s,
        "0,,,{},{},{}",
        trace.seed.iterations(),
        status_name(trace.seed.status),
        trace.seed.ops.flops
    );
    for r in &trace.records {
        let _ = writeln!(
            s,
            "{},{:e},{:e},{},{},{}",
            r.iteration,
            r.update_norm,
            r.residual,
            r.solve.iterations(),
            status_name(r.solve.status),
            r.solve.ops.flops
        );
    }
    s
}

/// Sampled grid, row-major with `y` the slow index.
pub fn grid_csv(set: &ContourSet) -> String {
    let m = set.m;
    let points = argyris_core::analysis::grid_points(m).expect("contour grids have m >= 2");
    let mut s = String::from("i,j,x,y,psi\n");
    for j in 0..m {
        for i in 0..m {
            let p = points[j * m + i];
            let _ = writeln!(s, "{i},{j},{:e},{:e},{:e}", p[0], p[1], set.grid[j * m + i]);
        }
    }
    s
}

pub fn contour_csv(set: &ContourSet) -> String {
    let mut s = String::from("level_index,level,polyline,closed,point,x,y\n");
    for (k, (lines, level)) in set.polylines.iter().zip(&set.levels).enumerate() {
        for (l, line) in lines.iter().enumerate() {
            for (q, p) in line.points.iter().enumerate() {
                let _ = writeln!(s, "{k},{level:e},{l},{},{q},{:e},{:e}", line.closed as u8, p[0], p[1]);
            }
        }
    }
    s
}

// ---- key = value reports ----

pub fn status_name(status: SolveStatus) -> String {
    match status {
        SolveStatus::Converged => "converged".into(),
        SolveStatus::MaxIterations => "max_iterations".into(),
        SolveStatus::Breakdown(b) => format!("breakdown_{b:?}").to_ascii_lowercase(),
    }
}

/// Everything in a solve report except its wall time.
pub fn solve_report_text(report: &SolveReport) -> String {
    let o = &report.ops;
    format!(
        "method = {:?}\nstatus = {}\nconverged = {}\niterations = {}\nfinal_residual = {:e}\nflops = {}\nmatvecs = {}\ninner_products = {}\nresidual_norms = {}\nresidual_matvecs = {}\n",
        report.method,
        status_name(report.status),
        report.converged(),
        report.iterations(),
        report.final_residual,
        o.flops,
        o.matvecs,
        o.inner_products,
        o.residual_norms,
        o.residual_matvecs
    )
}

pub fn error_report_text(e: &ErrorReport) -> String {
    format!(
        "l2 = {:e}\nh1_semi = {:e}\nh2_semi = {:e}\nnodal_max = {:e}\nquadrature_points = {}\n",
        e.l2, e.h1_semi, e.h2_semi, e.nodal_max, e.quadrature_points
    )
}

pub fn timing_text(entries: &[(&str, f64)]) -> String {
    entries.iter().map(|(k, v)| format!("{k} = {v:e}\n")).collect()
}

/// Parses a `key = value` report back into pairs.
pub fn parse_report(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

// ---- images ----

/// Plain PBM: one pixel per matrix entry, black where an entry is stored.
pub fn sparsity_pbm(a: &CsrMatrix) -> String {
    let n = a.dim();
    let mut s = format!("P1\n# bandwidth {}\n{n} {n}\n", bandwidth_stats(a).bandwidth);
    for row in a.pattern() {
        let line: Vec<&str> = row.iter().map(|&b| if b { "1" } else { "0" }).collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s
}

pub fn sparsity_svg(a: &CsrMatrix, title: &str) -> String {
    let n = a.dim().max(1);
    let stats = bandwidth_stats(a);
    let cell = (600.0 / n as f64).clamp(1.0, 20.0);
    let side = cell * n as f64;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.2}" height="{:.2}" viewBox="0 -40 {side:.2} {:.2}">"#,
        side,
        side + 40.0,
        side + 40.0
    );
    let _ = writeln!(
        s,
        r#"<text x="0" y="-22" font-family="monospace" font-size="14">{}</text>"#,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<text x="0" y="-6" font-family="monospace" font-size="12">dim {} nnz {} bandwidth {} profile {}</text>"#,
        a.dim(),
        stats.nnz,
        stats.bandwidth,
        stats.profile
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{side:.2}" height="{side:.2}" fill="white" stroke="gray"/>"#);
    for (i, j, _) in a.entries() {
        let _ = writeln!(
            s,
            r#"<rect x="{:.2}" y="{:.2}" width="{cell:.2}" height="{cell:.2}" fill="black"/>"#,
            j as f64 * cell,
            i as f64 * cell
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Iso-lines on the unit square; `y` points up.
pub fn contours_svg(set: &ContourSet, title: &str) -> String {
    let size = 500.0;
    let margin = 40.0;
    let map = |p: [f64; 2]| (margin + p[0] * size, margin + (1.0 - p[1]) * size);
    let mut s = String::new();
    let total = size + 2.0 * margin;
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" viewBox="0 0 {total} {total}">"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{margin}" y="24" font-family="monospace" font-size="14">{}</text>"#,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{margin}" y="{margin}" width="{size}" height="{size}" fill="none" stroke="black"/>"#
    );
    let count = set.levels.len().max(1);
    for (k, (lines, level)) in set.polylines.iter().zip(&set.levels).enumerate() {
        let shade = 40 + (180 * k / count) as u32;
        let colour = format!("rgb({shade},60,{})", 255 - shade);
        for line in lines {
            if line.points.is_empty() {
                continue;
            }
            let pts: Vec<String> = line
                .points
                .iter()
                .map(|&p| {
                    let (x, y) = map(p);
                    format!("{x:.3},{y:.3}")
                })
                .collect();
            let tag = if line.closed { "polygon" } else { "polyline" };
            let _ = writeln!(
                s,
                r#"<{tag} points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#,
                pts.join(" ")
            );
            // label at the point furthest right, where curves rarely crowd
            let anchor = line
                .points
                .iter()
                .copied()
                .fold(line.points[0], |a, p| if p[0] > a[0] { p } else { a });
            let (x, y) = map(anchor);
            let _ = writeln!(
                s,
                r#"<text x="{:.3}" y="{y:.3}" font-family="monospace" font-size="10" fill="{colour}">{}</text>"#,
                x + 2.0,
                sig6(*level)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Six significant digits in scientific notation.
pub fn sig6(v: f64) -> String {
    format!("{v:.5e}")
}
