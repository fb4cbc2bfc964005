use std::path::Path;
use std::process::{Command, Output};

use argyris_core::analysis::{evaluate_field, grid_points};
use argyris_fem::commands::run_nse;
use argyris_fem::config::RunConfig;
use argyris_fem::formats::{parse_report, read_matrix_market};

fn cli(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_argyris-fem"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn names(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

#[test]
fn mesh_info_single_cell() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = cli(&["mesh-info", "--n", "1", "--out-dir", out.to_str().unwrap()], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    for line in ["vertices = 4", "triangles = 2", "edges = 5", "dofs = 29"] {
        assert!(text.contains(line), "{text}");
    }
    assert_eq!(
        names(&out),
        ["mesh_n1_o1_dofs.csv", "mesh_n1_o1_summary.txt", "mesh_n1_o1_triangles.csv", "mesh_n1_o1_vertices.csv"]
    );
    let dofs = std::fs::read_to_string(out.join("mesh_n1_o1_dofs.csv")).unwrap();
    assert_eq!(dofs.lines().count(), 30);
}

#[test]
fn every_command_writes_only_under_out_dir() {
    let cwd = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    let o = out.path().to_str().unwrap();
    for args in [
        vec!["mesh-info", "--n", "2"],
        vec!["solve-biharmonic", "--n", "2"],
        vec!["solve-nse", "--n", "2"],
        vec!["compare-orderings", "--n", "2"],
        vec!["export-sparsity", "--n", "2"],
        vec!["export-contours", "--n", "2", "--grid", "17"],
        vec!["convergence-table", "--sizes", "2", "--nqp", "6"],
    ] {
        let mut full = args.clone();
        full.extend(["--out-dir", o]);
        let r = cli(&full, cwd.path());
        assert!(r.status.success(), "{args:?}: {}", String::from_utf8_lossy(&r.stderr));
    }
    assert!(names(cwd.path()).is_empty());
    assert!(names(out.path()).len() >= 20);
}

#[test]
fn invalid_arguments_exit_nonzero_with_usage() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o_str = out.to_str().unwrap();
    for args in [
        vec!["solve-nse", "--bogus"],
        vec!["solve-nse", "--nqp", "5", "--out-dir", o_str],
        vec!["solve-nse", "--ordering", "4", "--out-dir", o_str],
        vec!["solve-nse", "--re", "-1", "--out-dir", o_str],
        vec!["no-such-command"],
    ] {
        let r = cli(&args, dir.path());
        assert_eq!(r.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&r.stderr);
        assert!(err.contains("Usage") || err.contains("--help"), "{err}");
    }
    assert!(!out.exists());
}

#[test]
fn nonconvergence_exits_nonzero_and_keeps_the_trace() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().to_str().unwrap();
    let r = cli(&["solve-nse", "--n", "5", "--max-outer", "1", "--tol", "1e-9", "--out-dir", o], dir.path());
    assert_eq!(r.status.code(), Some(1));
    let trace = std::fs::read_to_string(dir.path().join("nse_n5_q6_o1_trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 3);
    assert!(stdout(&r).contains("MaxOuterIterations"));
}

#[test]
fn config_file_sits_between_defaults_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# sweep\nn = 2\nnqp = 25\nordering = 2\n").unwrap();
    let o = dir.path().join("o");
    let r = cli(
        &["solve-biharmonic", "--config", cfg.to_str().unwrap(), "--ordering", "3", "--out-dir", o.to_str().unwrap()],
        dir.path(),
    );
    assert!(r.status.success());
    let report = std::fs::read_to_string(o.join("biharmonic_n2_q25_o3_report.txt")).unwrap();
    let pairs = parse_report(&report);
    let get = |k: &str| pairs.iter().find(|(a, _)| a == k).map(|(_, v)| v.clone()).unwrap();
    assert_eq!(get("n"), "2");
    assert_eq!(get("nqp"), "25");
    assert_eq!(get("ordering"), "3");
    assert_eq!(get("status"), "converged");

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    let r = cli(&["solve-biharmonic", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn sparsity_exports_agree_with_each_other() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().to_str().unwrap();
    let mut bandwidths = Vec::new();
    for ord in ["1", "2"] {
        let r = cli(&["export-sparsity", "--n", "5", "--ordering", ord, "--out-dir", o], dir.path());
        assert!(r.status.success());
        let bw: usize = stdout(&r)
            .lines()
            .find_map(|l| l.strip_prefix("bandwidth = "))
            .unwrap()
            .parse()
            .unwrap();
        bandwidths.push(bw);
        let stem = dir.path().join(format!("sparsity_n5_q6_o{ord}"));
        let mtx = std::fs::File::open(stem.with_extension("mtx")).unwrap();
        let a = read_matrix_market(std::io::BufReader::new(mtx)).unwrap();
        let pbm = std::fs::read_to_string(stem.with_extension("pbm")).unwrap();
        let mut lines = pbm.lines();
        assert_eq!(lines.next(), Some("P1"));
        assert_eq!(lines.next().unwrap(), format!("# bandwidth {bw}"));
        assert_eq!(lines.next().unwrap(), format!("{} {}", a.dim(), a.dim()));
        let pattern = a.pattern();
        for (i, line) in lines.enumerate() {
            let row: Vec<bool> = line.split(' ').map(|c| c == "1").collect();
            assert_eq!(row, pattern[i]);
        }
        let svg = std::fs::read_to_string(stem.with_extension("svg")).unwrap();
        assert!(svg.contains(&format!("bandwidth {bw}")));
    }
    assert!(bandwidths[1] > bandwidths[0]);
}

#[test]
fn contour_grid_matches_point_evaluation_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().to_str().unwrap();
    let r = cli(&["export-contours", "--n", "3", "--grid", "16", "--out-dir", o], dir.path());
    assert!(r.status.success());
    let csv = std::fs::read_to_string(dir.path().join("contours_n3_q6_o1_grid.csv")).unwrap();
    let values: Vec<f64> = csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();

    let c = RunConfig { n: 3, ..RunConfig::default() };
    let run = run_nse(&c).unwrap();
    let jets = evaluate_field(&run.disc.space, &run.full, &grid_points(16).unwrap()).unwrap();
    assert_eq!(values.len(), 256);
    for (v, j) in values.iter().zip(&jets) {
        assert_eq!(v.to_bits(), j.value.to_bits());
    }
    let svg = std::fs::read_to_string(dir.path().join("contours_n3_q6_o1.svg")).unwrap();
    assert!(svg.contains("<polygon"));
}

#[test]
fn flipped_convention_flips_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().to_str().unwrap();
    for extra in [None, Some("--flip-sign-convention")] {
        let mut args = vec!["solve-nse", "--n", "3", "--out-dir", o];
        args.extend(extra);
        assert!(cli(&args, dir.path()).status.success());
    }
    let read = |name: &str| -> Vec<f64> {
        std::fs::read_to_string(dir.path().join(name))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect()
    };
    let (a, b) = (read("nse_n3_q6_o1_solution.csv"), read("nse_n3_q6_o1_flip_solution.csv"));
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    // the convective force term keeps its sign, so the flip is approximate
    for (x, y) in a.iter().zip(&b) {
        assert!((x + y).abs() <= 5e-2 * scale);
    }
    let err = |name: &str| {
        parse_report(&std::fs::read_to_string(dir.path().join(name)).unwrap())
            .into_iter()
            .find(|(k, _)| k == "l2")
            .map(|(_, v)| v.parse::<f64>().unwrap())
            .unwrap()
    };
    let (ea, eb) = (err("nse_n3_q6_o1_report.txt"), err("nse_n3_q6_o1_flip_report.txt"));
    assert!((ea - eb).abs() <= 1e-3 * ea, "{ea} {eb}");
}
