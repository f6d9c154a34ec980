//! The command-line front end: exit codes, outputs and determinism.

use std::path::Path;
use std::process::{Command, Output};

use trunc_ivp::config::ConstantsConfig;
use trunc_ivp::experiments::plan_constants;
use trunc_ivp_core::instances::make_lp_sin;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_trunc-ivp"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    rdr.records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

fn headers(path: &Path) -> Vec<String> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    rdr.headers().unwrap().iter().map(String::from).collect()
}

const SOLVE: &str =
    r#"{"instance": {"label": "lp_sin", "p": 2.0}, "r": 1, "n": [64], "dims": [64]}"#;

#[test]
fn solve_is_bit_identical_and_within_bound() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "solve.json", SOLVE);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for out in [&a, &b] {
        let o = run(&["solve", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let ta = std::fs::read(a.join("trajectory.csv")).unwrap();
    let tb = std::fs::read(b.join("trajectory.csv")).unwrap();
    assert_eq!(ta, tb);
    assert_eq!(
        headers(&a.join("trajectory.csv")),
        ["t", "component", "value"]
    );

    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(a.join("record.json")).unwrap()).unwrap();
    let rec = &json["records"][0];
    let err = rec["error"].as_f64().unwrap();
    let inst = make_lp_sin(2.0).unwrap();
    let (big_a, big_b) = plan_constants(&inst, ConstantsConfig::Radius);
    assert!(err <= big_a / 8.0 + big_b / 64.0);
    assert_eq!(rec["cost"], rec["cost_formula"]);
    assert_eq!(rec["cost"].as_f64().unwrap(), 64.0 * 64.0 * 64.0);
}

#[test]
fn zero_field_samples_equal_initial_values() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "zero.json",
        r#"{"instance": {"label": "zero"}, "r": 2, "n": [10], "dims": [5], "components": 5}"#,
    );
    let out = tmp.path().join("out");
    let o = run(&["solve", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv(&out.join("trajectory.csv"));
    assert_eq!(rows.len(), (10 * 7 + 1) * 5);
    assert!(rows.iter().all(|r| r[2] == "1.0"));
}

#[test]
fn samples_round_trip_bit_exactly() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "solve.json", SOLVE);
    let out = tmp.path().join("out");
    assert!(
        run(&["solve", "--config", &cfg, "--out", out.to_str().unwrap()])
            .status
            .success()
    );
    let inst = make_lp_sin(2.0).unwrap();
    let mesh = trunc_ivp_core::integrator::Mesh::uniform(0.0, 1.0, 64).unwrap();
    let sched = trunc_ivp_core::integrator::TruncationSchedule::uniform(64, 64).unwrap();
    let (traj, _) = trunc_ivp_core::integrator::solve(
        &inst,
        &mesh,
        &sched,
        1,
        trunc_ivp_core::integrator::CostFn::power(1.0),
    )
    .unwrap();
    let rows = read_csv(&out.join("trajectory.csv"));
    let last = rows.iter().rev().find(|r| r[1] == "1").unwrap();
    assert_eq!(last[0].parse::<f64>().unwrap(), 1.0);
    assert_eq!(
        last[2].parse::<f64>().unwrap().to_bits(),
        traj.knot(64).get(1).to_bits()
    );
}

#[test]
fn invalid_config_names_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        (
            r#"{"instance": {"label": "lp_sin", "p": 0.5}, "n": [4], "dims": [4]}"#,
            "instance.p",
        ),
        (
            r#"{"instance": {"label": "lp_sin"}, "n": [4, 0], "dims": [4]}"#,
            "n[1]",
        ),
        (
            r#"{"instance": {"label": "lp_sin"}, "n": [4], "dims": [4], "beta": -1}"#,
            "beta",
        ),
        (
            r#"{"instance": {"label": "lp_sin"}, "n": [4], "dims": [4], "samples_per_interval": 2}"#,
            "samples_per_interval",
        ),
        (
            r#"{"instance": {"label": "nope"}, "n": [4], "dims": [4]}"#,
            "instance.label",
        ),
        (r#"{"instance": {"label": "lp_sin"}, "n": [4]}"#, "dims"),
        (
            r#"{"instance": {"label": "lp_sin"}, "n": [4], "dims": [4], "bogus": 1}"#,
            "bogus",
        ),
    ];
    for (i, (body, field)) in cases.iter().enumerate() {
        let cfg = write_config(tmp.path(), &format!("bad{i}.json"), body);
        let o = run(&[
            "solve",
            "--config",
            &cfg,
            "--out",
            tmp.path().to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(1), "{body}");
        assert!(stderr(&o).contains(field), "{body}: {}", stderr(&o));
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(
        run(&["solve", "--config", "/nonexistent/x.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["verify", "--only", "6"]).status.code(), Some(0));
    assert_eq!(run(&["verify", "--only", "12"]).status.code(), Some(1));
}

#[test]
fn help_documents_csv_schemas() {
    let o = run(&["converge", "--help"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("n,dim,r,error,local_order,bound_total,ball_sup,radius,evaluations,cost"));
    let o = run(&["lowerbound", "--help"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("case,n,dim,r,guaranteed_gap"));
}

#[test]
fn converge_and_truncate_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "conv.json",
        r#"{"instance": {"label": "lp_sin"}, "r": 2, "n": [16, 32, 64, 128], "dims": [256], "tail": "projected"}"#,
    );
    let out = tmp.path().join("conv");
    let o = run(&[
        "converge",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--threads",
        "2",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let fit = read_csv(&out.join("converge_fit.csv"));
    let slope: f64 = fit[0][1].parse().unwrap();
    assert!((slope - 2.0).abs() < 0.3, "{slope}");
    assert_eq!(read_csv(&out.join("converge.csv")).len(), 4);

    let cfg = write_config(
        tmp.path(),
        "trunc.json",
        r#"{"instance": {"label": "lp_sin", "p": 2.0}, "n": [512], "dims": [8, 16, 32, 64, 128]}"#,
    );
    let out = tmp.path().join("trunc");
    let o = run(&["truncate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let slope: f64 = read_csv(&out.join("truncate_fit.csv"))[0][1]
        .parse()
        .unwrap();
    assert!((slope + 0.5).abs() < 0.15, "{slope}");
}

#[test]
fn truncate_needs_exact_solution() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "fs.json",
        r#"{"instance": {"label": "finite_support", "n0": 8}, "n": [64], "dims": [8, 16, 32]}"#,
    );
    let o = run(&[
        "truncate",
        "--config",
        &cfg,
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("instance.label"));
}

#[test]
fn finite_support_is_flat_beyond_its_support() {
    // Dimensions past the support add no information: the output is the
    // discretization floor itself, byte for byte.
    let tmp = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for d in [8, 16, 32] {
        let cfg = write_config(
            tmp.path(),
            &format!("fs{d}.json"),
            &format!(
                r#"{{"instance": {{"label": "finite_support", "n0": 8}}, "r": 2, "n": [64], "dims": [{d}]}}"#
            ),
        );
        let out = tmp.path().join(format!("fs{d}"));
        let o = run(&["solve", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push(std::fs::read(out.join("trajectory.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn workprecision_and_lowerbound() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "wp.json",
        r#"{"instance": {"label": "lp_sin"}, "epsilon": [0.125, 0.0625, 0.03125], "beta": 1, "constants": {"source": "lp_sin_certified"}}"#,
    );
    let out = tmp.path().join("wp");
    let o = run(&[
        "workprecision",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv(&out.join("workprecision.csv"));
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[9] == "true"));

    let cfg = write_config(
        tmp.path(),
        "lb.json",
        r#"{"instance": {"label": "case3"}, "r": 1, "n": [32, 64, 128], "dims": [4]}"#,
    );
    let out = tmp.path().join("lb");
    let o = run(&[
        "lowerbound",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
    ]);
    // δ(4) exceeds M for these weights, so the right-hand-side witness is
    // refused as a numerical failure naming the problem.
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("delta"));

    let cfg = write_config(
        tmp.path(),
        "lb2.json",
        r#"{"instance": {"label": "case3"}, "r": 1, "n": [32, 64, 128], "dims": [20000]}"#,
    );
    let o = run(&[
        "lowerbound",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv(&out.join("lowerbound.csv"));
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r[9] == "true"));
    let scaled: Vec<f64> = rows
        .iter()
        .filter(|r| r[0] == "case3")
        .map(|r| r[7].parse().unwrap())
        .collect();
    let max = scaled.iter().cloned().fold(0.0, f64::max);
    let min = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(max / min <= 2.0);
}

#[test]
fn shipped_configs_are_valid() {
    use trunc_ivp::{Command as Cmd, ExperimentConfig};
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        let cmd = match name.split('_').next().unwrap().trim_end_matches(".json") {
            "converge" => Cmd::Converge,
            "truncate" => Cmd::Truncate,
            "workprecision" => Cmd::WorkPrecision,
            "lowerbound" => Cmd::LowerBound,
            _ => Cmd::Solve,
        };
        let cfg = ExperimentConfig::load(&path).unwrap();
        cfg.validate(cmd).unwrap_or_else(|e| panic!("{name}: {e}"));
        seen += 1;
    }
    assert!(seen >= 5);
}
