use std::fs;
use std::process::{Command, Output};

use floquet_pt::cli::output::{parse_trajectory_csv, sig12, GRID_COLUMNS, TRAJECTORY_COLUMNS};
use floquet_pt::dynamics::{stroboscopic_run, InitialState};
use floquet_pt::models::{canonical_protocol, mhz_to_rad_per_s};
use floquet_pt::DimensionlessPoint;

fn fpt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpt"))
        .args(args)
        .env_remove("FPT_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn classify_exit_codes_follow_the_phase() {
    let o = fpt(&["classify", "--omega-t0", "0.5", "--gamma-t1", "0.3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PTSP "));

    let o = fpt(&["classify", "--omega-t0", "0.05", "--gamma-t1", "0.68"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("PTBP "));

    let o = fpt(&["classify", "--omega-t0", "0", "--gamma-t1", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("EP D=1.00000000000e0"));
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        &["classify", "--omega-t0", "x", "--gamma-t1", "1"][..],
        &["classify", "--omega-t0", "1"],
        &["classify", "--omega-t0", "-1", "--gamma-t1", "1"],
        &["simulate", "--omega-t0", "1"],
        &[
            "simulate",
            "--omega-t0",
            "1",
            "--gamma-t1",
            "1",
            "--t0-us",
            "2",
        ],
        &["frobnicate"],
    ] {
        assert_eq!(fpt(args).status.code(), Some(64), "{args:?}");
    }
    assert_eq!(fpt(&["--help"]).status.code(), Some(0));
    assert_eq!(fpt(&["--version"]).status.code(), Some(0));
}

#[test]
fn simulate_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out/traj.csv");
    let o = fpt(&[
        "simulate",
        "--omega-t0",
        "0.5",
        "--gamma-t1",
        "0.3",
        "--periods",
        "40",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# fpt "));
    assert!(text.contains("# omega_t0 = 0.5"));
    assert!(text.lines().any(|l| l == TRAJECTORY_COLUMNS));

    let parsed = parse_trajectory_csv(&text).unwrap();
    let omega = mhz_to_rad_per_s(0.1);
    let protocol =
        canonical_protocol(DimensionlessPoint::new(0.5, 0.3).unwrap(), omega, omega).unwrap();
    let direct = stroboscopic_run(&protocol, &InitialState::ground(), 40);
    assert_eq!(parsed.len(), 41);
    for (p, d) in parsed.iter().zip(&direct.samples) {
        assert_eq!(p.n, d.n);
        for (x, y) in [
            (p.t, d.t),
            (p.p0_raw, d.p0_raw),
            (p.p1_raw, d.p1_raw),
            (p.norm, d.norm),
            (p.p0_norm, d.p0_norm),
            (p.p1_norm, d.p1_norm),
        ] {
            assert_eq!(sig12(x), sig12(y));
        }
    }
}

#[test]
fn zero_periods_gives_one_row() {
    let o = fpt(&[
        "simulate",
        "--omega-t0",
        "0.5",
        "--gamma-t1",
        "0.3",
        "--periods",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = parse_trajectory_csv(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].p0_raw, 1.0);
}

#[test]
fn physical_units_match_dimensionless() {
    // Ω = 2π·0.1 MHz, t₀ = 0.5/Ω
    let omega = mhz_to_rad_per_s(0.1);
    let t0_us = 0.5 / omega * 1e6;
    let t1_us = 0.3 / omega * 1e6;
    let a = fpt(&[
        "simulate",
        "--omega-t0",
        "0.5",
        "--gamma-t1",
        "0.3",
        "--periods",
        "5",
    ]);
    let b = fpt(&[
        "simulate",
        "--t0-us",
        &t0_us.to_string(),
        "--t1-us",
        &t1_us.to_string(),
        "--periods",
        "5",
    ]);
    let ra = parse_trajectory_csv(&stdout(&a)).unwrap();
    let rb = parse_trajectory_csv(&stdout(&b)).unwrap();
    for (x, y) in ra.iter().zip(&rb) {
        assert!((x.p0_raw - y.p0_raw).abs() < 1e-10);
    }
}

#[test]
fn unwritable_output_exits_73() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let target = blocker.join("sub/out.csv");
    let o = fpt(&[
        "simulate",
        "--omega-t0",
        "0.5",
        "--gamma-t1",
        "0.3",
        "--output",
        target.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(73));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# fixture\nomega-t0 = 0.5\ngamma-t1 = 0.3\n").unwrap();
    let o = fpt(&["classify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = fpt(&[
        "classify",
        "--config",
        cfg.to_str().unwrap(),
        "--gamma-t1",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("gamma_t1=5.0"));
}

#[test]
fn phase_diagram_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("pd.csv");
    let svg = dir.path().join("pd.svg");
    let o = Command::new(env!("CARGO_BIN_EXE_fpt"))
        .args([
            "phase-diagram",
            "--omega-count",
            "9",
            "--gamma-count",
            "7",
            "--output",
            csv.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
        ])
        .env("FPT_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    let mut rows = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(rows.next(), Some(GRID_COLUMNS));
    assert_eq!(rows.count(), 63);
    let pic = fs::read_to_string(&svg).unwrap();
    assert!(pic.starts_with("<svg") && pic.contains("<polyline"));
}

#[test]
fn decay_map_json_parses() {
    let o = fpt(&[
        "decay-map",
        "--omega-count",
        "4",
        "--gamma-count",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["command"], "decay-map");
    assert_eq!(doc["grid"]["cells"].as_array().unwrap().len(), 12);
}

#[test]
fn boundary_skips_out_of_domain_samples() {
    let o = fpt(&["boundary", "--at", "0.5,4.0,1.0"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<_> = stdout(&o)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(String::from)
        .collect();
    assert_eq!(rows.len(), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("4.0"));
    assert_eq!(fpt(&["boundary", "--at", "4.0"]).status.code(), Some(65));
}

#[test]
fn three_level_validation_reports_and_warns() {
    let o = fpt(&["validate-three-level"]);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o);
    assert!(line.contains("valid=yes"), "{line}");
    // Ω′/Ω = 2 is below the elimination threshold
    let o = fpt(&["validate-three-level", "--omega-prime-mhz", "0.2"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn square_wave_emits_both_channels() {
    let o = fpt(&[
        "square-wave",
        "--periods",
        "3",
        "--samples-per-segment",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = parse_trajectory_csv(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 3 * 2 * 4 + 1);
    assert!(rows
        .windows(2)
        .all(|w| w[1].norm <= w[0].norm * (1.0 + 1e-12)));
}
