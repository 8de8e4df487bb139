//! End-to-end tests of the command implementations and file formats.

use std::fs;
use std::path::Path;
use std::process::Command;

use revsol::manifest::{ManifestEcho, RunManifest};
use revsol::runner;

fn manifest_text(a: f64, u0: f64, s_max: f64, dir: &Path) -> String {
    format!(
        r#"
version = 1

[profile]
kind = "torus"
R = 2.0
r = 1.0

[soliton]
a = {a}

[initial]
u0 = {u0}
v0 = 0.0
up0 = 0.2
vp0 = 1.0

[integrator]
method = "rkf45"
s_max = {s_max}

[output]
dir = "{}"
obj_curve = true
obj_surface = true
"#,
        dir.display()
    )
}

fn parse(text: &str) -> RunManifest {
    toml::from_str(text).unwrap()
}

#[test]
fn integrate_writes_the_full_run_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let run_dir = tmp.path().join("run");
    let m = parse(&manifest_text(0.5, 0.6, 6.0, &run_dir));
    let outcome = runner::cmd_integrate(&m, None).unwrap();
    for file in ["trajectory.csv", "report.txt", "manifest.toml", "curve.obj", "surface.obj"] {
        assert!(run_dir.join(file).is_file(), "{file} missing");
    }
    assert!(outcome.report.passed());

    // Echo lists every output with its hash, and the hashes verify.
    let failures = runner::cmd_verify_run_dir(&run_dir).unwrap();
    assert!(failures.is_empty(), "{failures:?}");
    let echo: ManifestEcho =
        toml::from_str(&fs::read_to_string(run_dir.join("manifest.toml")).unwrap()).unwrap();
    let listed: Vec<&str> = echo
        .provenance
        .outputs
        .iter()
        .map(|o| o.path.as_str())
        .collect();
    for file in ["trajectory.csv", "report.txt", "curve.obj", "surface.obj"] {
        assert!(listed.contains(&file), "{file} not in provenance");
    }
    assert_eq!(echo.provenance.manifest_sha256, m.content_hash());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let m = parse(&manifest_text(0.7, 0.9, 8.0, &tmp.path().join("unused")));
    let d1 = tmp.path().join("a");
    let d2 = tmp.path().join("b");
    runner::cmd_integrate(&m, Some(&d1)).unwrap();
    runner::cmd_integrate(&m, Some(&d2)).unwrap();
    let c1 = fs::read(d1.join("trajectory.csv")).unwrap();
    let c2 = fs::read(d2.join("trajectory.csv")).unwrap();
    assert_eq!(c1, c2);
}

#[test]
fn corrupted_output_fails_integrity() {
    let tmp = tempfile::tempdir().unwrap();
    let run_dir = tmp.path().join("run");
    let m = parse(&manifest_text(0.5, 0.6, 4.0, &run_dir));
    runner::cmd_integrate(&m, None).unwrap();

    let csv_path = run_dir.join("trajectory.csv");
    let mut text = fs::read_to_string(&csv_path).unwrap();
    text.push_str("tampered\n");
    fs::write(&csv_path, text).unwrap();

    let failures = runner::cmd_verify_run_dir(&run_dir).unwrap();
    assert_eq!(failures.len(), 1);
    assert!(failures[0].contains("trajectory.csv"));
}

#[test]
fn bad_inputs_name_the_field_and_exit_1() {
    // u0 outside the sphere's domain.
    let tmp = tempfile::tempdir().unwrap();
    let text = r#"
version = 1
[profile]
kind = "sphere"
[soliton]
a = 0.5
[initial]
u0 = 4.0
v0 = 0.0
up0 = 0.0
vp0 = 1.0
[integrator]
method = "rkf45"
s_max = 5.0
"#;
    let m: RunManifest = toml::from_str(text).unwrap();
    let err = match runner::cmd_integrate(&m, Some(&tmp.path().join("x"))) {
        Err(e) => e,
        Ok(_) => panic!("expected a usage error"),
    };
    assert_eq!(err.exit_code(), 1);
    assert!(format!("{err}").contains("initial.u0"), "{err}");

    // s_max = 0.
    let mut m2 = m.clone();
    m2.initial.u0 = 1.0;
    m2.integrator.s_max = 0.0;
    let err = match runner::cmd_integrate(&m2, Some(&tmp.path().join("y"))) {
        Err(e) => e,
        Ok(_) => panic!("expected a usage error"),
    };
    assert_eq!(err.exit_code(), 1);
    assert!(format!("{err}").contains("s_max"), "{err}");
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_revsol");
    let tmp = tempfile::tempdir().unwrap();

    // Unknown flag: usage error, exit 1.
    let out = Command::new(exe).arg("--bogus").output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    // Help and version exit 0.
    for flag in ["--help", "--version"] {
        let out = Command::new(exe).arg(flag).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{flag}");
    }

    // Bad manifest content: exit 1.
    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "version = 1\n").unwrap();
    let out = Command::new(exe)
        .args(["integrate", "--manifest"])
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    // A good manifest integrates with exit 0.
    let run_dir = tmp.path().join("run");
    let good = tmp.path().join("good.toml");
    fs::write(&good, manifest_text(0.5, 0.6, 3.0, &run_dir)).unwrap();
    let out = Command::new(exe)
        .args(["integrate", "--manifest"])
        .arg(&good)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    // Verify on the run directory succeeds; after tampering it exits 3.
    let out = Command::new(exe)
        .args(["verify", "--run-dir"])
        .arg(&run_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = run_dir.join("report.txt");
    fs::write(&report, "tampered").unwrap();
    let out = Command::new(exe)
        .args(["verify", "--run-dir"])
        .arg(&run_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_geodesic_manifest_passes_all_checks() {
    let text = r#"
version = 1
[profile]
kind = "torus"
[soliton]
a = 0.0
[initial]
u0 = 0.0
v0 = 0.0
up0 = 0.0
vp0 = 1.0
[integrator]
method = "rkf45"
s_max = 30.0
"#;
    let m: RunManifest = toml::from_str(text).unwrap();
    let report = runner::cmd_verify_manifest(&m).unwrap();
    assert!(report.passed());
    // Parallel geodesic: zero residuals where applicable.
    for c in &report.checks {
        match c.name {
            "unit-speed-drift" | "clairaut-drift" | "kappa-consistency" => {
                assert_eq!(c.residual, 0.0, "{}", c.name)
            }
            _ => {}
        }
    }
}

#[test]
fn gallery_subset_writes_summary_and_runs() {
    let tmp = tempfile::tempdir().unwrap();
    // Shortened runs: enough to exercise the machinery, not the asymptotics.
    let summary =
        runner::cmd_gallery("catenoid", tmp.path(), 2, 2.0, 1.0, Some(50.0)).unwrap();
    assert_eq!(summary.rows.len(), 4);
    assert!(summary.all_succeeded());
    assert!(tmp.path().join("summary.txt").is_file());
    for name in ["catenoid-01", "catenoid-02", "catenoid-03", "catenoid-04"] {
        assert!(tmp.path().join(name).join("trajectory.csv").is_file());
    }
}

#[test]
fn evolve_check_reports_stability_violation_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let m = parse(&manifest_text(0.5, 0.785, 8.0, &tmp.path().join("x")));
    // Fixed coarse-in-time, fine-in-space: dt breaks the bound 0.4 h^2.
    let table = runner::cmd_evolve_check(&m, 0.01, &[1e-3], Some(0.02), 12.0, None).unwrap();
    assert_eq!(table.rows.len(), 1);
    let err = table.rows[0].outcome.as_ref().unwrap_err();
    assert!(err.contains("stability"), "{err}");
}

#[test]
fn evolve_check_exports_snapshots() {
    let tmp = tempfile::tempdir().unwrap();
    let m = parse(&manifest_text(0.5, 0.785, 8.0, &tmp.path().join("x")));
    let snap_dir = tmp.path().join("snaps");
    runner::cmd_evolve_check(&m, 0.05, &[1e-3], None, 12.0, Some((4, &snap_dir))).unwrap();
    let mut times = Vec::new();
    for k in 0..=4 {
        let path = snap_dir.join(format!("snapshot_{k:03}.obj"));
        let text = fs::read_to_string(&path).unwrap();
        let t: f64 = text
            .lines()
            .next()
            .unwrap()
            .trim_start_matches("# t = ")
            .parse()
            .unwrap();
        times.push(t);
        assert!(text.lines().any(|l| l.starts_with("l ")));
    }
    assert_eq!(times[0], 0.0);
    assert!(times.windows(2).all(|w| w[1] > w[0]));
    assert!((times[4] - 0.05).abs() < 1e-12);
}

#[test]
fn file_profile_manifest_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let profile_path = tmp.path().join("slim.toml");
    fs::write(
        &profile_path,
        "name = \"slim\"\nkind = \"builtin\"\nbuiltin = \"angular-torus\"\nR = 2.0\nr = 0.5\n",
    )
    .unwrap();
    let text = format!(
        r#"
version = 1
[profile]
kind = "file"
path = "{}"
[soliton]
a = 0.8
[initial]
u0 = 0.4
v0 = 0.0
up0 = 0.5
vp0 = 1.0
[integrator]
method = "rkf45"
s_max = 5.0
"#,
        profile_path.display()
    );
    let m: RunManifest = toml::from_str(&text).unwrap();
    let out = runner::cmd_integrate(&m, Some(&tmp.path().join("run"))).unwrap();
    // The loaded profile is reparametrized to arc length.
    assert!(out.profile.unit_speed);
    assert!(out.report.passed());
}

#[test]
fn trajectory_csv_round_trips_through_parse() {
    let tmp = tempfile::tempdir().unwrap();
    let run_dir = tmp.path().join("run");
    let m = parse(&manifest_text(0.5, 0.6, 2.0, &run_dir));
    runner::cmd_integrate(&m, None).unwrap();
    let text = fs::read_to_string(run_dir.join("trajectory.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "s,u,v,up,vp,x,y,z,kappa,lambda,f,theta");
    let mut n = 0;
    for line in lines {
        let vals: Vec<f64> = line
            .split(',')
            .map(|t| t.parse::<f64>().unwrap())
            .collect();
        assert_eq!(vals.len(), 12);
        n += 1;
    }
    assert!(n > 10);
}
