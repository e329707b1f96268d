//! Command-line contract tests: exit-code discipline, config echo round
//! trips, custom observable files, and shot-mode artifacts.

use std::path::Path;
use std::process::Command;

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_thermavg")
}

fn run(args: &[&str]) -> std::process::Output {
    Command::new(binary()).args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let output = run(args);
    assert!(
        output.status.success(),
        "thermavg {args:?} failed:\n{}{}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn summary_value(out_dir: &Path, key: &str) -> String {
    let text = std::fs::read_to_string(out_dir.join("summary.txt")).expect("summary exists");
    let prefix = format!("# {key} = ");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("summary lacks {key}:\n{text}"))
        .to_string()
}

#[test]
fn exit_codes_follow_the_discipline() {
    // 2: malformed config value, message names the key.
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "layers = x\n").unwrap();
    let output = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("layers"), "{stderr}");
    assert!(stderr.contains("line 1"), "{stderr}");

    // 2: unknown key.
    std::fs::write(&cfg, "bogus.key = 1\n").unwrap();
    assert_eq!(run(&["solve", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));

    // 3: missing files.
    assert_eq!(run(&["solve", "--config", "/no/such/file.cfg"]).status.code(), Some(3));
    assert_eq!(
        run(&["sweep", "--out", dir.path().join("empty").to_str().unwrap()]).status.code(),
        Some(3)
    );

    // 2: clap-level argument errors.
    assert_eq!(run(&["not-a-command"]).status.code(), Some(2));

    // 1: failing validation; 2: unknown fault name.
    assert_eq!(
        run(&["validate", "--quick", "--break", "gradient"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["validate", "--quick", "--break", "bogus"]).status.code(),
        Some(2)
    );
}

#[test]
fn validate_quick_passes_and_reports_lines() {
    let start = std::time::Instant::now();
    let stdout = run_ok(&["validate", "--quick"]);
    let elapsed = start.elapsed().as_secs_f64();
    assert_eq!(stdout.matches("[PASS]").count(), 22, "{stdout}");
    assert!(stdout.contains("22/22 checks passed"), "{stdout}");
    assert!(elapsed < 60.0, "quick suite took {elapsed:.1}s");
}

#[test]
fn summary_config_echo_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    run_ok(&[
        "solve",
        "--out",
        first.to_str().unwrap(),
        "ansatz.layers=1",
        "--mixing.family=geometric",
        "--mixing.param=0.7",
        "optimizer.max_iterations=50",
    ]);
    // Re-run with the produced summary as the config; only the output
    // directory changes. The echoed configuration must be identical.
    let second = dir.path().join("second");
    run_ok(&[
        "solve",
        "--config",
        first.join("summary.txt").to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    let strip = |path: &Path| -> String {
        std::fs::read_to_string(path.join("summary.txt"))
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with("out = "))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&first), strip(&second));
    // Identical config (including seed) means identical best cost.
    assert_eq!(summary_value(&first, "best_cost"), summary_value(&second, "best_cost"));
}

#[test]
fn ground_state_vqe_with_empty_auxiliary_register() {
    // q_a = 0 with a single mixing level reduces to plain ground-state VQE.
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gs");
    run_ok(&[
        "solve",
        "--out",
        out.to_str().unwrap(),
        "q_a=0",
        "mixing.family=uniform",
        "model.q_s=2",
        "ansatz.layers=3",
    ]);
    let gap: f64 = summary_value(&out, "cost_gap").parse().unwrap();
    assert!(gap.abs() < 1e-4, "ground-state gap {gap}");
}

#[test]
fn sweep_with_observable_file_adds_oracle_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mag");
    let obs = dir.path().join("z0.txt");
    std::fs::write(&obs, "# single-site magnetization\n1.0 ZII\n").unwrap();
    run_ok(&["solve", "--out", out.to_str().unwrap(), "ansatz.layers=6"]);
    run_ok(&[
        "sweep",
        "--out",
        out.to_str().unwrap(),
        "ansatz.layers=6",
        &format!("observable={}", obs.display()),
    ]);
    let text = std::fs::read_to_string(out.join("curve.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "beta,estimate,stat_error,exact,truncation_reference,abs_err");
    // β=1 row (third data row): exact column is the oracle ⟨Z₀⟩ ≈ 0.49798.
    let row: Vec<&str> = lines.nth(2).unwrap().split(',').collect();
    let exact: f64 = row[3].parse().unwrap();
    assert!((exact - 0.4979806062577941).abs() < 1e-9, "exact {exact}");
    let abs_err: f64 = row[5].parse().unwrap();
    assert!(abs_err < 0.05, "magnetization error {abs_err}");

    // Mismatched observable width is a configuration error.
    std::fs::write(&obs, "1.0 ZIII\n").unwrap();
    let output = run(&[
        "sweep",
        "--out",
        out.to_str().unwrap(),
        "ansatz.layers=6",
        &format!("observable={}", obs.display()),
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn shot_mode_sweep_fills_stat_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("shots");
    run_ok(&["solve", "--out", out.to_str().unwrap(), "ansatz.layers=2"]);
    run_ok(&[
        "sweep",
        "--out",
        out.to_str().unwrap(),
        "ansatz.layers=2",
        "mode=shots",
        "shots=20000",
    ]);
    let text = std::fs::read_to_string(out.join("curve.csv")).unwrap();
    for line in text.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let err: f64 = cells[2].parse().expect("stat_error filled in shot mode");
        assert!(err >= 0.0 && err.is_finite());
    }
}

#[test]
fn theta_parameter_count_mismatch_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mismatch");
    run_ok(&["solve", "--out", out.to_str().unwrap(), "ansatz.layers=1"]);
    // Sweep expects 2·3·2 = 12 parameters for layers=2, file has 6.
    let output = run(&["sweep", "--out", out.to_str().unwrap(), "ansatz.layers=2"]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("parameters"), "{stderr}");
}

#[test]
fn oracle_outputs_classical_limit_spectra() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("oracle");
    run_ok(&["oracle", "--out", out.to_str().unwrap(), "model.h=0"]);
    let text = std::fs::read_to_string(out.join("oracle_spectrum.csv")).unwrap();
    let energies: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let expected = [-3.0, -3.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0];
    for (e, x) in energies.iter().zip(&expected) {
        assert!((e - x).abs() < 1e-10);
    }

    // Thermal curve of the critical model is non-increasing in β.
    let out2 = dir.path().join("oracle2");
    run_ok(&["oracle", "--out", out2.to_str().unwrap()]);
    let curve = std::fs::read_to_string(out2.join("oracle_curve.csv")).unwrap();
    let values: Vec<f64> = curve
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(values.windows(2).all(|w| w[1] <= w[0] + 1e-12));
}
