use std::path::{Path, PathBuf};
use std::process::Command;

use qraman::config::RunConfig;
use qraman::exciton::{build_site_hamiltonian, diagonalize, ExcitonModel};
use qraman::signal::{dominant_frequency, EnginePath};
use qraman::table::ResultTable;
use qraman::C64;

const TRIMER: &str = "[molecule]\nsite_energies = 2.25, 2.10, 2.10\nhopping = 0.03\ninitial_state = site:0\n";

fn qraman(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qraman"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.ini");
    std::fs::write(&path, text).unwrap();
    path
}

fn run_mode(mode: &str, config: &Path, out: &Path, extra: &[&str]) -> (i32, String, String) {
    let mut args = vec![mode, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    qraman(&args)
}

fn small_spectrum() -> String {
    format!(
        "{TRIMER}\n[scan]\nomega_min = -0.2\nomega_max = 0.2\nomega_count = 41\n\
         time_min = 0\ntime_max = 400\ntime_count = 5\n"
    )
}

fn read_table(path: &Path) -> ResultTable {
    ResultTable::from_csv(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn spectrum_is_reproducible_across_runs_and_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &small_spectrum());
    let mut bodies = Vec::new();
    for (k, threads) in ["1", "1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("out{k}"));
        let (code, _, err) = run_mode("spectrum", &config, &out, &["--threads", threads]);
        assert_eq!(code, 0, "{err}");
        let csv = std::fs::read_to_string(out.join("spectrum.csv")).unwrap();
        let body: String = csv.lines().skip(1).collect::<Vec<_>>().join("\n");
        bodies.push((csv, body));
    }
    assert_eq!(bodies[0].0, bodies[1].0, "identical runs must give identical files");
    assert_eq!(bodies[0].1, bodies[2].1, "worker count must not change the values");

    let table = read_table(&dir.path().join("out0/spectrum.csv"));
    assert_eq!(table.columns, ["omega_minus_eV", "T_fs", "re", "im", "abs"]);
    assert_eq!(table.rows.len(), 41 * 5);
    assert_eq!(table.provenance.engine, "impulsive");
    // Rows run over omega fastest, then T.
    assert_eq!(table.rows[1][1], 0.0);
    assert_eq!(table.rows[41][1], 100.0);
    for row in &table.rows {
        assert!((row[4] - row[2].hypot(row[3])).abs() <= 1e-10 * row[4].max(1e-300));
    }
}

#[test]
fn effective_config_echo_reflects_command_line_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{}\n[numerics]\nthreads = 4\n", small_spectrum());
    let config = write_config(dir.path(), &text);
    let out = dir.path().join("out");
    let (code, _, err) = run_mode("dynamics", &config, &out, &["--threads", "1", "--engine", "numeric"]);
    assert_eq!(code, 0, "{err}");
    let echo = std::fs::read_to_string(out.join("effective_config.ini")).unwrap();
    let parsed = RunConfig::parse(&echo).unwrap();
    assert_eq!(parsed.numerics.threads, 1);
    assert_eq!(parsed.numerics.engine, EnginePath::Numeric);
    assert_eq!(parsed.scan.mode.as_str(), "dynamics");
    assert_eq!(RunConfig::parse(&parsed.print()).unwrap(), parsed);
    let provenance = std::fs::read_to_string(out.join("dynamics.csv")).unwrap();
    assert!(provenance.starts_with("# qraman "));
    assert!(provenance.lines().next().unwrap().contains(&qraman::table::digest(&echo)));
}

#[test]
fn dynamics_shows_downhill_transfer_and_coherent_beats() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &format!("{TRIMER}\n[scan]\ntime_max = 800\n"));
    let out = dir.path().join("out");
    let (code, _, err) = run_mode("dynamics", &config, &out, &[]);
    assert_eq!(code, 0, "{err}");
    let table = read_table(&out.join("dynamics.csv"));
    assert_eq!(table.columns.len(), 1 + 2 * 9);
    assert_eq!(table.columns[1], "rho_00_re");
    assert_eq!(table.columns[18], "rho_22_im");
    let t = table.column("t_fs").unwrap();
    assert_eq!(t.len(), 801);
    assert_eq!(*t.last().unwrap(), 800.0);

    let low = table.column("rho_00_re").unwrap();
    let high = table.column("rho_22_re").unwrap();
    assert!(low.windows(2).all(|w| w[1] >= w[0]), "lowest exciton fills monotonically");
    assert!(high.windows(2).all(|w| w[1] <= w[0]), "highest exciton drains monotonically");

    let re = table.column("rho_12_re").unwrap();
    let im = table.column("rho_12_im").unwrap();
    let coherence: Vec<C64> = re.iter().zip(&im).map(|(a, b)| C64::new(*a, *b)).collect();
    let (freq, bin) = dominant_frequency(1.0, &coherence).unwrap();
    let model = ExcitonModel::reference_trimer();
    let eig = diagonalize(&build_site_hamiltonian(&model).unwrap()).unwrap();
    assert!((freq - eig.gap(2, 1)).abs() <= bin, "{freq} vs {}", eig.gap(2, 1));
}

#[test]
fn homscan_and_validate_modes() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{TRIMER}\n[scan]\nomega_minus = 0.13\ndelay_min = -50\ndelay_max = 50\ndelay_count = 101\n");
    let config = write_config(dir.path(), &text);
    let out = dir.path().join("out");
    let (code, _, err) = run_mode("homscan", &config, &out, &[]);
    assert_eq!(code, 0, "{err}");
    let table = read_table(&out.join("homscan.csv"));
    assert_eq!(table.columns, ["dT_fs", "re", "im", "abs", "envelope"]);
    assert_eq!(table.rows.len(), 101);
    assert!(table.rows.iter().all(|r| r[3] <= r[4] * (1.0 + 1e-12)));

    let (code, stdout, err) = run_mode("validate", &config, &out, &[]);
    assert_eq!(code, 0, "{stdout}{err}");
    let report = std::fs::read_to_string(out.join("validation.txt")).unwrap();
    assert!(report.lines().filter(|l| l.starts_with("PASS")).count() >= 10);
    assert!(!report.contains("FAIL"));
}

#[test]
fn validation_failure_exits_with_three() {
    // A 25 fs step leaves the stepped propagator exact on its own grid, but
    // the probe times in between are interpolated far beyond 1e-7.
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &format!("{TRIMER}\n[numerics]\ndt = 30\n"));
    let (code, stdout, _) = run_mode("validate", &config, &dir.path().join("out"), &[]);
    assert_eq!(code, 3);
    assert!(stdout.contains("FAIL propagator vs exp(Lt)"), "{stdout}");
}

#[test]
fn non_convergence_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "{TRIMER}\n[scan]\nomega_min = 0.05\nomega_max = 0.05\nomega_count = 1\n\
         time_min = 300\ntime_max = 300\ntime_count = 1\n\
         [numerics]\nengine = numeric\nstep_divisor = 2\ntolerance = 1e-9\n"
    );
    let config = write_config(dir.path(), &text);
    let (code, _, err) = run_mode("spectrum", &config, &dir.path().join("out"), &[]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("did not converge"), "{err}");
    assert!(err.contains("omega_minus = 0.05"), "error names the grid point: {err}");
}

#[test]
fn usage_and_config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let good = write_config(dir.path(), &small_spectrum());

    let (code, _, _) = qraman(&["spectrum"]);
    assert_eq!(code, 1, "missing required flags");
    let (code, _, _) = run_mode("sideways", &good, &out, &[]);
    assert_eq!(code, 1, "unknown mode");
    let (code, _, _) = run_mode("spectrum", &good, &out, &["--engine", "fast"]);
    assert_eq!(code, 1, "unknown engine");
    let (code, _, _) = run_mode("spectrum", &dir.path().join("absent.ini"), &out, &[]);
    assert_eq!(code, 1, "missing config file");

    let bad = write_config(dir.path(), &format!("{TRIMER}\n[scan]\nomega_cnt = 3\n"));
    let (code, _, err) = run_mode("spectrum", &bad, &out, &[]);
    assert_eq!(code, 1);
    assert!(err.contains("omega_cnt"), "{err}");

    let short = write_config(dir.path(), &format!("{}\n[numerics]\nhorizon = 100\n", small_spectrum()));
    let (code, _, err) = run_mode("spectrum", &short, &out, &[]);
    assert_eq!(code, 1);
    assert!(err.contains("horizon"), "{err}");

    let (code, stdout, _) = qraman(&["--help"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("--engine"));
}
