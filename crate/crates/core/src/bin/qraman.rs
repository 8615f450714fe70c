use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use qraman::config::{Mode, RunConfig};
use qraman::run::{exit, exit_code, run};
use qraman::signal::EnginePath;

/// Twin-photon stimulated Raman coincidence spectra of an exciton aggregate.
#[derive(Debug, Parser)]
#[command(name = "qraman", version)]
struct Cli {
    /// spectrum | homscan | dynamics | compare | validate
    mode: Mode,
    /// INI file describing molecule, photons, scan and numerics.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; 1 forces serial evaluation.
    #[arg(long)]
    threads: Option<usize>,
    /// Signal engine: impulsive closed form or direct quadrature.
    #[arg(long)]
    engine: Option<EnginePath>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    ExitCode::from(execute(cli) as u8)
}

fn execute(cli: Cli) -> i32 {
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("qraman: cannot read {}: {e}", cli.config.display());
            return exit::USAGE;
        }
    };
    let mut config = match RunConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("qraman: {}: {e}", cli.config.display());
            return exit::USAGE;
        }
    };
    config.scan.mode = cli.mode;
    if let Some(n) = cli.threads {
        config.numerics.threads = n;
    }
    if let Some(engine) = cli.engine {
        config.numerics.engine = engine;
    }
    if matches!(cli.mode, Mode::Spectrum | Mode::Homscan | Mode::Compare) {
        if let Some(warning) = config.source().ok().and_then(|s| s.narrowband_warning()) {
            eprintln!("qraman: warning: {warning}");
        }
    }

    match run(&config, &cli.out) {
        Ok(report) => {
            for line in &report.summary {
                println!("{line}");
            }
            for file in &report.files {
                println!("wrote {}", file.display());
            }
            report.exit_code()
        }
        Err(e) => {
            eprintln!("qraman: {e}");
            exit_code(&e)
        }
    }
}
