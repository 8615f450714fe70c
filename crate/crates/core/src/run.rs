//! Executes a [`RunConfig`]: builds the molecule, sizes the propagation
//! horizon, evaluates the requested scan and writes CSV tables plus an echo of
//! the effective configuration.

use std::path::{Path, PathBuf};

use crate::config::{InitialState, Mode, RunConfig};
use crate::exciton::{
    build_site_hamiltonian, diagonalize, lindblad_generator, propagate, site_localized_state,
    DensityMatrixTimeline, EigenSystem,
};
use crate::signal::{
    hom_scan, quadrature_reach, spectrum_2d, EnginePath, MolecularResponse, QuadratureOptions,
    SpectralGrid, SpectrumJob,
};
use crate::source::{PhotonSourceSpec, SourceKind};
use crate::table::{digest, Provenance, ResultTable};
use crate::validate::{validate, ValidationReport};
use crate::{CMatrix, Error, Result, C64};

pub const EFFECTIVE_CONFIG: &str = "effective_config.ini";

/// Process exit codes of the command-line driver.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const CONVERGENCE: i32 = 2;
    pub const VALIDATION: i32 = 3;
}

/// Exit code for an error that aborted a run.
pub fn exit_code(err: &Error) -> i32 {
    match err.root() {
        Error::NotConverged { .. } => exit::CONVERGENCE,
        _ => exit::USAGE,
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub mode: Mode,
    pub files: Vec<PathBuf>,
    /// Filled by `validate` and `compare`.
    pub summary: Vec<String>,
    pub validation: Option<ValidationReport>,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        match &self.validation {
            Some(v) if !v.passed() => exit::VALIDATION,
            _ => exit::OK,
        }
    }
}

/// Runs `config` and writes its outputs into `out_dir` (created if missing).
pub fn run(config: &RunConfig, out_dir: &Path) -> Result<RunReport> {
    std::fs::create_dir_all(out_dir)?;
    let echo = config.print();
    let echo_path = out_dir.join(EFFECTIVE_CONFIG);
    std::fs::write(&echo_path, &echo)?;
    let ctx = Context {
        config,
        digest: digest(&echo),
        out_dir,
    };
    let mut report = RunReport {
        mode: config.scan.mode,
        files: vec![echo_path],
        summary: Vec::new(),
        validation: None,
    };
    match config.scan.mode {
        Mode::Spectrum => {
            let spec = config.source()?;
            let grid = ctx.spectrum(&spec)?;
            report.files.push(ctx.write_spectrum(&grid, "spectrum")?);
        }
        Mode::Compare => {
            for kind in [SourceKind::Entangled, SourceKind::Uncorrelated, SourceKind::Classical] {
                let spec = config.source_of(kind)?;
                let grid = ctx.spectrum(&spec)?;
                let label = format!("spectrum_{}", kind.as_str());
                report.files.push(ctx.write_spectrum(&grid, &label)?);
                report.summary.push(format!(
                    "{:<13} mirror asymmetry {:.4}",
                    kind.as_str(),
                    mirror_asymmetry(&grid)
                ));
            }
        }
        Mode::Homscan => report.files.push(ctx.homscan()?),
        Mode::Dynamics => report.files.push(ctx.dynamics()?),
        Mode::Validate => {
            let v = validate(config)?;
            let path = out_dir.join("validation.txt");
            std::fs::write(&path, v.render())?;
            report.summary = v.lines();
            report.files.push(path);
            report.validation = Some(v);
        }
    }
    Ok(report)
}

/// `sum ||S(w)| - |S(-w)|| / sum |S(w)|` over all grid points whose mirror
/// image is also on the grid. Zero when the magnitude is symmetric about
/// `omega_minus = 0`; the phase of the two sides may differ.
pub fn mirror_asymmetry(grid: &SpectralGrid) -> f64 {
    let axis = &grid.omega_axis;
    let tol = 1e-9 * axis.iter().fold(1.0_f64, |m, w| m.max(w.abs()));
    let (mut num, mut den) = (0.0, 0.0);
    for (iw, w) in axis.iter().enumerate() {
        let Some(jw) = axis.iter().position(|v| (v + w).abs() <= tol) else {
            continue;
        };
        for it in 0..grid.time_axis.len() {
            num += (grid.value(it, iw).norm() - grid.value(it, jw).norm()).abs();
            den += grid.value(it, iw).norm();
        }
    }
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}


/// Density matrix in the eigenbasis for the configured preparation.
pub fn initial_state(eig: &EigenSystem, state: InitialState) -> Result<CMatrix> {
    match state {
        InitialState::Site(k) => site_localized_state(eig, k),
        InitialState::Exciton(k) => {
            let n = eig.dim();
            if k >= n {
                return Err(Error::config(
                    "molecule",
                    "initial_state",
                    format!("exciton {k} out of range for {n} states"),
                ));
            }
            let mut rho = CMatrix::zeros(n, n);
            rho[(k, k)] = C64::new(1.0, 0.0);
            Ok(rho)
        }
    }
}

/// Propagates the configured molecule up to `horizon` and bundles the result
/// with its eigenbasis and polarizability.
pub fn molecular_response(config: &RunConfig, horizon: f64) -> Result<MolecularResponse> {
    let model = config.model()?;
    let eig = diagonalize(&build_site_hamiltonian(&model)?)?;
    let gen = lindblad_generator(&eig, &model)?;
    let rho0 = initial_state(&eig, config.molecule.initial_state)?;
    let timeline = propagate(&gen, &rho0, horizon, config.numerics.dt)?;
    MolecularResponse::new(eig, &model, config.polarizability()?, timeline)
}

/// Latest density-matrix time that evaluating `(t_s, t_i)` reads.
pub fn required_time(
    spec: &PhotonSourceSpec,
    engine: EnginePath,
    t_s: f64,
    t_i: f64,
    quadrature: &QuadratureOptions,
) -> f64 {
    match engine.effective(spec.kind) {
        EnginePath::Impulsive => {
            let delay = if spec.phase_matching_phase { 0.5 * spec.tau0 } else { 0.0 };
            t_s.max(t_i) + delay
        }
        EnginePath::Numeric => quadrature_reach(spec, t_s, t_i, quadrature),
    }
}

fn quadrature_options(config: &RunConfig) -> QuadratureOptions {
    let n = &config.numerics;
    QuadratureOptions {
        step_divisor: n.step_divisor,
        tail: n.tail,
        causal: n.causal,
        exchange: n.exchange,
        tolerance: n.tolerance,
        check_convergence: true,
    }
}

struct Context<'a> {
    config: &'a RunConfig,
    digest: String,
    out_dir: &'a Path,
}

impl Context<'_> {
    fn provenance(&self, label: &str, engine: &str) -> Provenance {
        Provenance {
            config_digest: self.digest.clone(),
            engine: engine.to_string(),
            label: label.to_string(),
        }
    }

    /// Explicit horizon if configured, else `needed` plus two samples.
    fn horizon(&self, needed: f64) -> Result<f64> {
        let dt = self.config.numerics.dt;
        match self.config.numerics.horizon {
            Some(h) if h < needed => Err(Error::config(
                "numerics",
                "horizon",
                format!("{h} fs is too short, the scan reads the density matrix up to {needed:.3} fs"),
            )),
            Some(h) => Ok(h),
            None => Ok(needed.max(0.0) + 2.0 * dt),
        }
    }

    fn spectrum(&self, spec: &PhotonSourceSpec) -> Result<SpectralGrid> {
        let scan = &self.config.scan;
        let numerics = &self.config.numerics;
        let quadrature = quadrature_options(self.config);
        let times = scan.time.points();
        let needed = times
            .iter()
            .map(|&t| required_time(spec, numerics.engine, t, t + scan.delta_t, &quadrature))
            .fold(0.0, f64::max);
        let response = molecular_response(self.config, self.horizon(needed)?)?;
        let job = SpectrumJob {
            spec: spec.clone(),
            omega_axis: scan.omega.points(),
            time_axis: times,
            delta_t: scan.delta_t,
            engine: numerics.engine,
            exchange: numerics.exchange,
            quadrature,
            threads: numerics.threads,
        };
        spectrum_2d(&job, &response)
    }

    fn write_spectrum(&self, grid: &SpectralGrid, label: &str) -> Result<PathBuf> {
        let mut table = ResultTable::new(
            self.provenance(label, grid.engine.as_str()),
            &["omega_minus_eV", "T_fs", "re", "im", "abs"],
        );
        for (it, t) in grid.time_axis.iter().enumerate() {
            for (iw, w) in grid.omega_axis.iter().enumerate() {
                let v = grid.value(it, iw);
                table.push(vec![*w, *t, v.re, v.im, v.norm()]);
            }
        }
        let path = self.out_dir.join(format!("{label}.csv"));
        table.write(&path)?;
        Ok(path)
    }

    fn homscan(&self) -> Result<PathBuf> {
        let scan = &self.config.scan;
        let numerics = &self.config.numerics;
        let spec = self.config.source()?;
        let quadrature = quadrature_options(self.config);
        let delays = scan.delay.points();
        let t_s = scan.hom_time;
        let needed = delays
            .iter()
            .map(|&d| required_time(&spec, numerics.engine, t_s, t_s + d, &quadrature))
            .fold(0.0, f64::max);
        let response = molecular_response(self.config, self.horizon(needed)?)?;
        let engine = numerics.engine.effective(spec.kind);
        let result = hom_scan(
            scan.omega_minus,
            t_s,
            &delays,
            &response,
            &spec,
            engine,
            numerics.exchange,
            &quadrature,
            numerics.threads,
        )?;
        let mut table = ResultTable::new(
            self.provenance("homscan", engine.as_str()),
            &["dT_fs", "re", "im", "abs", "envelope"],
        );
        for ((d, v), e) in result.delays.iter().zip(&result.values).zip(&result.envelope) {
            table.push(vec![*d, v.re, v.im, v.norm(), *e]);
        }
        let path = self.out_dir.join("homscan.csv");
        table.write(&path)?;
        Ok(path)
    }

    fn dynamics(&self) -> Result<PathBuf> {
        let end = self.config.scan.time.max;
        let response = molecular_response(self.config, self.horizon(end)?)?;
        let timeline: &DensityMatrixTimeline = response.timeline();
        let n = timeline.dim();
        let mut columns = vec!["t_fs".to_string()];
        for a in 0..n {
            for b in 0..n {
                columns.push(format!("rho_{a}{b}_re"));
                columns.push(format!("rho_{a}{b}_im"));
            }
        }
        let names: Vec<&str> = columns.iter().map(String::as_str).collect();
        let mut table = ResultTable::new(self.provenance("dynamics", "propagator"), &names);
        for (t, rho) in timeline.times().zip(timeline.samples()) {
            if t > end + 1e-9 {
                break;
            }
            let mut row = vec![t];
            for a in 0..n {
                for b in 0..n {
                    row.push(rho[(a, b)].re);
                    row.push(rho[(a, b)].im);
                }
            }
            table.push(row);
        }
        let path = self.out_dir.join("dynamics.csv");
        table.write(&path)?;
        Ok(path)
    }
}
