//! Acceptance report: one PASS/FAIL line per primary criterion.
//!
//! Runs as a plain binary (no libtest harness) so the lines reach the console
//! under `cargo test`. A FAIL line is a measured result, not a crash: the
//! process exits non-zero only if a computation itself errors.

use std::collections::BTreeMap;
use std::time::Instant;

use qraman::config::RunConfig;
use qraman::exciton::{
    build_site_hamiltonian, diagonalize, lindblad_generator, propagate, site_localized_state,
    DensityMatrixTimeline, EigenSystem, ExcitonModel,
};
use qraman::signal::{
    dominant_frequency, fit_exponential_decay, hom_scan, local_maxima, relative_l2,
    signal_classical, signal_impulsive, signal_numeric, smooth3, spectrum_2d, EnginePath,
    ExchangeVariant, MolecularResponse, PolarizabilityMatrix, QuadratureOptions, SpectrumJob,
};
use qraman::source::{PhotonSourceSpec, SourceKind};
use qraman::validate::validate;
use qraman::{Result, C64, HBAR};

// Tolerances as stated by the criteria.
const PEAK_TOL_EV: f64 = 0.003;
const PEAK_GRID_SECONDS: f64 = 10.0;
const WIDTH_TRACK_REL: f64 = 0.15;
const WIDTH_SHIFT_REL: f64 = 0.15;
const BASELINE_RATIO: f64 = 5.0;
const READOUT_SHAPE: f64 = 0.05;
const HOM_DECAY_REL: f64 = 0.20;
const SYMMETRY_REL: f64 = 0.05;
const ASYMMETRY_FACTOR: f64 = 3.0;
const CROSS_L2: f64 = 0.10;
const CROSS_DRIFT: f64 = 0.01;
const CROSS_SECONDS: f64 = 300.0;

/// Reference trimer gaps and the line positions to find, in eV.
const LINES: [f64; 3] = [0.059, 0.129, 0.188];

struct Verdict {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn response_for(model: &ExcitonModel, horizon: f64) -> Result<(EigenSystem, MolecularResponse)> {
    let eig = diagonalize(&build_site_hamiltonian(model)?)?;
    let gen = lindblad_generator(&eig, model)?;
    let rho0 = site_localized_state(&eig, 0)?;
    let timeline = propagate(&gen, &rho0, horizon, 1.0)?;
    let response = MolecularResponse::new(eig.clone(), model, PolarizabilityMatrix::unit(3), timeline)?;
    Ok((eig, response))
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

/// Half-maximum crossing distance around `peak`, interpolated linearly. A side
/// that never drops to half within the axis contributes its distance to the
/// axis end, making the result a lower bound (flagged by the bool).
fn width_at_half(x: &[f64], y: &[f64], peak: usize) -> (f64, bool) {
    let half = 0.5 * y[peak];
    let mut bounded = true;
    let left = (0..peak)
        .rev()
        .find(|&i| y[i] <= half)
        .map(|i| x[i] + (half - y[i]) * (x[i + 1] - x[i]) / (y[i + 1] - y[i]))
        .unwrap_or_else(|| {
            bounded = false;
            x[0]
        });
    let right = (peak + 1..y.len())
        .find(|&i| y[i] <= half)
        .map(|i| x[i - 1] + (half - y[i - 1]) * (x[i] - x[i - 1]) / (y[i] - y[i - 1]))
        .unwrap_or_else(|| {
            bounded = false;
            x[x.len() - 1]
        });
    (right - left, bounded)
}

/// Index of the largest value within `radius` of `centre`.
fn peak_near(x: &[f64], y: &[f64], centre: f64, radius: f64) -> usize {
    (0..x.len())
        .filter(|&i| (x[i] - centre).abs() <= radius)
        .max_by(|&i, &j| y[i].total_cmp(&y[j]))
        .expect("axis covers the line")
}

fn peak_positions() -> Result<Verdict> {
    let model = ExcitonModel::reference_trimer();
    let spec = PhotonSourceSpec::reference(SourceKind::Entangled);
    let start = Instant::now();
    let (_, response) = response_for(&model, 800.0 + spec.tau0)?;
    let job = SpectrumJob {
        spec,
        omega_axis: axis(-0.25, 0.25, 241),
        time_axis: axis(0.0, 800.0, 81),
        delta_t: 0.0,
        engine: EnginePath::Impulsive,
        exchange: ExchangeVariant::DelaySwap,
        quadrature: QuadratureOptions::default(),
        threads: 1,
    };
    let grid = spectrum_2d(&job, &response)?;
    let seconds = start.elapsed().as_secs_f64();
    let it = grid.time_axis.iter().position(|&t| t == 600.0).expect("T = 600 on the axis");
    let re: Vec<f64> = smooth3(&grid.row(it).iter().map(|z| z.re.abs()).collect::<Vec<_>>());
    let maxima: Vec<f64> = local_maxima(&grid.omega_axis, &re, 3.0 * spec.sigma0)
        .into_iter()
        .map(|i| grid.omega_axis[i])
        .collect();
    let mut worst = 0.0_f64;
    let mut found = Vec::new();
    for line in LINES {
        for target in [-line, line] {
            let nearest = maxima
                .iter()
                .copied()
                .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
                .unwrap_or(f64::NAN);
            worst = worst.max((nearest - target).abs());
            found.push(format!("{nearest:+.4}"));
        }
    }
    Ok(Verdict {
        name: "peak positions",
        pass: worst <= PEAK_TOL_EV && seconds < PEAK_GRID_SECONDS,
        detail: format!(
            "maxima at [{}] eV, worst offset {:.1} meV (<= {:.0}), 241x81 impulsive grid in {seconds:.2} s (< {PEAK_GRID_SECONDS:.0})",
            found.join(", "),
            1e3 * worst,
            1e3 * PEAK_TOL_EV
        ),
    })
}

fn superresolution() -> Result<Verdict> {
    let model = ExcitonModel::reference_trimer();
    let t = 600.0;
    let (_, response) = response_for(&model, 1500.0)?;
    // Coherence |e1><e0| damping from the rates: half the outflows plus twice
    // the pure dephasing. Only e1 -> e0 leaves e1; e0 has no outflow.
    let gamma_10 = HBAR * (0.5 * (1.0 / 500.0) + 2.0 * 0.003);
    let sigma0 = 0.001;
    let expected = 2.0 * (sigma0 + gamma_10);

    let fine = axis(0.0, 0.12, 241);
    let entangled_width = |tau0: f64| -> Result<f64> {
        let spec = PhotonSourceSpec::reference(SourceKind::Entangled).with_tau0(tau0);
        let power: Vec<f64> = fine
            .iter()
            .map(|&w| signal_impulsive(w, t, t, &response, &spec, ExchangeVariant::DelaySwap).map(|z| z.norm_sqr()))
            .collect::<Result<_>>()?;
        Ok(width_at_half(&fine, &power, peak_near(&fine, &power, LINES[0], 0.01)).0)
    };
    let w25 = entangled_width(25.0)?;
    let w50 = entangled_width(50.0)?;

    let coarse = axis(-0.04, 0.16, 51);
    let options = QuadratureOptions::default();
    let mut baselines = Vec::new();
    for kind in [SourceKind::Uncorrelated, SourceKind::Classical] {
        let spec = PhotonSourceSpec::reference(kind);
        let power: Vec<f64> = coarse
            .iter()
            .map(|&w| {
                let s = match kind {
                    SourceKind::Classical => signal_classical(w, t, t, &response, &spec, &options),
                    _ => signal_numeric(w, t, t, &response, &spec, &options),
                };
                s.map(|z| z.norm_sqr())
            })
            .collect::<Result<_>>()?;
        let (width, bounded) = width_at_half(&coarse, &power, peak_near(&coarse, &power, LINES[0], 0.02));
        baselines.push((kind, width, bounded));
    }

    let track = (w25 / expected - 1.0).abs();
    let shift = (w50 / w25 - 1.0).abs();
    let ratios: Vec<f64> = baselines.iter().map(|b| b.1 / w25).collect();
    let pass = track <= WIDTH_TRACK_REL
        && shift < WIDTH_SHIFT_REL
        && ratios.iter().all(|&r| r >= BASELINE_RATIO);
    let describe: Vec<String> = baselines
        .iter()
        .zip(&ratios)
        .map(|((kind, width, bounded), r)| {
            format!("{kind} {}{:.1} meV ({r:.1}x)", if *bounded { "" } else { ">=" }, 1e3 * width)
        })
        .collect();
    Ok(Verdict {
        name: "superresolution",
        pass,
        detail: format!(
            "entangled |S|^2 FWHM {:.2} meV vs 2(sigma0+gamma) = {:.2} meV ({:.1}% <= {:.0}%), tau0 doubled moves it {:.1}% (< {:.0}%); baselines {} (need >= {BASELINE_RATIO:.0}x)",
            1e3 * w25,
            1e3 * expected,
            100.0 * track,
            100.0 * WIDTH_TRACK_REL,
            100.0 * shift,
            100.0 * WIDTH_SHIFT_REL,
            describe.join(", ")
        ),
    })
}

fn population_readout() -> Result<Verdict> {
    let model = ExcitonModel::reference_trimer();
    let spec = PhotonSourceSpec::reference(SourceKind::Entangled);
    let (eig, response) = response_for(&model, 900.0)?;
    let times = axis(0.0, 800.0, 81);
    let unit = |v: Vec<f64>| {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.into_iter().map(|x| x / n).collect::<Vec<_>>()
    };
    // Line at omega_minus = gap(upper, lower) reads the population of `lower`.
    let mut errors = Vec::new();
    for (upper, lower) in [(1, 0), (0, 1), (2, 1), (1, 2), (2, 0), (0, 2)] {
        let w = eig.gap(upper, lower);
        let signal: Vec<f64> = times
            .iter()
            .map(|&t| signal_impulsive(w, t, t, &response, &spec, ExchangeVariant::DelaySwap).map(|z| z.norm()))
            .collect::<Result<_>>()?;
        let population: Vec<f64> = times
            .iter()
            .map(|&t| response.timeline().at(t + 0.5 * spec.tau0).map(|r| r[(lower, lower)].re))
            .collect::<Result<_>>()?;
        let (s, p) = (unit(signal), unit(population));
        let err = s.iter().zip(&p).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        errors.push((w, lower, err));
    }
    let worst = errors.iter().map(|e| e.2).fold(0.0, f64::max);
    let list: Vec<String> = errors
        .iter()
        .map(|(w, e, err)| format!("{w:+.3}/rho_{e}{e} {:.1}%", 100.0 * err))
        .collect();
    Ok(Verdict {
        name: "population readout",
        pass: worst <= READOUT_SHAPE,
        detail: format!(
            "normalized |S(T)| vs rho_ee(T + tau0/2), T = 0..800 fs: {} (worst {:.1}% <= {:.0}%)",
            list.join(", "),
            100.0 * worst,
            100.0 * READOUT_SHAPE
        ),
    })
}

fn hom() -> Result<Verdict> {
    let model = ExcitonModel::reference_trimer();
    let spec = PhotonSourceSpec::reference(SourceKind::Entangled);
    let (_, response) = response_for(&model, 200.0)?;
    let dt = 0.5;
    let delays = axis(-100.0, 100.0, 401);
    let zero = delays.iter().position(|&d| d == 0.0).expect("zero delay on the axis");
    let mut parts = Vec::new();
    let mut pass = true;
    for omega in [0.13, -0.13] {
        let scan = hom_scan(
            omega,
            0.0,
            &delays,
            &response,
            &spec,
            EnginePath::Impulsive,
            ExchangeVariant::DelaySwap,
            &QuadratureOptions::default(),
            1,
        )?;
        let distance: Vec<f64> = delays.iter().map(|d| d.abs()).collect();
        let decay = fit_exponential_decay(&distance, &scan.envelope).map_or(f64::NAN, |f| f.1);
        let decay_ok = (decay / (0.5 * spec.tau0) - 1.0).abs() <= HOM_DECAY_REL;
        let (beat, bin) = dominant_frequency(dt, &scan.values).unwrap_or((f64::NAN, f64::NAN));
        let expected = (spec.omega_plus + omega).abs() / 2.0;
        let beat_ok = (beat - expected).abs() <= bin;
        let residue = scan.values[zero].norm();
        let peak = scan.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let residue_ok = residue > 1e-6 * peak;
        pass &= decay_ok && beat_ok && residue_ok;
        parts.push(format!(
            "w-={omega:+}: decay {decay:.2} fs vs tau0/2 = {:.2} (<= {:.0}%), beat {beat:.4} eV vs {expected:.3} (bin {bin:.4}, period {:.1} fs), |S(0)|/max {:.2}",
            0.5 * spec.tau0,
            100.0 * HOM_DECAY_REL,
            2.0 * std::f64::consts::PI * HBAR / expected,
            residue / peak
        ));
    }
    Ok(Verdict {
        name: "HOM scan",
        pass,
        detail: parts.join("; "),
    })
}

fn symmetry() -> Result<Verdict> {
    let model = ExcitonModel::reference_trimer();
    let (eig, response) = response_for(&model, 3000.0)?;
    // Downhill-relaxed state: diagonal and almost entirely e1.
    let relaxed = response.timeline().at(3000.0)?;
    let frozen = response.with_timeline(DensityMatrixTimeline::constant(relaxed, 0.0, 1.0, 2000.0)?)?;
    let entangled = PhotonSourceSpec::reference(SourceKind::Entangled);
    let classical = PhotonSourceSpec::reference(SourceKind::Classical);
    let options = QuadratureOptions::default();
    let t = 600.0;
    let asym = |a: C64, b: C64| (a.norm() - b.norm()).abs() / a.norm().max(b.norm());
    let (mut worst_classical, mut best_entangled) = (0.0_f64, 0.0_f64);
    let mut parts = Vec::new();
    for (upper, lower) in [(1, 0), (2, 1), (2, 0)] {
        let w = eig.gap(upper, lower);
        let c = asym(
            signal_classical(w, t, t, &frozen, &classical, &options)?,
            signal_classical(-w, t, t, &frozen, &classical, &options)?,
        );
        let e = asym(
            signal_impulsive(w, t, t, &frozen, &entangled, ExchangeVariant::DelaySwap)?,
            signal_impulsive(-w, t, t, &frozen, &entangled, ExchangeVariant::DelaySwap)?,
        );
        worst_classical = worst_classical.max(c);
        best_entangled = best_entangled.max(e);
        parts.push(format!("+-{w:.3}: classical {:.2}%, entangled {:.1}%", 100.0 * c, 100.0 * e));
    }
    Ok(Verdict {
        name: "classical symmetry vs entangled asymmetry",
        pass: worst_classical <= SYMMETRY_REL && best_entangled > ASYMMETRY_FACTOR * SYMMETRY_REL,
        detail: format!(
            "{} (classical <= {:.0}%, entangled > {:.0}% on some pair)",
            parts.join("; "),
            100.0 * SYMMETRY_REL,
            100.0 * ASYMMETRY_FACTOR * SYMMETRY_REL
        ),
    })
}

fn cross_validation() -> Result<Verdict> {
    // Impulsive regime: tau0 = 25 fs against relaxation and dephasing times of
    // 2 ps and more, i.e. the reference rates scaled by 1/10. T well past the
    // pump so the difference-time window is not cut by the pump onset.
    let base = ExcitonModel::reference_trimer();
    let rates: BTreeMap<(usize, usize), f64> =
        base.downhill_rates().iter().map(|(&k, &v)| (k, 0.1 * v)).collect();
    let model = ExcitonModel::new(base.site_energies().to_vec(), base.hopping(), rates, 0.1 * base.pure_dephasing())?;
    let spec = PhotonSourceSpec::reference(SourceKind::Entangled);
    let slowest = model.downhill_rates().values().fold(model.pure_dephasing(), |m, &k| m.max(k));
    let regime = spec.tau0 <= 0.1 / slowest;
    let t = 3000.0;
    let (_, response) = response_for(&model, t + 400.0)?;
    let omegas = axis(-0.25, 0.25, 41);
    let start = Instant::now();
    let coarse = QuadratureOptions {
        check_convergence: false,
        ..QuadratureOptions::default()
    };
    let fine = QuadratureOptions {
        step_divisor: 2.0 * coarse.step_divisor,
        ..coarse
    };
    let mut impulsive = Vec::new();
    let mut numeric = Vec::new();
    let mut drift = 0.0_f64;
    for &w in &omegas {
        impulsive.push(signal_impulsive(w, t, t, &response, &spec, ExchangeVariant::DelaySwap)?);
        let a = signal_numeric(w, t, t, &response, &spec, &coarse)?;
        let b = signal_numeric(w, t, t, &response, &spec, &fine)?;
        drift = drift.max((a - b).norm() / b.norm());
        numeric.push(a);
    }
    let seconds = start.elapsed().as_secs_f64();
    let l2 = relative_l2(&numeric, &impulsive);
    Ok(Verdict {
        name: "engine cross-validation",
        pass: regime && l2 <= CROSS_L2 && drift < CROSS_DRIFT && seconds < CROSS_SECONDS,
        detail: format!(
            "41-point slice at T = {t} fs with rates x0.1 (regime {}): relative L2 {:.1}% (<= {:.0}%), step-halving drift {:.2e} (< {CROSS_DRIFT}), {seconds:.0} s serial incl. halving (< {CROSS_SECONDS:.0})",
            if regime { "ok" } else { "violated" },
            100.0 * l2,
            100.0 * CROSS_L2,
            drift
        ),
    })
}

fn oracle_suite() -> Result<Verdict> {
    let report = validate(&RunConfig::reference())?;
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed()).map(|c| c.name.as_str()).collect();
    Ok(Verdict {
        name: "oracle suites",
        pass: report.passed(),
        detail: if failed.is_empty() {
            format!("{} checks passed (validate mode)", report.checks.len())
        } else {
            format!("failed: {}", failed.join(", "))
        },
    })
}

fn main() {
    let criteria: [(&str, fn() -> Result<Verdict>); 7] = [
        ("peak positions", peak_positions),
        ("superresolution", superresolution),
        ("population readout", population_readout),
        ("HOM scan", hom),
        ("classical symmetry vs entangled asymmetry", symmetry),
        ("engine cross-validation", cross_validation),
        ("oracle suites", oracle_suite),
    ];
    let mut passed = 0;
    let mut crashed = false;
    for (name, run) in criteria {
        match run() {
            Ok(v) => {
                println!("{} {}: {}", if v.pass { "PASS" } else { "FAIL" }, v.name, v.detail);
                passed += usize::from(v.pass);
            }
            Err(e) => {
                println!("FAIL {name}: error {e}");
                crashed = true;
            }
        }
    }
    println!("acceptance: {passed} of {} primary criteria pass", criteria.len());
    if crashed {
        std::process::exit(1);
    }
}
