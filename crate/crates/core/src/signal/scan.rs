use rayon::prelude::*;

use crate::signal::impulsive::direct_term;
use crate::signal::numeric::numeric_terms;
use crate::signal::{ExchangeVariant, MolecularResponse, QuadratureOptions};
use crate::source::{PhotonSourceSpec, SourceKind};
use crate::{Error, Result, C64};

/// Which evaluation route produces signal values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnginePath {
    #[default]
    Impulsive,
    Numeric,
}

impl EnginePath {
    pub fn as_str(self) -> &'static str {
        match self {
            EnginePath::Impulsive => "impulsive",
            EnginePath::Numeric => "numeric",
        }
    }

    /// The closed-form route exists for entangled photons only; other kinds
    /// always go through quadrature.
    pub fn effective(self, kind: SourceKind) -> EnginePath {
        match kind {
            SourceKind::Entangled => self,
            SourceKind::Uncorrelated | SourceKind::Classical => EnginePath::Numeric,
        }
    }
}

impl std::fmt::Display for EnginePath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for EnginePath {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "impulsive" => Ok(EnginePath::Impulsive),
            "numeric" => Ok(EnginePath::Numeric),
            other => Err(format!("unknown engine '{other}' (expected impulsive|numeric)")),
        }
    }
}

/// A 2D (omega_minus, T) evaluation request. `T` is the signal-arm arrival
/// time and the idler arrives at `T + delta_t`.
#[derive(Debug, Clone)]
pub struct SpectrumJob {
    pub spec: PhotonSourceSpec,
    pub omega_axis: Vec<f64>,
    pub time_axis: Vec<f64>,
    pub delta_t: f64,
    pub engine: EnginePath,
    pub exchange: ExchangeVariant,
    pub quadrature: QuadratureOptions,
    /// Worker count; 0 lets the pool decide.
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGrid {
    pub omega_axis: Vec<f64>,
    pub time_axis: Vec<f64>,
    /// Row-major, `values[it * omega_axis.len() + iw]`.
    pub values: Vec<C64>,
    pub kind: SourceKind,
    pub engine: EnginePath,
}

impl SpectralGrid {
    pub fn value(&self, it: usize, iw: usize) -> C64 {
        self.values[it * self.omega_axis.len() + iw]
    }

    /// All omega values at one time index.
    pub fn row(&self, it: usize) -> &[C64] {
        let n = self.omega_axis.len();
        &self.values[it * n..(it + 1) * n]
    }

    /// All time values at one omega index.
    pub fn column(&self, iw: usize) -> Vec<C64> {
        (0..self.time_axis.len()).map(|it| self.value(it, iw)).collect()
    }
}

/// Single-point evaluation split into its direct and exchange parts.
fn evaluate_terms(
    omega_minus: f64,
    t_s: f64,
    t_i: f64,
    response: &MolecularResponse,
    spec: &PhotonSourceSpec,
    engine: EnginePath,
    exchange: ExchangeVariant,
    quadrature: &QuadratureOptions,
) -> Result<(C64, C64)> {
    match engine.effective(spec.kind) {
        EnginePath::Impulsive => {
            let direct = direct_term(omega_minus, t_s, t_i, response, spec)?;
            let partner = match exchange {
                ExchangeVariant::DelaySwap => direct_term(omega_minus, t_i, t_s, response, spec)?,
                ExchangeVariant::MirrorShift => {
                    direct_term(-omega_minus, t_i, t_s, response, spec)?
                }
            };
            Ok((direct, partner))
        }
        EnginePath::Numeric => {
            let options = QuadratureOptions {
                exchange,
                ..*quadrature
            };
            numeric_terms(omega_minus, t_s, t_i, response, spec, &options)
        }
    }
}

fn check_axis(name: &str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::InvalidInput(format!("{name} axis is empty")));
    }
    if axis.iter().any(|v| !v.is_finite()) || axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(format!(
            "{name} axis must be finite and strictly increasing"
        )));
    }
    Ok(())
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))
}

/// Runs `f` over `0..n` on the pool and returns results in index order. The
/// first failing index (in order, not in time) decides the error.
fn run_indexed<T: Send>(
    threads: usize,
    n: usize,
    f: impl Fn(usize) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    let results: Vec<Result<T>> = pool(threads)?.install(|| (0..n).into_par_iter().map(&f).collect());
    results.into_iter().collect()
}

pub fn spectrum_2d(job: &SpectrumJob, response: &MolecularResponse) -> Result<SpectralGrid> {
    check_axis("omega", &job.omega_axis)?;
    check_axis("time", &job.time_axis)?;
    job.spec.validate()?;
    let nw = job.omega_axis.len();
    let values = run_indexed(job.threads, nw * job.time_axis.len(), |idx| {
        let (it, iw) = (idx / nw, idx % nw);
        let (omega, t) = (job.omega_axis[iw], job.time_axis[it]);
        evaluate_terms(
            omega,
            t,
            t + job.delta_t,
            response,
            &job.spec,
            job.engine,
            job.exchange,
            &job.quadrature,
        )
        .map(|(d, x)| d + x)
        .map_err(|e| Error::AtGridPoint {
            omega_minus: omega,
            time: t,
            source: Box::new(e),
        })
    })?;
    Ok(SpectralGrid {
        omega_axis: job.omega_axis.clone(),
        time_axis: job.time_axis.clone(),
        values,
        kind: job.spec.kind,
        engine: job.engine.effective(job.spec.kind),
    })
}

/// Signal against the optical delay `delta_t = T_i - T_s` at fixed `T_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayScan {
    pub omega_minus: f64,
    pub t_s: f64,
    pub delays: Vec<f64>,
    pub values: Vec<C64>,
    /// `|direct| + |exchange|`: the slowly varying bound that the two-term
    /// interference oscillates under.
    pub envelope: Vec<f64>,
    pub engine: EnginePath,
}

impl DelayScan {
    /// Carrier: the signal divided by its envelope (zero where the envelope
    /// vanishes).
    pub fn carrier(&self) -> Vec<C64> {
        self.values
            .iter()
            .zip(&self.envelope)
            .map(|(v, e)| if *e > 0.0 { v / e } else { C64::new(0.0, 0.0) })
            .collect()
    }
}

#[allow(clippy::too_many_arguments)]
pub fn hom_scan(
    omega_minus: f64,
    t_s: f64,
    delays: &[f64],
    response: &MolecularResponse,
    spec: &PhotonSourceSpec,
    engine: EnginePath,
    exchange: ExchangeVariant,
    quadrature: &QuadratureOptions,
    threads: usize,
) -> Result<DelayScan> {
    if spec.kind != SourceKind::Entangled {
        return Err(Error::UnsupportedKind {
            expected: SourceKind::Entangled,
            got: spec.kind,
        });
    }
    check_axis("delay", delays)?;
    let parts = run_indexed(threads, delays.len(), |k| {
        evaluate_terms(
            omega_minus,
            t_s,
            t_s + delays[k],
            response,
            spec,
            engine,
            exchange,
            quadrature,
        )
        .map_err(|e| Error::AtGridPoint {
            omega_minus,
            time: delays[k],
            source: Box::new(e),
        })
    })?;
    Ok(DelayScan {
        omega_minus,
        t_s,
        delays: delays.to_vec(),
        values: parts.iter().map(|(d, x)| d + x).collect(),
        envelope: parts.iter().map(|(d, x)| d.norm() + x.norm()).collect(),
        engine,
    })
}
