//! Coincidence signal of the twin-photon stimulated Raman process.
//!
//! Two evaluation routes share one molecular description
//! ([`MolecularResponse`]): the closed-form impulsive expression
//! ([`signal_impulsive`]) and direct quadrature of the double-time integral
//! ([`signal_numeric`], [`signal_classical`]).

mod analysis;
mod impulsive;
mod numeric;
mod overlap;
mod scan;

pub use analysis::{
    dominant_frequency, fit_exponential_decay, fwhm_around, local_maxima, relative_l2,
    smooth3,
};
pub use impulsive::signal_impulsive;
pub use numeric::{quadrature_reach, signal_classical, signal_numeric, QuadratureOptions};
pub use overlap::overlap_w;
pub use scan::{hom_scan, spectrum_2d, DelayScan, EnginePath, SpectralGrid, SpectrumJob};

use crate::exciton::{hermiticity_defect, DensityMatrixTimeline, EigenSystem, ExcitonModel};
use crate::{CMatrix, Error, Result, C64, HBAR};

/// Raman polarizability between eigenstates (dimensionless, Hermitian).
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizabilityMatrix(CMatrix);

impl PolarizabilityMatrix {
    pub fn new(values: CMatrix) -> Result<Self> {
        if !values.is_square() {
            return Err(Error::InvalidInput("polarizability must be square".into()));
        }
        if hermiticity_defect(&values) > 1e-12 {
            return Err(Error::InvalidInput("polarizability must be Hermitian".into()));
        }
        Ok(Self(values))
    }

    /// Every element equal to one.
    pub fn unit(n: usize) -> Self {
        Self(CMatrix::from_element(n, n, C64::new(1.0, 0.0)))
    }

    pub fn values(&self) -> &CMatrix {
        &self.0
    }

    /// Weight of the Raman pathway `e' -> e'' -> e`.
    pub fn pathway_weight(&self, e: usize, e_prime: usize, e_dprime: usize) -> C64 {
        self.0[(e_dprime, e_prime)] * self.0[(e, e_dprime)]
    }
}

/// How the arm-exchange partner of the direct term is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExchangeVariant {
    /// Swap only the arrival times `T_s <-> T_i`.
    #[default]
    DelaySwap,
    /// Swap the arrival times and flip the sign of the Raman shift. This is the
    /// literal second kernel of the double-time integral; it makes the
    /// `Delta T = 0` spectrum an even function of the shift.
    MirrorShift,
}

impl ExchangeVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            ExchangeVariant::DelaySwap => "delay-swap",
            ExchangeVariant::MirrorShift => "mirror-shift",
        }
    }
}

impl std::str::FromStr for ExchangeVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "delay-swap" => Ok(ExchangeVariant::DelaySwap),
            "mirror-shift" => Ok(ExchangeVariant::MirrorShift),
            other => Err(format!(
                "unknown exchange variant '{other}' (expected delay-swap|mirror-shift)"
            )),
        }
    }
}

/// Everything the signal needs from the molecule: eigen-gaps, damping of
/// every `|a><b|` element, polarizability and the density-matrix timeline.
///
/// Immutable once built; shared read-only across scan workers.
#[derive(Debug, Clone)]
pub struct MolecularResponse {
    eig: EigenSystem,
    /// Damping rates in fs⁻¹, indexed `[a][b]`.
    damping: Vec<Vec<f64>>,
    alpha: PolarizabilityMatrix,
    timeline: DensityMatrixTimeline,
}

impl MolecularResponse {
    pub fn new(
        eig: EigenSystem,
        model: &ExcitonModel,
        alpha: PolarizabilityMatrix,
        timeline: DensityMatrixTimeline,
    ) -> Result<Self> {
        let n = eig.dim();
        if model.n_sites() != n || alpha.values().nrows() != n || timeline.dim() != n {
            return Err(Error::InvalidInput(format!(
                "dimension mismatch: eigensystem {n}, model {}, polarizability {}, timeline {}",
                model.n_sites(),
                alpha.values().nrows(),
                timeline.dim()
            )));
        }
        let damping = (0..n)
            .map(|a| (0..n).map(|b| model.linewidth(a, b)).collect())
            .collect();
        Ok(Self {
            eig,
            damping,
            alpha,
            timeline,
        })
    }

    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    pub fn eigensystem(&self) -> &EigenSystem {
        &self.eig
    }

    pub fn timeline(&self) -> &DensityMatrixTimeline {
        &self.timeline
    }

    pub fn alpha(&self) -> &PolarizabilityMatrix {
        &self.alpha
    }

    /// Damping rate of `|a><b|` in fs⁻¹.
    pub fn damping_rate(&self, a: usize, b: usize) -> f64 {
        self.damping[a][b]
    }

    /// Same damping expressed as a linewidth in eV.
    pub fn linewidth_ev(&self, a: usize, b: usize) -> f64 {
        HBAR * self.damping[a][b]
    }

    /// Same molecule with a different timeline (e.g. a shifted origin).
    pub fn with_timeline(&self, timeline: DensityMatrixTimeline) -> Result<Self> {
        if timeline.dim() != self.dim() {
            return Err(Error::InvalidInput("timeline dimension mismatch".into()));
        }
        Ok(Self {
            timeline,
            ..self.clone()
        })
    }
}
