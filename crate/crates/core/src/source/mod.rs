//! Two-photon amplitudes for the three source kinds.
//!
//! Frequency-domain amplitudes take energies in eV. Time-domain amplitudes
//! use the forward convention
//!
//! ```text
//! Phi~(t1, t2) = 1/(4 pi^2) ∬ Phi(w1, w2) exp(-i (w1 t1 + w2 t2) / hbar) dw1 dw2
//! ```
//!
//! and are evaluated in closed form.

use std::f64::consts::PI;

use crate::{Error, Result, C64, HBAR};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SourceKind {
    Entangled,
    Uncorrelated,
    Classical,
}

impl SourceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SourceKind::Entangled => "entangled",
            SourceKind::Uncorrelated => "uncorrelated",
            SourceKind::Classical => "classical",
        }
    }

    pub const ALL: [SourceKind; 3] = [
        SourceKind::Entangled,
        SourceKind::Uncorrelated,
        SourceKind::Classical,
    ];
}

impl std::fmt::Display for SourceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SourceKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "entangled" => Ok(SourceKind::Entangled),
            "uncorrelated" => Ok(SourceKind::Uncorrelated),
            "classical" => Ok(SourceKind::Classical),
            other => Err(format!(
                "unknown source kind '{other}' (expected entangled|uncorrelated|classical)"
            )),
        }
    }
}

/// Parameters of a photon source. `omega_minus` is the scanned Raman-shift
/// setting; everything else is fixed for a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonSourceSpec {
    pub kind: SourceKind,
    /// Sum-frequency centre (eV).
    pub omega_plus: f64,
    /// Difference-frequency centre (eV).
    pub omega_minus: f64,
    /// Narrowband width of the pump envelope (eV).
    pub sigma0: f64,
    /// Entanglement time / pulse time (fs).
    pub tau0: f64,
    /// Per-photon bandwidth of the non-entangled kinds (eV).
    pub sigma_tilde0: f64,
    /// Keep the `exp(i k L / 2)` phase-matching phase. Dropping it removes the
    /// `tau0 / 2` delay of the twin-photon wavepacket.
    pub phase_matching_phase: bool,
}

impl PhotonSourceSpec {
    /// Validated spec with `sigma_tilde0 = hbar / (2 tau0)`.
    pub fn new(
        kind: SourceKind,
        omega_plus: f64,
        omega_minus: f64,
        sigma0: f64,
        tau0: f64,
    ) -> Result<Self> {
        let spec = Self {
            kind,
            omega_plus,
            omega_minus,
            sigma0,
            tau0,
            sigma_tilde0: HBAR / (2.0 * tau0),
            phase_matching_phase: true,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Source used for the reference spectra: sigma0 = 1 meV, tau0 = 25 fs,
    /// omega_plus = 0.3 eV.
    pub fn reference(kind: SourceKind) -> Self {
        Self::new(kind, 0.3, 0.0, 0.001, 25.0).expect("reference source is valid")
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("{name} must be positive, got {v}")))
            }
        };
        positive("sigma0", self.sigma0)?;
        positive("tau0", self.tau0)?;
        positive("sigma_tilde0", self.sigma_tilde0)?;
        if !self.omega_plus.is_finite() || !self.omega_minus.is_finite() {
            return Err(Error::InvalidInput("source frequencies must be finite".into()));
        }
        Ok(())
    }

    pub fn with_kind(mut self, kind: SourceKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn with_omega_minus(mut self, omega_minus: f64) -> Self {
        self.omega_minus = omega_minus;
        self
    }

    /// Also resets `sigma_tilde0` to `hbar / (2 tau0)`; override it afterwards
    /// with [`PhotonSourceSpec::with_sigma_tilde0`] if needed.
    pub fn with_tau0(mut self, tau0: f64) -> Self {
        self.tau0 = tau0;
        self.sigma_tilde0 = HBAR / (2.0 * tau0);
        self
    }

    pub fn with_sigma0(mut self, sigma0: f64) -> Self {
        self.sigma0 = sigma0;
        self
    }

    pub fn with_sigma_tilde0(mut self, sigma_tilde0: f64) -> Self {
        self.sigma_tilde0 = sigma_tilde0;
        self
    }

    /// Width `2 hbar / tau0` (eV) of the sum-frequency factor.
    pub fn sum_width(&self) -> f64 {
        2.0 * HBAR / self.tau0
    }

    /// Carrier frequencies of the signal and idler arms (eV).
    pub fn arm_centres(&self) -> (f64, f64) {
        (
            0.5 * (self.omega_plus + self.omega_minus),
            0.5 * (self.omega_plus - self.omega_minus),
        )
    }

    /// The closed-form impulsive signal assumes a narrowband pump envelope.
    pub fn narrowband_warning(&self) -> Option<String> {
        let limit = HBAR / self.tau0;
        (self.kind == SourceKind::Entangled && self.sigma0 > 0.1 * limit).then(|| {
            format!(
                "sigma0 = {:.3e} eV is not much smaller than hbar/tau0 = {:.3e} eV",
                self.sigma0, limit
            )
        })
    }

    /// `1 / ∬ |Phi|^2 dw_s dw_i`, the factor that normalizes the source to
    /// unit frequency-integrated intensity.
    pub fn intensity_scale(&self) -> f64 {
        match self.kind {
            // ∫A^2 dv = pi/(2 sigma0), ∫|phi|^2 du = pi Gamma, Jacobian 1/2.
            SourceKind::Entangled => 4.0 * self.sigma0 / (PI * PI * self.sum_width()),
            SourceKind::Uncorrelated | SourceKind::Classical => {
                4.0 * self.sigma_tilde0 * self.sigma_tilde0 / (PI * PI)
            }
        }
    }

    fn require(&self, expected: SourceKind) -> Result<()> {
        if self.kind == expected {
            Ok(())
        } else {
            Err(Error::UnsupportedKind {
                expected,
                got: self.kind,
            })
        }
    }
}

fn lorentzian(x: f64, width: f64) -> f64 {
    width / (x * x + width * width)
}

/// Entangled joint spectral amplitude
/// `A(ws - wi - w_minus) * phi(ws + wi - w_plus) * exp(i (ws + wi - w_plus) tau0 / (2 hbar))`.
pub fn jsa(spec: &PhotonSourceSpec, omega_s: f64, omega_i: f64) -> Result<C64> {
    spec.require(SourceKind::Entangled)?;
    let v = omega_s - omega_i - spec.omega_minus;
    let u = omega_s + omega_i - spec.omega_plus;
    let g = C64::new(0.0, spec.sum_width());
    let phi = g / (u + g);
    let phase = if spec.phase_matching_phase {
        C64::from_polar(1.0, u * spec.tau0 / (2.0 * HBAR))
    } else {
        C64::new(1.0, 0.0)
    };
    Ok(phi * phase * lorentzian(v, spec.sigma0))
}

/// Entangled joint temporal amplitude, closed form of the inverse transform
/// of [`jsa`].
///
/// With `m = (t1 + t2) / 2` and `d = t1 - t2`:
///
/// ```text
/// Phi~ = hbar/(2 tau0) * exp(-i w_plus m / hbar) * theta(m - tau0/2) exp(-2 (m - tau0/2) / tau0)
///        * exp(-sigma0 |d| / (2 hbar)) * exp(-i w_minus d / (2 hbar))
/// ```
///
/// The step is closed at its edge (right limit).
pub fn jta(spec: &PhotonSourceSpec, t1: f64, t2: f64) -> Result<C64> {
    spec.require(SourceKind::Entangled)?;
    Ok(jta_unchecked(spec, t1, t2))
}

pub(crate) fn jta_unchecked(spec: &PhotonSourceSpec, t1: f64, t2: f64) -> C64 {
    jta_sum_factor(spec, 0.5 * (t1 + t2)) * jta_difference_factor(spec, t1 - t2)
}

/// Sum-time part of [`jta`]: everything that depends on `m = (t1 + t2) / 2`.
pub(crate) fn jta_sum_factor(spec: &PhotonSourceSpec, m: f64) -> C64 {
    let delay = if spec.phase_matching_phase { 0.5 * spec.tau0 } else { 0.0 };
    let rel = m - delay;
    if rel < -1e-12 * spec.tau0 {
        return C64::new(0.0, 0.0);
    }
    let amp = HBAR / (2.0 * spec.tau0) * (-2.0 * rel.max(0.0) / spec.tau0).exp();
    C64::from_polar(amp, -spec.omega_plus * m / HBAR)
}

/// Difference-time part of [`jta`], a function of `d = t1 - t2`.
pub(crate) fn jta_difference_factor(spec: &PhotonSourceSpec, d: f64) -> C64 {
    C64::from_polar(
        (-spec.sigma0 * d.abs() / (2.0 * HBAR)).exp(),
        -0.5 * spec.omega_minus * d / HBAR,
    )
}

/// Dimensionless wavepacket `phi~(x) = 2 theta(x) exp(-2x)`, unit-normalized
/// in `∫ |phi~|^2 dx`. `x = 0` takes the right limit.
pub fn phi_tilde(x: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else {
        2.0 * (-2.0 * x).exp()
    }
}

/// Separable amplitude `g_s(ws) g_i(wi)`: two Lorentzians of half-width
/// `sigma_tilde0` centred on the arm carriers.
pub fn jsa_factorized(spec: &PhotonSourceSpec, omega_s: f64, omega_i: f64) -> Result<C64> {
    spec.require(SourceKind::Uncorrelated)?;
    Ok(jsa_factorized_unchecked(spec, omega_s, omega_i))
}

fn jsa_factorized_unchecked(spec: &PhotonSourceSpec, omega_s: f64, omega_i: f64) -> C64 {
    let (cs, ci) = spec.arm_centres();
    let w = spec.sigma_tilde0;
    C64::new(lorentzian(omega_s - cs, w) * lorentzian(omega_i - ci, w), 0.0)
}

/// Time-domain envelope of one arm: `1/2 exp(-w |t| / hbar) exp(-i c t / hbar)`,
/// the transform (with the 1/(2 pi) convention) of `w / (x^2 + w^2)` centred on `c`.
pub(crate) fn arm_envelope(centre: f64, width: f64, t: f64) -> C64 {
    C64::from_polar(0.5 * (-width * t.abs() / HBAR).exp(), -centre * t / HBAR)
}

/// Time-domain amplitude of the separable source, `f_s(t1) f_i(t2)`.
pub fn jta_factorized(spec: &PhotonSourceSpec, t1: f64, t2: f64) -> Result<C64> {
    spec.require(SourceKind::Uncorrelated)?;
    Ok(jta_factorized_unchecked(spec, t1, t2))
}

pub(crate) fn jta_factorized_unchecked(spec: &PhotonSourceSpec, t1: f64, t2: f64) -> C64 {
    let (cs, ci) = spec.arm_centres();
    let w = spec.sigma_tilde0;
    arm_envelope(cs, w, t1) * arm_envelope(ci, w, t2)
}

/// Classical pulse pair at time `t` relative to each pulse centre: two
/// c-number envelopes with carriers `(w_plus ± w_minus)/2` and exponential
/// profile of spectral half-width `sigma_tilde0`.
pub fn classical_pulses(spec: &PhotonSourceSpec, t: f64) -> Result<(C64, C64)> {
    spec.require(SourceKind::Classical)?;
    let (cs, ci) = spec.arm_centres();
    let w = spec.sigma_tilde0;
    Ok((arm_envelope(cs, w, t), arm_envelope(ci, w, t)))
}

/// Evaluator pairing a source's frequency- and time-domain amplitudes.
///
/// For the classical kind the "amplitude" is the product of the two pulse
/// envelopes, which enters the signal the same way as a separable
/// two-photon amplitude.
#[derive(Debug, Clone, Copy)]
pub struct JointAmplitude {
    spec: PhotonSourceSpec,
}

impl JointAmplitude {
    pub fn new(spec: PhotonSourceSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self { spec })
    }

    pub fn spec(&self) -> &PhotonSourceSpec {
        &self.spec
    }

    /// Every kind here has an analytic time-domain form.
    pub fn closed_form(&self) -> bool {
        true
    }

    pub fn frequency(&self, omega_s: f64, omega_i: f64) -> C64 {
        match self.spec.kind {
            SourceKind::Entangled => jsa(&self.spec, omega_s, omega_i).expect("kind checked"),
            SourceKind::Uncorrelated | SourceKind::Classical => {
                jsa_factorized_unchecked(&self.spec, omega_s, omega_i)
            }
        }
    }

    pub fn time(&self, t1: f64, t2: f64) -> C64 {
        match self.spec.kind {
            SourceKind::Entangled => jta_unchecked(&self.spec, t1, t2),
            SourceKind::Uncorrelated | SourceKind::Classical => {
                jta_factorized_unchecked(&self.spec, t1, t2)
            }
        }
    }
}
