use std::f64::consts::PI;

use crate::signal::{overlap_w, ExchangeVariant, MolecularResponse};
use crate::source::{PhotonSourceSpec, SourceKind};
use crate::{Error, Result, C64};

/// Impulsive-limit coincidence signal for entangled twin photons: the direct
/// term plus its arm-exchange partner (see [`ExchangeVariant`]).
///
/// The density matrix is read at `T_i + tau0 / 2`; resonances are dressed with
/// `sigma0` and the `e'' e'` damping.
pub fn signal_impulsive(
    omega_minus: f64,
    t_s: f64,
    t_i: f64,
    response: &MolecularResponse,
    spec: &PhotonSourceSpec,
    exchange: ExchangeVariant,
) -> Result<C64> {
    if spec.kind != SourceKind::Entangled {
        return Err(Error::UnsupportedKind {
            expected: SourceKind::Entangled,
            got: spec.kind,
        });
    }
    let direct = direct_term(omega_minus, t_s, t_i, response, spec)?;
    let partner = match exchange {
        ExchangeVariant::DelaySwap => direct_term(omega_minus, t_i, t_s, response, spec)?,
        ExchangeVariant::MirrorShift => direct_term(-omega_minus, t_i, t_s, response, spec)?,
    };
    Ok(direct + partner)
}

/// One term of the impulsive expression, without the exchange partner.
pub(crate) fn direct_term(
    omega_minus: f64,
    t_s: f64,
    t_i: f64,
    response: &MolecularResponse,
    spec: &PhotonSourceSpec,
) -> Result<C64> {
    let delta_t = t_i - t_s;
    let delay = if spec.phase_matching_phase { 0.5 * spec.tau0 } else { 0.0 };
    let rho = response.timeline().at(t_i + delay)?;
    let eig = response.eigensystem();
    let n = response.dim();

    let varpi = omega_minus + spec.omega_plus;
    let prefactor = C64::from_polar(1.0, -0.5 * varpi * delta_t / crate::HBAR)
        / C64::new(0.0, 8.0 * PI * PI * spec.tau0)
        * spec.intensity_scale();

    let mut sum = C64::new(0.0, 0.0);
    for e in 0..n {
        for ep in 0..n {
            let r = rho[(e, ep)];
            if r == C64::new(0.0, 0.0) {
                continue;
            }
            for epp in 0..n {
                let denom = C64::new(
                    omega_minus - eig.gap(epp, ep) + 0.5 * eig.gap(e, ep),
                    spec.sigma0 + response.linewidth_ev(epp, ep),
                );
                let w = overlap_w(omega_minus - eig.gap(epp, e), delta_t, spec.tau0);
                sum += response.alpha().pathway_weight(e, ep, epp) * r * w / denom;
            }
        }
    }
    Ok(prefactor * sum)
}
