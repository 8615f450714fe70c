use crate::{C64, HBAR};

/// Overlap of the delayed and undelayed twin-photon wavepackets,
///
/// ```text
/// W = ∫ exp(-i Ω tau0 x / hbar) phi~(x) phi~(x + ΔT / tau0) dx
/// ```
///
/// in closed form for `phi~(x) = 2 theta(x) exp(-2x)`. `Ω` in eV, `ΔT` and
/// `tau0` in fs. `W(0, 0) = 1` and `|W|` falls as `exp(-2 |ΔT| / tau0)`.
pub fn overlap_w(omega: f64, delta_t: f64, tau0: f64) -> C64 {
    let a = omega * tau0 / HBAR;
    let shift = delta_t / tau0;
    let denom = C64::new(4.0, a);
    if shift >= 0.0 {
        C64::new(4.0 * (-2.0 * shift).exp(), 0.0) / denom
    } else {
        C64::from_polar(4.0 * (2.0 * shift).exp(), a * shift) / denom
    }
}
