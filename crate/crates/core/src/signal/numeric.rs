//! Direct quadrature of the double-time signal integral.
//!
//! The integral runs over the emission time `t` and the interaction time
//! `tau`. It is evaluated in the rotated coordinates `m = (t + tau) / 2`,
//! `s = t - tau`, where the twin-photon kernels separate into a short
//! sum-time envelope and a long difference-time envelope. Composite Simpson
//! rules are used in both directions with `h_s = tau0 / step_divisor` and
//! `h_m = h_s / 2`, so that every `tau` node lands on one shared grid and
//! the density matrix is interpolated once per node.

use std::f64::consts::PI;

use crate::signal::{ExchangeVariant, MolecularResponse};
use crate::source::{
    arm_envelope, jta_difference_factor, jta_sum_factor, JointAmplitude, PhotonSourceSpec,
    SourceKind,
};
use crate::{Error, Result, C64, HBAR};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// `h_s = tau0 / step_divisor`.
    pub step_divisor: f64,
    /// Envelope truncation, in e-folds of the slowest kernel decay.
    pub tail: f64,
    /// Restrict the integral to `t >= tau`.
    pub causal: bool,
    pub exchange: ExchangeVariant,
    /// Maximum relative change allowed when the step is halved.
    pub tolerance: f64,
    /// Re-evaluate at half step and fail if the result moves more than
    /// `tolerance`.
    pub check_convergence: bool,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            step_divisor: 40.0,
            tail: 20.0,
            causal: true,
            exchange: ExchangeVariant::default(),
            tolerance: 0.01,
            check_convergence: true,
        }
    }
}

/// Which of the two kernel products of the double-time integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Term {
    Direct,
    Exchange(ExchangeVariant),
}

/// Molecular ordering of the Raman correlator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pathway {
    /// Parametric: `exp(-i w_{e''e'} (t - tau) / hbar)`.
    Parametric,
    /// Dissipative, conjugate-ordered: `exp(+i w_{e''e'} (t - tau) / hbar)`.
    Dissipative,
}

/// Entangled (or uncorrelated) signal by quadrature, parametric pathway only.
pub fn signal_numeric(
    omega_minus: f64,
    t_s: f64,
    t_i: f64,
    response: &MolecularResponse,
    spec: &PhotonSourceSpec,
    options: &QuadratureOptions,
) -> Result<C64> {
    if spec.kind == SourceKind::Classical {
        return Err(Error::UnsupportedKind {
            expected: SourceKind::Entangled,
            got: SourceKind::Classical,
        });
    }
    let (direct, exchange) = numeric_terms(omega_minus, t_s, t_i, response, spec, options)?;
    Ok(direct + exchange)
}

/// Classical pulse-pair signal: both molecular pathways contribute with the
/// same field kernel.
pub fn signal_classical(
    omega_minus: f64,
    t_s: f64,
    t_i: f64,
    response: &MolecularResponse,
    spec: &PhotonSourceSpec,
    options: &QuadratureOptions,
) -> Result<C64> {
    if spec.kind != SourceKind::Classical {
        return Err(Error::UnsupportedKind {
            expected: SourceKind::Classical,
            got: spec.kind,
        });
    }
    let (direct, exchange) = numeric_terms(omega_minus, t_s, t_i, response, spec, options)?;
    Ok(direct + exchange)
}

/// Direct and exchange contributions separately, with the pathways the
/// source kind calls for.
pub(crate) fn numeric_terms(
    omega_minus: f64,
    t_s: f64,
    t_i: f64,
    response: &MolecularResponse,
    spec: &PhotonSourceSpec,
    options: &QuadratureOptions,
) -> Result<(C64, C64)> {
    let pathways: &[Pathway] = match spec.kind {
        SourceKind::Classical => &[Pathway::Parametric, Pathway::Dissipative],
        SourceKind::Entangled | SourceKind::Uncorrelated => &[Pathway::Parametric],
    };
    converged(omega_minus, t_s, t_i, response, spec, options, pathways)
}

fn converged(
    omega_minus: f64,
    t_s: f64,
    t_i: f64,
    response: &MolecularResponse,
    spec: &PhotonSourceSpec,
    options: &QuadratureOptions,
    pathways: &[Pathway],
) -> Result<(C64, C64)> {
    if !(options.step_divisor > 0.0) || !(options.tail > 0.0) {
        return Err(Error::InvalidInput(
            "quadrature step divisor and tail must be positive".into(),
        ));
    }
    let amp = JointAmplitude::new(spec.with_omega_minus(omega_minus))?;
    let terms = [Term::Direct, Term::Exchange(options.exchange)];
    // Maps the raw integral onto the impulsive prefactor 1/(8 i pi^2 tau0).
    let scale = -2.0 / (PI * PI * HBAR.powi(3)) * spec.intensity_scale();
    let eval = |divisor: f64| -> Result<[C64; 2]> {
        let mut parts = [C64::new(0.0, 0.0); 2];
        for (part, &term) in parts.iter_mut().zip(&terms) {
            for &pathway in pathways {
                *part += integrate(&amp, term, pathway, t_s, t_i, response, options, divisor)?;
            }
            *part *= scale;
        }
        Ok(parts)
    };
    let coarse_parts = eval(options.step_divisor)?;
    if !options.check_convergence {
        return Ok((coarse_parts[0], coarse_parts[1]));
    }
    let fine_parts = eval(2.0 * options.step_divisor)?;
    let coarse = coarse_parts[0] + coarse_parts[1];
    let fine = fine_parts[0] + fine_parts[1];
    let drift = if fine.norm() > 0.0 {
        (coarse - fine).norm() / fine.norm()
    } else {
        coarse.norm()
    };
    if drift > options.tolerance {
        return Err(Error::NotConverged {
            coarse,
            fine,
            drift,
        });
    }
    Ok((fine_parts[0], fine_parts[1]))
}

/// Latest time at which the causal quadrature reads the density matrix, for
/// arrival times up to `t_s`, `t_i`. A timeline reaching this far is enough
/// for [`signal_numeric`] and [`signal_classical`].
pub fn quadrature_reach(spec: &PhotonSourceSpec, t_s: f64, t_i: f64, options: &QuadratureOptions) -> f64 {
    let causal = QuadratureOptions {
        causal: true,
        ..*options
    };
    let terms = [Term::Direct, Term::Exchange(options.exchange)];
    terms
        .iter()
        .map(|&term| window(spec, term, t_s, t_i, f64::NEG_INFINITY, f64::INFINITY, &causal).m_hi)
        .fold(f64::NEG_INFINITY, f64::max)
        // Rounding the panel count up to an even number adds at most one h_s.
        + spec.tau0 / options.step_divisor
}

/// Kernel product evaluated point by point; the quadrature uses the
/// factorized tables below, this form checks them.
#[cfg(test)]
fn kernel(amp: &JointAmplitude, term: Term, t: f64, tau: f64, t_s: f64, t_i: f64) -> C64 {
    match term {
        Term::Direct => amp.time(t - t_i, tau - t_i).conj() * amp.time(tau - t_s, t - t_i),
        Term::Exchange(ExchangeVariant::DelaySwap) => {
            amp.time(t - t_s, tau - t_s).conj() * amp.time(tau - t_i, t - t_s)
        }
        Term::Exchange(ExchangeVariant::MirrorShift) => {
            amp.time(tau - t_s, t - t_s).conj() * amp.time(t - t_s, tau - t_i)
        }
    }
}

/// The kernel product on the `(m, s)` grid, stored through its separable
/// structure. The entangled amplitude factorizes into sum- and
/// difference-time parts, so every kernel is `f(m) g(s)`; the separable
/// amplitudes factorize into a `t` part and a `tau` part instead.
enum KernelTables {
    SumDifference {
        /// Indexed by `i`.
        f: Vec<C64>,
        /// Indexed by `kk + n_neg`.
        g: Vec<C64>,
        n_neg: i64,
    },
    TimeTau {
        /// Indexed by `i + kk + n_neg` (t node).
        u: Vec<C64>,
        /// Indexed by `i - kk + n_pos` (tau node).
        v: Vec<C64>,
        n_neg: i64,
        n_pos: i64,
    },
}

impl KernelTables {
    #[allow(clippy::too_many_arguments)]
    fn build(
        spec: &PhotonSourceSpec,
        term: Term,
        t_s: f64,
        t_i: f64,
        m_lo: f64,
        h_m: f64,
        n_m: usize,
        n_pos: usize,
        n_neg: usize,
    ) -> Self {
        let (n_pos, n_neg) = (n_pos as i64, n_neg as i64);
        let mean = 0.5 * (t_s + t_i);
        let delta = t_i - t_s;
        match spec.kind {
            SourceKind::Entangled => {
                let p = |m: f64| jta_sum_factor(spec, m);
                let q = |d: f64| jta_difference_factor(spec, d);
                let first = match term {
                    Term::Direct => t_i,
                    Term::Exchange(_) => t_s,
                };
                let f = (0..=n_m)
                    .map(|i| {
                        let m = m_lo + i as f64 * h_m;
                        p(m - first).conj() * p(m - mean)
                    })
                    .collect();
                let g = (-n_neg..=n_pos)
                    .map(|kk| {
                        let s = 2.0 * kk as f64 * h_m;
                        match term {
                            Term::Direct => q(s).conj() * q(delta - s),
                            Term::Exchange(ExchangeVariant::DelaySwap) => {
                                q(s).conj() * q(-s - delta)
                            }
                            Term::Exchange(ExchangeVariant::MirrorShift) => {
                                q(-s).conj() * q(s + delta)
                            }
                        }
                    })
                    .collect();
                KernelTables::SumDifference { f, g, n_neg }
            }
            SourceKind::Uncorrelated | SourceKind::Classical => {
                let (cs, ci) = spec.arm_centres();
                let w = spec.sigma_tilde0;
                let a_s = |t: f64| arm_envelope(cs, w, t);
                let a_i = |t: f64| arm_envelope(ci, w, t);
                let u_at = |t: f64| match term {
                    Term::Direct => a_s(t - t_i).conj() * a_i(t - t_i),
                    Term::Exchange(ExchangeVariant::DelaySwap) => a_s(t - t_s).conj() * a_i(t - t_s),
                    Term::Exchange(ExchangeVariant::MirrorShift) => {
                        a_i(t - t_s).conj() * a_s(t - t_s)
                    }
                };
                let v_at = |tau: f64| match term {
                    Term::Direct => a_i(tau - t_i).conj() * a_s(tau - t_s),
                    Term::Exchange(ExchangeVariant::DelaySwap) => {
                        a_i(tau - t_s).conj() * a_s(tau - t_i)
                    }
                    Term::Exchange(ExchangeVariant::MirrorShift) => {
                        a_s(tau - t_s).conj() * a_i(tau - t_i)
                    }
                };
                let u = (-n_neg..=n_m as i64 + n_pos)
                    .map(|p| u_at(m_lo + p as f64 * h_m))
                    .collect();
                let v = (-n_pos..=n_m as i64 + n_neg)
                    .map(|j| v_at(m_lo + j as f64 * h_m))
                    .collect();
                KernelTables::TimeTau { u, v, n_neg, n_pos }
            }
        }
    }

    fn value(&self, i: usize, kk: i64) -> C64 {
        let i = i as i64;
        match self {
            KernelTables::SumDifference { f, g, n_neg } => f[i as usize] * g[(kk + n_neg) as usize],
            KernelTables::TimeTau { u, v, n_neg, n_pos } => {
                u[(i + kk + n_neg) as usize] * v[(i - kk + n_pos) as usize]
            }
        }
    }
}

/// Integration box in `(m, s)`; `s` runs over `[-s_neg, s_pos]`.
struct Window {
    m_lo: f64,
    m_hi: f64,
    s_pos: f64,
    s_neg: f64,
}

fn window(
    spec: &PhotonSourceSpec,
    term: Term,
    t_s: f64,
    t_i: f64,
    t0: f64,
    end: f64,
    options: &QuadratureOptions,
) -> Window {
    let tail = options.tail;
    let mean = 0.5 * (t_s + t_i);
    let (m_lo, m_hi, s_span) = match spec.kind {
        SourceKind::Entangled => {
            let delay = if spec.phase_matching_phase { 0.5 * spec.tau0 } else { 0.0 };
            let anchor = match term {
                Term::Direct => t_i.max(mean),
                Term::Exchange(_) => t_s.max(mean),
            };
            let m_lo = anchor + delay;
            // Two sum-time factors, each decaying at 2 / tau0.
            let m_hi = m_lo + tail * spec.tau0 / 4.0;
            let s_span = tail * HBAR / spec.sigma0 + (t_i - t_s).abs();
            (m_lo, m_hi, s_span)
        }
        SourceKind::Uncorrelated | SourceKind::Classical => {
            // Each of t and tau carries two arm envelopes.
            let reach = tail * HBAR / (2.0 * spec.sigma_tilde0);
            let (lo, hi) = (t_s.min(t_i), t_s.max(t_i));
            (lo - reach, hi + reach, (hi - lo) + 2.0 * reach)
        }
    };
    // The excited manifold is empty before the pump: tau = m - s/2 >= t0.
    let s_pos = s_span.min(2.0 * (m_hi - t0)).max(0.0);
    let s_neg = if options.causal {
        0.0
    } else {
        s_span.min(2.0 * (end - m_hi)).max(0.0)
    };
    Window {
        m_lo,
        m_hi,
        s_pos,
        s_neg,
    }
}

fn even_intervals(span: f64, h: f64) -> usize {
    let n = (span / h - 1e-9).ceil().max(0.0) as usize;
    n + n % 2
}

fn simpson_weight(k: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else if k == 0 || k == n {
        1.0 / 3.0
    } else if k % 2 == 1 {
        4.0 / 3.0
    } else {
        2.0 / 3.0
    }
}

#[allow(clippy::too_many_arguments)]
fn integrate(
    amp: &JointAmplitude,
    term: Term,
    pathway: Pathway,
    t_s: f64,
    t_i: f64,
    response: &MolecularResponse,
    options: &QuadratureOptions,
    divisor: f64,
) -> Result<C64> {
    let spec = amp.spec();
    let tl = response.timeline();
    let win = window(spec, term, t_s, t_i, tl.t0(), tl.end(), options);
    let h_s = spec.tau0 / divisor;
    let h_m = 0.5 * h_s;
    let n_m = even_intervals(win.m_hi - win.m_lo, h_m);
    let n_pos = even_intervals(win.s_pos, h_s);
    let n_neg = even_intervals(win.s_neg, h_s);
    if n_m == 0 {
        return Ok(C64::new(0.0, 0.0));
    }

    let n = response.dim();
    let nn = n * n;
    let eig = response.eigensystem();
    let sign = match pathway {
        Pathway::Parametric => -1.0,
        Pathway::Dissipative => 1.0,
    };

    // Molecular propagator summed over e'' for every s node:
    // g[k][e + n e'] = sum_e'' alpha-weight * exp(sign i w_{e''e'} s / hbar) exp(-gamma |s|).
    // Nodes k = -n_neg..=n_pos with s = k h_s; the two Simpson panels share s = 0.
    let s_nodes: Vec<(i64, f64)> = (-(n_neg as i64)..=n_pos as i64)
        .map(|k| {
            let w = match k.cmp(&0) {
                std::cmp::Ordering::Less => simpson_weight((-k) as usize, n_neg),
                std::cmp::Ordering::Greater => simpson_weight(k as usize, n_pos),
                std::cmp::Ordering::Equal => {
                    simpson_weight(0, n_neg) + simpson_weight(0, n_pos)
                }
            };
            (k, w * h_s)
        })
        .collect();
    let mut g = vec![C64::new(0.0, 0.0); s_nodes.len() * nn];
    for (k, &(kk, _)) in s_nodes.iter().enumerate() {
        let s = kk as f64 * h_s;
        for e in 0..n {
            for ep in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for epp in 0..n {
                    let decay = (-response.damping_rate(epp, ep) * s.abs()).exp();
                    let phase = sign * eig.gap(epp, ep) * s / HBAR;
                    acc += response.alpha().pathway_weight(e, ep, epp) * C64::from_polar(decay, phase);
                }
                g[k * nn + e + n * ep] = acc;
            }
        }
    }

    // Density matrix on the shared tau grid tau_j = m_lo + j h_m.
    let j_min = -(n_pos as i64);
    let j_max = n_m as i64 + n_neg as i64;
    let mut rho = vec![C64::new(0.0, 0.0); ((j_max - j_min + 1) as usize) * nn];
    for j in j_min..=j_max {
        let tau = win.m_lo + j as f64 * h_m;
        let off = ((j - j_min) as usize) * nn;
        tl.write_at(tau, &mut rho[off..off + nn])?;
    }

    let live: Vec<bool> = rho
        .chunks(nn)
        .map(|r| r.iter().any(|z| z.re != 0.0 || z.im != 0.0))
        .collect();
    let tables = KernelTables::build(spec, term, t_s, t_i, win.m_lo, h_m, n_m, n_pos, n_neg);

    let mut total = C64::new(0.0, 0.0);
    for i in 0..=n_m {
        let wm = simpson_weight(i, n_m) * h_m;
        let mut row = C64::new(0.0, 0.0);
        for (k, &(kk, ws)) in s_nodes.iter().enumerate() {
            // tau = m - s/2 sits on grid index i - kk.
            let jj = (i as i64 - kk - j_min) as usize;
            if !live[jj] {
                continue;
            }
            let kv = tables.value(i, kk);
            if kv.re == 0.0 && kv.im == 0.0 {
                continue;
            }
            let r = &rho[jj * nn..(jj + 1) * nn];
            let gk = &g[k * nn..(k + 1) * nn];
            let mut mol = C64::new(0.0, 0.0);
            for (a, b) in r.iter().zip(gk) {
                mol += a * b;
            }
            row += kv * mol * ws;
        }
        total += row * wm;
    }
    Ok(total)
}
