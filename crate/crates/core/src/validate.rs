//! Invariant suite behind the `validate` mode. Each check compares a library
//! result against an independent evaluation (dense matrix exponential,
//! adaptive quadrature, brute-force Fourier sums, SVD) and records the
//! measured deviation next to its limit.

use crate::config::RunConfig;
use crate::exciton::{
    build_site_hamiltonian, diagonalize, hermiticity_defect, lindblad_generator, min_eigenvalue,
    propagate,
};
use crate::run::initial_state;
use crate::signal::overlap_w;
use crate::source::{jsa, jsa_factorized, jta, phi_tilde, PhotonSourceSpec, SourceKind};
use crate::{CMatrix, Result, C64, HBAR};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub limit: f64,
    pub bound: Bound,
}

impl Check {
    fn at_most(name: &str, measured: f64, limit: f64) -> Self {
        Self {
            name: name.to_string(),
            measured,
            limit,
            bound: Bound::AtMost,
        }
    }

    fn at_least(name: &str, measured: f64, limit: f64) -> Self {
        Self {
            name: name.to_string(),
            measured,
            limit,
            bound: Bound::AtLeast,
        }
    }

    /// NaN never passes.
    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::AtMost => self.measured <= self.limit,
            Bound::AtLeast => self.measured >= self.limit,
        }
    }

    pub fn line(&self) -> String {
        let (verdict, op) = match (self.passed(), self.bound) {
            (true, Bound::AtMost) => ("PASS", "<="),
            (true, Bound::AtLeast) => ("PASS", ">="),
            (false, Bound::AtMost) => ("FAIL", "<="),
            (false, Bound::AtLeast) => ("FAIL", ">="),
        };
        format!(
            "{verdict} {:<34} measured {:.3e} (required {op} {:.1e})",
            self.name, self.measured, self.limit
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn lines(&self) -> Vec<String> {
        self.checks.iter().map(Check::line).collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in self.lines() {
            out.push_str(&line);
            out.push('\n');
        }
        let failed = self.checks.iter().filter(|c| !c.passed()).count();
        out.push_str(&format!(
            "{} of {} checks passed\n",
            self.checks.len() - failed,
            self.checks.len()
        ));
        out
    }
}

/// Runs every check against the molecule and photon parameters of `config`.
pub fn validate(config: &RunConfig) -> Result<ValidationReport> {
    let mut checks = Vec::new();
    molecule_checks(config, &mut checks)?;

    let entangled = config
        .source_of(SourceKind::Entangled)?
        .with_omega_minus(config.scan.omega_minus);
    let factorized = config
        .source_of(SourceKind::Uncorrelated)?
        .with_omega_minus(config.scan.omega_minus);
    checks.push(Check::at_most(
        "phi_tilde normalization",
        phi_normalization_error(),
        1e-9,
    ));
    checks.push(Check::at_most(
        "W closed form vs quadrature",
        overlap_error(entangled.tau0),
        1e-8,
    ));
    checks.push(Check::at_most(
        "jta Fourier consistency",
        fourier_error(&entangled)?,
        1e-6,
    ));
    let (s2_entangled, s2_factorized) = schmidt_ratios(&entangled, &factorized)?;
    checks.push(Check::at_least(
        "Schmidt witness (entangled)",
        s2_entangled,
        0.1,
    ));
    checks.push(Check::at_most(
        "Schmidt rank one (factorized)",
        s2_factorized,
        1e-10,
    ));
    Ok(ValidationReport { checks })
}

fn molecule_checks(config: &RunConfig, checks: &mut Vec<Check>) -> Result<()> {
    let model = config.model()?;
    let h = build_site_hamiltonian(&model)?;
    let eig = diagonalize(&h)?;
    let n = eig.dim();
    let u = eig.vectors();
    let unitarity = max_abs(&(u.adjoint() * u - CMatrix::identity(n, n)));
    checks.push(Check::at_most("eigenvectors unitary", unitarity, 1e-12));
    checks.push(Check::at_most(
        "eigen reconstruction",
        max_abs(&(eig.reconstruct() - &h)),
        1e-10,
    ));

    let gen = lindblad_generator(&eig, &model)?;
    let mut trace_leak = 0.0_f64;
    for a in 0..n {
        for b in 0..n {
            let mut e = CMatrix::zeros(n, n);
            e[(a, b)] = C64::new(1.0, 0.0);
            trace_leak = trace_leak.max(gen.apply(&e).trace().norm());
        }
    }
    checks.push(Check::at_most("generator trace-free", trace_leak, 1e-12));

    let dt = config.numerics.dt;
    let rho0 = initial_state(&eig, config.molecule.initial_state)?;
    let timeline = propagate(&gen, &rho0, 2000.0, dt)?;
    let (mut trace, mut herm, mut neg) = (0.0_f64, 0.0_f64, 0.0_f64);
    for rho in timeline.samples() {
        trace = trace.max((rho.trace() - C64::new(1.0, 0.0)).norm());
        herm = herm.max(hermiticity_defect(rho));
        neg = neg.max(-min_eigenvalue(rho));
    }
    checks.push(Check::at_most("timeline trace", trace, 1e-9));
    checks.push(Check::at_most("timeline Hermiticity", herm, 1e-10));
    checks.push(Check::at_most("timeline negativity", neg, 1e-9));

    // Dense exp(L t) applied once per probe time, against the stepped
    // propagator.
    let mut drift = 0.0_f64;
    let v0 = nalgebra::DVector::from_column_slice(rho0.as_slice());
    for k in 1..=10 {
        let t = 100.0 * k as f64;
        let exact = (gen.matrix() * C64::new(t, 0.0)).exp() * &v0;
        let stepped = timeline.at(t)?;
        let diff = exact
            .iter()
            .zip(stepped.as_slice())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        drift = drift.max(diff);
    }
    checks.push(Check::at_most("propagator vs exp(Lt)", drift, 1e-7));
    Ok(())
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Adaptive Simpson on a complex integrand.
fn adaptive_simpson(f: &dyn Fn(f64) -> C64, a: f64, b: f64, tol: f64) -> C64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> C64,
        a: f64,
        b: f64,
        fa: C64,
        fm: C64,
        fb: C64,
        whole: C64,
        tol: f64,
        depth: u32,
    ) -> C64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.norm() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

fn phi_normalization_error() -> f64 {
    let norm = adaptive_simpson(&|x| C64::new(phi_tilde(x).powi(2), 0.0), 0.0, 30.0, 1e-13);
    (norm.re - 1.0).abs()
}

fn overlap_error(tau0: f64) -> f64 {
    let mut worst = 0.0_f64;
    for &omega in &[0.0, 0.059, -0.13, 0.215, 0.5] {
        for &delta_t in &[-40.0, -7.5, 0.0, 3.0, 25.0] {
            let shift = delta_t / tau0;
            let a = omega * tau0 / HBAR;
            let start = (-shift).max(0.0);
            let integrand = |x: f64| {
                C64::from_polar(phi_tilde(x) * phi_tilde(x + shift), -a * x)
            };
            let numeric = adaptive_simpson(&integrand, start, start + 25.0, 1e-14);
            worst = worst.max((numeric - overlap_w(omega, delta_t, tau0)).norm());
        }
    }
    worst
}

/// Composite Simpson over `[a, b]` with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> C64, a: f64, b: f64, n: usize) -> C64 {
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += f(a + k as f64 * h) * w;
    }
    sum * (h / 3.0)
}

/// Max deviation, relative to the peak `|jsa|`, between [`jsa`] and the
/// transform `(1/hbar^2) ∬ jta exp(+i (ws t1 + wi t2) / hbar) dt1 dt2` on a
/// 64x64 grid spanning six widths of each factor. The time integral runs in
/// `m = (t1 + t2) / 2`, `d = t1 - t2` (unit Jacobian) where the closed form
/// separates, so the tensor-product rule is evaluated as a product of two
/// one-dimensional sums.
fn fourier_error(spec: &PhotonSourceSpec) -> Result<f64> {
    let sum_width = spec.sum_width();
    let diff_width = spec.sigma0;
    let grid = |width: f64| -> Vec<f64> {
        (0..64).map(|k| -6.0 * width + 12.0 * width * k as f64 / 63.0).collect()
    };
    let (us, vs) = (grid(sum_width), grid(diff_width));

    // The amplitude starts at m = m0 with a jump, and has a cusp at d = 0.
    let m0 = if spec.phase_matching_phase { 0.5 * spec.tau0 } else { 0.0 };
    let m_len = 14.0 * spec.tau0;
    let m_panels = (m_len / 0.01).ceil() as usize * 2;
    let d_len = 48.0 * HBAR / diff_width;
    let d_panels = (d_len / 2.0).ceil() as usize * 2;
    let at_m = |m: f64| jta(spec, m, m).expect("entangled");
    let at_d = |d: f64| jta(spec, m0 + 0.5 * d, m0 - 0.5 * d).expect("entangled");
    let norm = at_m(m0);

    let m_part: Vec<C64> = us
        .iter()
        .map(|u| {
            let total = spec.omega_plus + u;
            simpson(
                |m| at_m(m) * C64::from_polar(1.0, total * m / HBAR),
                m0,
                m0 + m_len,
                m_panels,
            )
        })
        .collect();
    let d_part: Vec<C64> = vs
        .iter()
        .map(|v| {
            let diff = spec.omega_minus + v;
            let f = |d: f64| at_d(d) / norm * C64::from_polar(1.0, 0.5 * diff * d / HBAR);
            simpson(&f, -d_len, 0.0, d_panels) + simpson(&f, 0.0, d_len, d_panels)
        })
        .collect();

    let peak = jsa(spec, 0.5 * (spec.omega_plus + spec.omega_minus), 0.5 * (spec.omega_plus - spec.omega_minus))?.norm();
    let mut worst = 0.0_f64;
    for (iu, u) in us.iter().enumerate() {
        for (iv, v) in vs.iter().enumerate() {
            let (total, diff) = (spec.omega_plus + u, spec.omega_minus + v);
            let numeric = m_part[iu] * d_part[iv] / (HBAR * HBAR);
            let closed = jsa(spec, 0.5 * (total + diff), 0.5 * (total - diff))?;
            worst = worst.max((numeric - closed).norm() / peak);
        }
    }
    Ok(worst)
}

/// Second-to-first singular value ratio of the sampled entangled and
/// factorized amplitudes on 64x64 grids around the arm carriers.
fn schmidt_ratios(entangled: &PhotonSourceSpec, factorized: &PhotonSourceSpec) -> Result<(f64, f64)> {
    fn ratio(spec: &PhotonSourceSpec, width: f64, f: impl Fn(f64, f64) -> Result<C64>) -> Result<f64> {
        let (cs, ci) = spec.arm_centres();
        let axis: Vec<f64> = (0..64).map(|k| -6.0 * width + 12.0 * width * k as f64 / 63.0).collect();
        let mut m = CMatrix::zeros(64, 64);
        for (a, x) in axis.iter().enumerate() {
            for (b, y) in axis.iter().enumerate() {
                m[(a, b)] = f(cs + x, ci + y)?;
            }
        }
        let s = m.singular_values();
        Ok(s[1] / s[0])
    }
    let e = ratio(entangled, 0.5 * entangled.sum_width(), |x, y| jsa(entangled, x, y))?;
    let f = ratio(factorized, factorized.sigma_tilde0, |x, y| jsa_factorized(factorized, x, y))?;
    Ok((e, f))
}
