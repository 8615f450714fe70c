use crate::exciton::{hermiticity_defect, EigenSystem, Superoperator};
use crate::{CMatrix, Error, Result, C64};

/// Reduced density matrix sampled on a uniform grid `t0 + k * dt`, in the
/// eigenbasis.
///
/// `t0` is the instant of the impulsive resonant pump: the excited manifold
/// is empty before it, so lookups at `t < t0` return the zero matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrixTimeline {
    t0: f64,
    dt: f64,
    samples: Vec<CMatrix>,
}

impl DensityMatrixTimeline {
    pub fn new(t0: f64, dt: f64, samples: Vec<CMatrix>) -> Result<Self> {
        if !(dt > 0.0) || samples.is_empty() {
            return Err(Error::InvalidInput(
                "timeline needs dt > 0 and at least one sample".into(),
            ));
        }
        let n = samples[0].nrows();
        if samples.iter().any(|s| s.nrows() != n || s.ncols() != n) {
            return Err(Error::InvalidInput("timeline samples differ in shape".into()));
        }
        Ok(Self { t0, dt, samples })
    }

    /// Timeline holding the same matrix at every sample.
    pub fn constant(rho: CMatrix, t0: f64, dt: f64, horizon: f64) -> Result<Self> {
        let steps = step_count(horizon, dt)?;
        Self::new(t0, dt, vec![rho; steps + 1])
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn end(&self) -> f64 {
        self.t0 + self.dt * (self.samples.len() - 1) as f64
    }

    pub fn dim(&self) -> usize {
        self.samples[0].nrows()
    }

    pub fn samples(&self) -> &[CMatrix] {
        &self.samples
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples.len()).map(move |k| self.t0 + self.dt * k as f64)
    }

    /// Same samples with the origin moved by `delta`.
    pub fn shifted(&self, delta: f64) -> Self {
        Self {
            t0: self.t0 + delta,
            ..self.clone()
        }
    }

    /// Cubic (four-point Lagrange) interpolation of every entry.
    pub fn at(&self, t: f64) -> Result<CMatrix> {
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        self.write_at(t, out.as_mut_slice())?;
        Ok(out)
    }

    /// Interpolate into a column-major `n * n` buffer.
    pub fn write_at(&self, t: f64, out: &mut [C64]) -> Result<()> {
        let end = self.end();
        if t > end + 1e-9 * self.dt.max(1.0) || t.is_nan() {
            return Err(Error::TimelineOutOfRange { t, end });
        }
        out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        if t < self.t0 {
            return Ok(());
        }
        let len = self.samples.len();
        if len == 1 {
            out.copy_from_slice(self.samples[0].as_slice());
            return Ok(());
        }
        let x = ((t - self.t0) / self.dt).min((len - 1) as f64);
        let stencil = len.min(4);
        let i = (x.floor() as usize).min(len - 1);
        let start = i.saturating_sub(1).min(len - stencil);
        for (k, sample) in self.samples[start..start + stencil].iter().enumerate() {
            let w = lagrange_weight(x - start as f64, k, stencil);
            for (o, z) in out.iter_mut().zip(sample.as_slice()) {
                *o += z * w;
            }
        }
        Ok(())
    }
}

fn lagrange_weight(x: f64, k: usize, m: usize) -> f64 {
    (0..m)
        .filter(|&j| j != k)
        .map(|j| (x - j as f64) / (k as f64 - j as f64))
        .product()
}

fn step_count(horizon: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidInput(format!("time step must be positive, got {dt}")));
    }
    if !(horizon >= 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidInput(format!(
            "horizon must be non-negative, got {horizon}"
        )));
    }
    Ok((horizon / dt - 1e-9).ceil().max(0.0) as usize)
}

/// Propagate `rho0` from `t = 0` with the exact one-step propagator
/// `exp(L dt)`, applied repeatedly. Samples are spaced by `dt` and cover
/// `[0, horizon]`.
pub fn propagate(
    gen: &Superoperator,
    rho0: &CMatrix,
    horizon: f64,
    dt: f64,
) -> Result<DensityMatrixTimeline> {
    let steps = step_count(horizon, dt)?;
    let n = gen.dim();
    if rho0.nrows() != n || rho0.ncols() != n {
        return Err(Error::InvalidInput(format!(
            "initial state must be {n}x{n}, got {}x{}",
            rho0.nrows(),
            rho0.ncols()
        )));
    }
    if hermiticity_defect(rho0) > 1e-10 {
        return Err(Error::InvalidInput("initial state is not Hermitian".into()));
    }
    let tr = rho0.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "initial state has trace {tr}, expected 1"
        )));
    }

    let step = (gen.matrix() * C64::new(dt, 0.0)).exp();
    let mut samples = Vec::with_capacity(steps + 1);
    let mut v = nalgebra::DVector::from_column_slice(rho0.as_slice());
    samples.push(rho0.clone());
    for _ in 0..steps {
        v = &step * v;
        samples.push(CMatrix::from_column_slice(n, n, v.as_slice()));
    }
    DensityMatrixTimeline::new(0.0, dt, samples)
}

/// Pure state of one excited site expressed in the eigenbasis:
/// `rho_ab = conj(U[site, a]) * U[site, b]`.
pub fn site_localized_state(eig: &EigenSystem, site: usize) -> Result<CMatrix> {
    let n = eig.dim();
    if site >= n {
        return Err(Error::InvalidInput(format!(
            "site {site} out of range for {n} sites"
        )));
    }
    let u = eig.vectors();
    Ok(CMatrix::from_fn(n, n, |a, b| u[(site, a)].conj() * u[(site, b)]))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(rho: &CMatrix) -> f64 {
    let sym = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
    nalgebra::SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}
