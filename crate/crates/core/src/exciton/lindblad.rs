use crate::exciton::{EigenSystem, ExcitonModel};
use crate::{CMatrix, Error, Result, C64, HBAR};

/// Linear map on `n x n` eigenbasis density matrices, stored as an
/// `n^2 x n^2` matrix acting on column-major `vec(rho)`.
#[derive(Debug, Clone)]
pub struct Superoperator {
    n: usize,
    matrix: CMatrix,
}

impl Superoperator {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let v = nalgebra::DVector::from_column_slice(rho.as_slice());
        let out = &self.matrix * v;
        CMatrix::from_column_slice(self.n, self.n, out.as_slice())
    }

    /// Build the matrix representation of an arbitrary linear action.
    pub(crate) fn from_action(n: usize, action: impl Fn(&CMatrix) -> CMatrix) -> Self {
        let mut matrix = CMatrix::zeros(n * n, n * n);
        for col in 0..n * n {
            let mut basis = CMatrix::zeros(n, n);
            basis[(col % n, col / n)] = C64::new(1.0, 0.0);
            let image = action(&basis);
            for (row, z) in image.as_slice().iter().enumerate() {
                matrix[(row, col)] = *z;
            }
        }
        Self { n, matrix }
    }
}

/// `rate * (L rho L^dagger - 1/2 {L^dagger L, rho})`.
fn dissipator(l: &CMatrix, rate: f64, rho: &CMatrix) -> CMatrix {
    let ldl = l.adjoint() * l;
    let r = C64::new(rate, 0.0);
    let half = C64::new(0.5, 0.0);
    (l * rho * l.adjoint() - (&ldl * rho + rho * &ldl) * half) * r
}

fn projector(n: usize, from: usize, to: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(to, from)] = C64::new(1.0, 0.0);
    m
}

/// Secular Lindblad generator in the eigenbasis.
///
/// Coherent part `-(i/hbar)[diag(e), rho]`; downhill jumps
/// `L = |e_to><e_from|` with the model's rates; pure dephasing through one
/// dissipator per eigenprojector `P_k` with rate `2 * gamma_pd`, so that a
/// coherence `rho_ab` decays at `2 * gamma_pd` from dephasing alone.
pub fn lindblad_generator(eig: &EigenSystem, model: &ExcitonModel) -> Result<Superoperator> {
    let n = eig.dim();
    if n != model.n_sites() {
        return Err(Error::InvalidModel(format!(
            "eigensystem has {n} states but model has {} sites",
            model.n_sites()
        )));
    }
    for &(from, to) in model.downhill_rates().keys() {
        if from <= to || from >= n {
            return Err(Error::InvalidModel(format!(
                "rate ({from}->{to}) is not a downhill eigenstate pair"
            )));
        }
    }

    // Energies relative to the ground level keep the commutator well scaled.
    let e0 = eig.energies()[0];
    let h = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new((eig.energies()[i] - e0) / HBAR, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let jumps: Vec<(CMatrix, f64)> = model
        .downhill_rates()
        .iter()
        .filter(|(_, &k)| k > 0.0)
        .map(|(&(from, to), &k)| (projector(n, from, to), k))
        .collect();
    let dephasing: Vec<CMatrix> = if model.pure_dephasing() > 0.0 {
        (0..n).map(|k| projector(n, k, k)).collect()
    } else {
        Vec::new()
    };
    let gamma = 2.0 * model.pure_dephasing();
    let minus_i = C64::new(0.0, -1.0);

    Ok(Superoperator::from_action(n, |rho| {
        let mut out = (&h * rho - rho * &h) * minus_i;
        for (l, k) in &jumps {
            out += dissipator(l, *k, rho);
        }
        for p in &dephasing {
            out += dissipator(p, gamma, rho);
        }
        out
    }))
}
