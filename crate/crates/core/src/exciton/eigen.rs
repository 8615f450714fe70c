use nalgebra::SymmetricEigen;

use crate::{CMatrix, Error, Result, C64};

/// Eigen-decomposition of the one-exciton Hamiltonian.
///
/// `vectors` maps eigen coordinates to site coordinates: column `a` holds
/// `<n|e_a>` for every site `n`. Energies are ascending.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    energies: Vec<f64>,
    vectors: CMatrix,
}

impl EigenSystem {
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// `omega_ab = e_a - e_b` in eV.
    pub fn gap(&self, a: usize, b: usize) -> f64 {
        self.energies[a] - self.energies[b]
    }

    /// Rebuild `U diag(e) U^dagger` in the site basis.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.dim();
        let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            self.energies.iter().map(|&e| C64::new(e, 0.0)),
        ));
        &self.vectors * diag * self.vectors.adjoint()
    }
}

/// Largest entry of `|m - m^dagger|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let adj = m.adjoint();
    m.iter()
        .zip(adj.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

pub fn diagonalize(h: &CMatrix) -> Result<EigenSystem> {
    if !h.is_square() || h.nrows() == 0 {
        return Err(Error::InvalidModel(format!(
            "Hamiltonian must be a non-empty square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let scale = h.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let defect = hermiticity_defect(h);
    if defect > 1e-12 * scale {
        return Err(Error::InvalidModel(format!(
            "Hamiltonian is not Hermitian (max |H - H^dagger| = {defect:.3e})"
        )));
    }

    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..h.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let energies = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(h.nrows(), h.ncols());
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(EigenSystem { energies, vectors })
}
