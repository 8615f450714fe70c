use std::collections::BTreeMap;

use crate::{CMatrix, Error, Result, C64};

/// Open one-exciton aggregate: site energies, nearest-neighbour hopping and
/// the relaxation rates acting between eigenstates.
///
/// Rates are keyed `(from, to)` in ascending-energy eigen-index order and
/// must point downhill (`from > to`).
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitonModel {
    site_energies: Vec<f64>,
    hopping: f64,
    downhill_rates: BTreeMap<(usize, usize), f64>,
    pure_dephasing: f64,
}

impl ExcitonModel {
    pub fn new(
        site_energies: Vec<f64>,
        hopping: f64,
        downhill_rates: BTreeMap<(usize, usize), f64>,
        pure_dephasing: f64,
    ) -> Result<Self> {
        if site_energies.is_empty() {
            return Err(Error::InvalidModel("site list is empty".into()));
        }
        if let Some(e) = site_energies.iter().find(|e| !e.is_finite()) {
            return Err(Error::InvalidModel(format!("non-finite site energy {e}")));
        }
        if !hopping.is_finite() {
            return Err(Error::InvalidModel("hopping must be finite".into()));
        }
        let n = site_energies.len();
        for (&(from, to), &rate) in &downhill_rates {
            if from >= n || to >= n {
                return Err(Error::InvalidModel(format!(
                    "rate ({from}->{to}) references an eigenstate outside 0..{n}"
                )));
            }
            if from <= to {
                return Err(Error::InvalidModel(format!(
                    "rate ({from}->{to}) is not downhill"
                )));
            }
            if !(rate >= 0.0 && rate.is_finite()) {
                return Err(Error::InvalidModel(format!(
                    "rate ({from}->{to}) = {rate} must be a finite non-negative number"
                )));
            }
        }
        if !(pure_dephasing >= 0.0 && pure_dephasing.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "pure dephasing {pure_dephasing} must be finite and non-negative"
            )));
        }
        Ok(Self {
            site_energies,
            hopping,
            downhill_rates,
            pure_dephasing,
        })
    }

    /// Trimer used for the reference spectra: site energies 2.25/2.10/2.10 eV,
    /// J = 30 meV, with stand-in relaxation rates.
    pub fn reference_trimer() -> Self {
        let rates = BTreeMap::from([
            ((2, 1), 1.0 / 200.0),
            ((1, 0), 1.0 / 500.0),
            ((2, 0), 1.0 / 1000.0),
        ]);
        Self::new(vec![2.25, 2.10, 2.10], 0.03, rates, 0.003)
            .expect("reference trimer is valid")
    }

    pub fn n_sites(&self) -> usize {
        self.site_energies.len()
    }

    pub fn site_energies(&self) -> &[f64] {
        &self.site_energies
    }

    pub fn hopping(&self) -> f64 {
        self.hopping
    }

    pub fn downhill_rates(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.downhill_rates
    }

    /// Pure-dephasing rate in fs⁻¹.
    pub fn pure_dephasing(&self) -> f64 {
        self.pure_dephasing
    }

    /// Total downhill rate out of eigenstate `a` (fs⁻¹).
    pub fn outflow(&self, a: usize) -> f64 {
        self.downhill_rates
            .iter()
            .filter(|(&(from, _), _)| from == a)
            .map(|(_, &k)| k)
            .sum()
    }

    /// Damping rate (fs⁻¹) of the eigenbasis element `|a><b|`.
    ///
    /// Coherences pick up half of each state's outflow plus `2 * gamma_pd`;
    /// populations decay with their outflow.
    pub fn linewidth(&self, a: usize, b: usize) -> f64 {
        if a == b {
            self.outflow(a)
        } else {
            0.5 * (self.outflow(a) + self.outflow(b)) + 2.0 * self.pure_dephasing
        }
    }

    /// Same model with every relaxation and dephasing rate multiplied by `factor`.
    pub fn with_scaled_rates(&self, factor: f64) -> Result<Self> {
        let rates = self
            .downhill_rates
            .iter()
            .map(|(&k, &v)| (k, v * factor))
            .collect();
        Self::new(
            self.site_energies.clone(),
            self.hopping,
            rates,
            self.pure_dephasing * factor,
        )
    }
}

/// One-exciton Hamiltonian in the site basis: site energies on the diagonal
/// and `-J` between neighbours.
pub fn build_site_hamiltonian(model: &ExcitonModel) -> Result<CMatrix> {
    let n = model.n_sites();
    if n == 0 {
        return Err(Error::InvalidModel("site list is empty".into()));
    }
    let mut h = CMatrix::zeros(n, n);
    for (i, &e) in model.site_energies.iter().enumerate() {
        h[(i, i)] = C64::new(e, 0.0);
    }
    for i in 0..n.saturating_sub(1) {
        h[(i, i + 1)] = C64::new(-model.hopping, 0.0);
        h[(i + 1, i)] = C64::new(-model.hopping, 0.0);
    }
    Ok(h)
}
