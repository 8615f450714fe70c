//! One-exciton aggregate: Hamiltonian, eigenbasis and open-system dynamics.

mod eigen;
mod lindblad;
mod model;
mod propagate;

pub use eigen::{diagonalize, hermiticity_defect, EigenSystem};
pub use lindblad::{lindblad_generator, Superoperator};
pub use model::{build_site_hamiltonian, ExcitonModel};
pub use propagate::{min_eigenvalue, propagate, site_localized_state, DensityMatrixTimeline};
