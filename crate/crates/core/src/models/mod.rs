//! Hamiltonians of the driven qubit/qutrit–resonator system in the frames
//! and approximations used for cat-state generation, plus the inequality
//! report that says when those approximations hold.

mod builders;
mod hamiltonian;
mod params;
mod validity;

pub use builders::{
    build_arbitrary_anharmonic, build_bloch_siegert_interaction, build_deformation_hamiltonian, build_drive_frame_exact,
    build_driven_qrm_lab, build_effective_detuned, build_effective_resonant, build_qutrit_lab, build_qutrit_rwa_harmonic,
    build_rwa_drive_frame, build_rwa_interaction, build_spurious_model, dressed_free_hamiltonian, inverse_capacitance_coupling,
    qutrit_drive_matrix,
};
pub use hamiltonian::{Modulation, Snapshot, TimeDependentHamiltonian};
pub use params::{DecoherenceParams, QubitParams, QutritMode, QutritParams, SpuriousDriveParams};
pub use validity::{check_rwa_report, ValidityEntry, ValidityInput, ValidityReport, Verdict, FAIL_RATIO, PASS_RATIO};

use crate::hilbert::HilbertError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid model parameters: {0}")]
    Invalid(String),
    #[error("model precondition violated: {0}")]
    Precondition(String),
    #[error("Hamiltonian is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}
