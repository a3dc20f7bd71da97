//! Cat-state generation in a driven qubit or qutrit coupled to a resonator.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the common double-precision case. Frequencies are
//! angular (rad/s) with ħ = 1, and the joint basis is ordered atom ⊗
//! resonator (`index = atom·N + n`).

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dynamics;
pub mod hilbert;
pub mod linalg;
pub mod models;
pub mod oracles;
pub mod scalar;

pub use scalar::{Cx, Real};

pub type C64 = Cx<f64>;
pub type Matrix64 = linalg::CMatrix<f64>;
pub type Operator64 = hilbert::Operator<f64>;
pub type State64 = hilbert::QuantumState<f64>;
pub type Hamiltonian64 = models::TimeDependentHamiltonian<f64>;
pub type Trajectory64 = dynamics::Trajectory<f64>;
pub type WignerGrid64 = analysis::WignerGrid<f64>;
