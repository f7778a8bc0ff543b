//! Linear differential operators in `(u, v)` with 2×2 complex matrix
//! coefficients, stored in the Pauli basis.

mod cmat;
mod diffop;
mod quad;
mod spinor;

pub use cmat::{frobenius, from_dense, mat_vec, pauli_mul, to_dense, CMat, Pauli, PauliVec};
pub use diffop::{CompiledOp, DiffOp, MultiIndex};
pub use quad::{bump, bump_spinors, hermiticity_defect, Quadrature, Rect, DEFAULT_NODES};
pub use spinor::SpinorField;

/// Largest total derivative order an operator may reach.
pub const MAX_ORDER: usize = 4;
