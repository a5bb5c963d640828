//! Sum-uncertainty relations from Lie-algebra structure.
//!
//! The crate builds matrix representations of the Weyl-Heisenberg algebra,
//! su(2), su(1,1) and su(n), evaluates the state-independent lower bound on
//! the (signed) sum of generator variances from weight theory, checks the
//! bound on concrete states, certifies its tightness by minimizing over the
//! unit sphere, and applies a collective-operator entanglement witness.

pub mod algebras;
pub mod entangle;
pub mod error;
pub mod exact;
pub mod matcore;
pub mod optimize;
pub mod rng;
pub mod sur;
pub mod tol;
pub mod weights;

pub use algebras::{AlgebraSpec, Bargmann, GeneratorSet};
pub use error::{Error, Result};
pub use matcore::{ComplexMatrix, StateVector};
pub use weights::DynkinLabel;
