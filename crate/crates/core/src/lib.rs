//! Numerical laboratory for states living in symmetric subspaces.
//!
//! The crate builds symmetric-subspace states over `m` sites of `n` qubits
//! each, reduces them to two sites, and measures how entangled (and how far
//! from separable) those reductions are:
//!
//! - [`linalg`]: dense complex matrices, Hermitian eigendecomposition,
//!   partial trace/transpose, Schmidt decompositions, entropies.
//! - [`symspace`]: occupation-number bases of symmetric subspaces, their
//!   isometric embeddings, symmetric projectors, site permutations.
//! - [`states`]: Haar sampling, random symmetric states, the symmetric
//!   maximally entangled state and the isotropic twirl state, plus fast
//!   combinatorial two-site reductions cross-checked against dense oracles.
//! - [`entanglement`]: two-qubit entanglement of formation, negativity/PPT,
//!   trace-norm distance to the PPT set, and the entropy/Pinsker bound chain.
//! - [`symtest`]: symmetrization-test measurements (projector semantics, a
//!   didactic controlled-permutation circuit, and the paired two-stage test).
//! - [`experiments`]: reproducible seeded sweeps with CSV/JSON emission,
//!   driven by the `symsep` binary.

pub mod entanglement;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod states;
pub mod symspace;
pub mod symtest;

pub use error::{Error, Result};
