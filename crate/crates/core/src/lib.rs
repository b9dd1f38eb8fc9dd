//! Construction, verification and certification of minimal optimal POVMs
//! for `N` identically prepared qubits.
//!
//! An optimal POVM here is a finite set of weighted spin-coherent projectors
//! `c²_r |θ_r,ψ_r⟩⟨θ_r,ψ_r|^{⊗N}` that resolves the identity on the
//! symmetric subspace. Equivalently the weighted directions `(c²_r, n̂_r)`
//! form a weighted spherical design of degree `N` with total weight `N+1`.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command line
//! and thread-level parallelism live in the `povm-forge` companion crate.
//!
//! Modules:
//! - [`geometry`]: directions, rotations, associated Legendre functions and
//!   exact spherical quadrature.
//! - [`povm`]: the POVM data model, the catalog of known minimal solutions,
//!   gauge fixing and comparison up to rotation.
//! - [`verification`]: every equivalent form of the optimality conditions,
//!   mean fidelity and Shannon gain.
//! - [`bounds`]: sum-of-squares lower-bound certificates and the counting
//!   formula for the minimal number of outcomes.
//! - [`solver`]: multistart Levenberg–Marquardt search for new solutions.
//! - [`simulate`]: Monte Carlo estimation of the mean fidelity.

#![no_std]
#![forbid(unsafe_code)]
// `!(x <= tol)` is used deliberately so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bounds;
mod error;
pub mod geometry;
pub(crate) mod math;
pub mod povm;
pub mod simulate;
pub mod solver;
pub mod verification;

pub use error::{Error, Result};
pub use geometry::{Direction, QuadratureRule, Rotation};
pub use povm::{CatalogEntry, Outcome, Povm};
