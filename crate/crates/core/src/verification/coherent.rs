use alloc::vec::Vec;

use num_complex::Complex64;

use super::{Formulation, ResidualReport};
use crate::geometry::Direction;
use crate::math::{binomial, cos, powi, sin, sqrt};
use crate::povm::Povm;

/// A vector in the `(N+1)`-dimensional symmetric (maximal spin) subspace of
/// `N` qubits, in the Dicke basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricState {
    pub amplitudes: Vec<Complex64>,
}

impl SymmetricState {
    pub fn norm(&self) -> f64 {
        sqrt(self.amplitudes.iter().map(|a| a.norm_sqr()).sum())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &SymmetricState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Spin-coherent state `|θ,ψ⟩^{⊗N}` with the single-qubit convention
/// `|θ,ψ⟩ = cos(θ/2)|0⟩ + e^{iψ} sin(θ/2)|1⟩`. Component `k` is
/// `√C(N,k) cos^{N-k}(θ/2) sin^k(θ/2) e^{ikψ}`.
pub fn coherent_state(copies: usize, direction: &Direction) -> SymmetricState {
    let (c, s) = (cos(direction.theta / 2.0), sin(direction.theta / 2.0));
    let amplitudes = (0..=copies)
        .map(|k| {
            let modulus = sqrt(binomial(copies, k))
                * powi(c, (copies - k) as u32)
                * powi(s, k as u32);
            Complex64::from_polar(modulus, k as f64 * direction.psi)
        })
        .collect();
    SymmetricState { amplitudes }
}

/// `Σ_r c²_r |v_r⟩⟨v_r| − I` on the symmetric subspace. Residuals are the
/// real and imaginary parts of the upper triangle (the operator is
/// Hermitian).
pub fn identity_resolution_residual(povm: &Povm) -> ResidualReport {
    let dim = povm.dimension();
    let mut op = alloc::vec![Complex64::new(0.0, 0.0); dim * dim];
    for o in &povm.outcomes {
        let v = coherent_state(povm.copies, &o.direction);
        for i in 0..dim {
            for j in i..dim {
                op[i * dim + j] += o.weight * v.amplitudes[i] * v.amplitudes[j].conj();
            }
        }
    }
    let mut residuals = Vec::with_capacity(dim * (dim + 1));
    for i in 0..dim {
        for j in i..dim {
            let target = if i == j { 1.0 } else { 0.0 };
            residuals.push(op[i * dim + j].re - target);
            residuals.push(op[i * dim + j].im);
        }
    }
    ResidualReport::new(Formulation::IdentityResolution, residuals)
}
