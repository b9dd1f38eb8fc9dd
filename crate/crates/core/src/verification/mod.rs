//! Optimality checks for a POVM.
//!
//! A set of weighted coherent projectors is an optimal POVM when it resolves
//! the identity on the symmetric subspace. That single condition is checked
//! here in six equivalent forms: the operator identity itself, the pointwise
//! completeness kernel, the Legendre moments, the monomial moments, the
//! Cartesian moment tensors and their contraction with each outcome
//! direction. The zero sets coincide; the residual magnitudes do not.

mod coherent;
mod fidelity;
mod residuals;

pub use coherent::{coherent_state, identity_resolution_residual, SymmetricState};
pub use fidelity::{mean_fidelity, optimal_fidelity, shannon_gain, FidelityMethod};
pub use residuals::{
    contracted_residuals, legendre_residuals, monomial_residuals, monomial_target,
    pointwise_completeness_residual, tensor_residuals, MomentTensor,
};
pub(crate) use residuals::{contracted_moment, moment_rows};

use alloc::vec::Vec;
use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{sphere_rule, Direction};
use crate::povm::{validate, Povm, Violation};

/// Default pass threshold on every residual.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Number of pseudo-random probes added to the quadrature nodes.
pub const RANDOM_PROBES: usize = 50;
const PROBE_SEED: u64 = 0x005e_ed0f_9f0b;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formulation {
    Pointwise,
    Legendre,
    Monomial,
    Tensor,
    Contracted,
    IdentityResolution,
}

impl Formulation {
    pub const ALL: [Formulation; 6] = [
        Formulation::Pointwise,
        Formulation::Legendre,
        Formulation::Monomial,
        Formulation::Tensor,
        Formulation::Contracted,
        Formulation::IdentityResolution,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Formulation::Pointwise => "pointwise",
            Formulation::Legendre => "legendre",
            Formulation::Monomial => "monomial",
            Formulation::Tensor => "tensor",
            Formulation::Contracted => "contracted",
            Formulation::IdentityResolution => "identity_resolution",
        }
    }

    /// Evaluates this formulation with its default settings.
    pub fn evaluate(&self, povm: &Povm) -> ResidualReport {
        match self {
            Formulation::Pointwise => {
                pointwise_completeness_residual(povm, &default_probes(povm.copies))
            }
            Formulation::Legendre => legendre_residuals(povm),
            Formulation::Monomial => monomial_residuals(povm),
            Formulation::Tensor => tensor_residuals(povm),
            Formulation::Contracted => contracted_residuals(povm),
            Formulation::IdentityResolution => identity_resolution_residual(povm),
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub formulation: Formulation,
    pub residuals: Vec<f64>,
    pub max_abs: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ResidualReport {
    pub fn new(formulation: Formulation, residuals: Vec<f64>) -> Self {
        // NaN must not pass
        let max_abs = residuals.iter().fold(0.0_f64, |m, r| {
            if r.is_nan() || m.is_nan() {
                f64::NAN
            } else {
                m.max(r.abs())
            }
        });
        let mut report = ResidualReport {
            formulation,
            residuals,
            max_abs,
            tolerance: DEFAULT_TOLERANCE,
            pass: false,
        };
        report.pass = max_abs < report.tolerance;
        report
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.pass = self.max_abs < tolerance;
        self
    }
}

/// The probe set used for the pointwise check: the nodes of the degree-`2N`
/// product rule plus [`RANDOM_PROBES`] directions from a fixed seed.
pub fn default_probes(copies: usize) -> Vec<Direction> {
    let mut probes: Vec<Direction> = sphere_rule(2 * copies).directions().copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    probes.extend((0..RANDOM_PROBES).map(|_| Direction::random(&mut rng)));
    probes
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub copies: usize,
    pub outcomes: usize,
    pub tolerance: f64,
    pub violations: Vec<Violation>,
    pub reports: Vec<ResidualReport>,
    pub fidelity_quadrature: f64,
    pub fidelity_optimal: f64,
    pub fidelity_pass: bool,
    pub pass: bool,
}

impl VerificationReport {
    pub fn report(&self, formulation: Formulation) -> Option<&ResidualReport> {
        self.reports.iter().find(|r| r.formulation == formulation)
    }

    /// Assembles a report from already evaluated formulations, in any order.
    pub fn assemble(povm: &Povm, tolerance: f64, reports: Vec<ResidualReport>) -> Self {
        let violations = validate(povm);
        let mut reports: Vec<ResidualReport> =
            reports.into_iter().map(|r| r.with_tolerance(tolerance)).collect();
        reports.sort_by_key(|r| Formulation::ALL.iter().position(|f| *f == r.formulation));
        let fidelity_quadrature =
            mean_fidelity(povm, FidelityMethod::Quadrature).unwrap_or(f64::NAN);
        let fidelity_optimal = optimal_fidelity(povm.copies);
        let fidelity_pass = (fidelity_quadrature - fidelity_optimal).abs() < tolerance;
        let pass = violations.is_empty()
            && reports.len() == Formulation::ALL.len()
            && reports.iter().all(|r| r.pass)
            && fidelity_pass;
        VerificationReport {
            copies: povm.copies,
            outcomes: povm.len(),
            tolerance,
            violations,
            reports,
            fidelity_quadrature,
            fidelity_optimal,
            fidelity_pass,
            pass,
        }
    }
}

/// Runs every formulation plus the fidelity cross-check. Passes iff the POVM
/// is well formed, every `max_abs < tol` and the quadrature fidelity is
/// within `tol` of `(N+1)/(N+2)`.
pub fn verify(povm: &Povm, tol: f64) -> VerificationReport {
    let reports = Formulation::ALL.iter().map(|f| f.evaluate(povm)).collect();
    VerificationReport::assemble(povm, tol, reports)
}
