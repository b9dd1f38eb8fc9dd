//! Serializable documents. Field names are part of the command-line
//! contract.

use serde::{Deserialize, Serialize};

use povm_forge_core::bounds::{self, Certificate, CountingBound};
use povm_forge_core::povm::{CatalogEntry, Outcome, Povm};
use povm_forge_core::simulate::SimulationResult;
use povm_forge_core::solver::{RestartOutcome, ScanRow, SolverConfig, SolverResult};
use povm_forge_core::verification::VerificationReport;
use povm_forge_core::Direction;

/// POVM interchange format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PovmDocument {
    pub copies: usize,
    pub outcomes: Vec<OutcomeDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDocument {
    pub weight: f64,
    pub theta: f64,
    pub psi: f64,
}

impl PovmDocument {
    pub fn from_povm(povm: &Povm, label: Option<&str>) -> Self {
        PovmDocument {
            copies: povm.copies,
            outcomes: povm
                .outcomes
                .iter()
                .map(|o| OutcomeDocument {
                    weight: o.weight,
                    theta: o.direction.theta,
                    psi: o.direction.psi,
                })
                .collect(),
            label: label.map(str::to_owned),
        }
    }

    pub fn from_catalog(entry: &CatalogEntry) -> Self {
        Self::from_povm(&entry.povm, Some(entry.label))
    }

    /// Directions are rebuilt from the angles; `ψ` is wrapped into `[0, 2π)`.
    pub fn to_povm(&self) -> Povm {
        Povm::new(
            self.copies,
            self.outcomes
                .iter()
                .map(|o| Outcome::new(o.weight, Direction::from_angles(o.theta, o.psi)))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormulationDocument {
    pub name: &'static str,
    pub max_abs: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationDocument {
    pub copies: usize,
    pub outcomes: usize,
    pub tolerance: f64,
    pub pass: bool,
    pub violations: Vec<String>,
    pub formulations: Vec<FormulationDocument>,
    pub fidelity_quadrature: f64,
    pub fidelity_optimal: f64,
    pub fidelity_pass: bool,
    pub povm: PovmDocument,
}

impl VerificationDocument {
    pub fn new(report: &VerificationReport, povm: &Povm) -> Self {
        VerificationDocument {
            copies: report.copies,
            outcomes: report.outcomes,
            tolerance: report.tolerance,
            pass: report.pass,
            violations: report.violations.iter().map(ToString::to_string).collect(),
            formulations: report
                .reports
                .iter()
                .map(|r| FormulationDocument {
                    name: r.formulation.name(),
                    max_abs: r.max_abs,
                    tolerance: r.tolerance,
                    pass: r.pass,
                    rows: r.residuals.len(),
                })
                .collect(),
            fidelity_quadrature: report.fidelity_quadrature,
            fidelity_optimal: report.fidelity_optimal,
            fidelity_pass: report.fidelity_pass,
            povm: PovmDocument::from_povm(povm, None),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountingDocument {
    pub copies: usize,
    pub n_min: usize,
    pub general_bound: usize,
    pub antipodal_bound: usize,
    pub equation_count: usize,
    pub antipodal_equation_count: usize,
    /// Outcome counts below this are excluded by the certificate.
    pub certified_min_outcomes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight_cap: Option<f64>,
}

impl CountingDocument {
    pub fn new(bound: &CountingBound) -> Self {
        let n = bound.copies;
        CountingDocument {
            copies: n,
            n_min: bound.n_min,
            general_bound: bound.general_bound,
            antipodal_bound: bound.antipodal_bound,
            equation_count: bounds::equation_count(n),
            antipodal_equation_count: bounds::antipodal_equation_count(n),
            certified_min_outcomes: bounds::certified_min_outcomes(n),
            weight_cap: bounds::weight_cap_for(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeCertificateDocument {
    pub weight: f64,
    pub b: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    pub coefficients: Vec<f64>,
    pub slack: f64,
    pub inequality: f64,
    pub direct_sum: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateDocument {
    pub copies: usize,
    pub outcomes: usize,
    pub ansatz: &'static str,
    pub degree: usize,
    pub linear_factor: bool,
    pub weight_cap: f64,
    pub implied_min_outcomes: usize,
    pub cap_sum: f64,
    pub max_abs_slack: f64,
    pub valid: bool,
    pub saturated: bool,
    pub degenerate: bool,
    pub per_outcome: Vec<OutcomeCertificateDocument>,
}

impl CertificateDocument {
    pub fn new(cert: &Certificate) -> Self {
        CertificateDocument {
            copies: cert.copies,
            outcomes: cert.outcomes,
            ansatz: cert.ansatz.tag(),
            degree: cert.ansatz.degree(),
            linear_factor: cert.ansatz.linear_factor(),
            weight_cap: cert.weight_cap,
            implied_min_outcomes: cert.implied_min_outcomes,
            cap_sum: cert.cap_sum,
            max_abs_slack: cert.max_abs_slack(),
            valid: cert.valid,
            saturated: cert.saturated,
            degenerate: cert.degenerate,
            per_outcome: cert
                .per_outcome
                .iter()
                .map(|o| OutcomeCertificateDocument {
                    weight: o.weight,
                    b: o.coefficients[0],
                    d: o.coefficients.get(1).copied(),
                    coefficients: o.coefficients.clone(),
                    slack: o.slack,
                    inequality: o.inequality,
                    direct_sum: o.direct_sum,
                    degenerate: o.degenerate,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartDocument {
    pub restart_index: usize,
    pub iterations: usize,
    pub final_residual: f64,
    pub converged: bool,
    pub stop: &'static str,
    pub repaired_outcomes: usize,
}

impl RestartDocument {
    fn new(o: &RestartOutcome) -> Self {
        RestartDocument {
            restart_index: o.restart_index,
            iterations: o.iterations,
            final_residual: o.final_residual,
            converged: o.converged,
            stop: o.stop.as_str(),
            repaired_outcomes: o.repaired_outcomes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveDocument {
    pub status: &'static str,
    pub copies: usize,
    pub outcomes: usize,
    pub seed: u64,
    pub restarts: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub antipodal: bool,
    pub final_residual: f64,
    pub restart_index: usize,
    pub iterations: usize,
    pub restarts_run: usize,
    pub diagnostics: Vec<RestartDocument>,
    pub povm: PovmDocument,
}

impl SolveDocument {
    pub fn new(config: &SolverConfig, result: &SolverResult) -> Self {
        SolveDocument {
            status: result.status.as_str(),
            copies: config.copies,
            outcomes: config.outcomes,
            seed: result.seed,
            restarts: config.restarts,
            max_iterations: config.max_iterations,
            tolerance: config.tolerance,
            antipodal: config.antipodal,
            final_residual: result.final_residual,
            restart_index: result.restart_index,
            iterations: result.iterations,
            restarts_run: result.restarts_run,
            diagnostics: result.diagnostics.iter().map(RestartDocument::new).collect(),
            povm: PovmDocument::from_povm(&result.povm, None),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRowDocument {
    pub outcomes: usize,
    pub status: &'static str,
    pub best_residual: f64,
    pub converged: bool,
    pub restart_index: usize,
    /// `converged`, `certified_infeasible` or `evidence_only`.
    pub evidence: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanDocument {
    pub copies: usize,
    pub from: usize,
    pub to: usize,
    pub seed: u64,
    pub restarts: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub antipodal: bool,
    pub empirical_minimum: Option<usize>,
    pub n_min: usize,
    pub certified_min_outcomes: usize,
    pub rows: Vec<ScanRowDocument>,
}

impl ScanDocument {
    pub fn new(from: usize, to: usize, template: &SolverConfig, rows: &[ScanRow]) -> Self {
        let copies = template.copies;
        ScanDocument {
            copies,
            from,
            to,
            seed: template.seed,
            restarts: template.restarts,
            max_iterations: template.max_iterations,
            tolerance: template.tolerance,
            antipodal: template.antipodal,
            empirical_minimum: povm_forge_core::solver::empirical_minimum(rows),
            n_min: bounds::n_min(copies).n_min,
            certified_min_outcomes: bounds::certified_min_outcomes(copies),
            rows: rows
                .iter()
                .map(|r| ScanRowDocument {
                    outcomes: r.outcomes,
                    status: r.status.as_str(),
                    best_residual: r.best_residual,
                    converged: r.converged,
                    restart_index: r.restart_index,
                    evidence: if r.converged {
                        "converged"
                    } else if r.certified_infeasible {
                        "certified_infeasible"
                    } else {
                        "evidence_only"
                    },
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityDocument {
    pub copies: usize,
    pub outcomes: usize,
    pub method: &'static str,
    pub mean_fidelity: f64,
    pub optimal_fidelity: f64,
    pub deviation: f64,
    pub shannon_gain_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationDocument {
    pub copies: usize,
    pub outcomes: usize,
    pub trials: u64,
    pub seed: u64,
    pub mean: f64,
    pub standard_error: f64,
    pub optimal_fidelity: f64,
    pub frequencies: Vec<f64>,
    pub counts: Vec<u64>,
}

impl SimulationDocument {
    pub fn new(povm: &Povm, result: &SimulationResult) -> Self {
        SimulationDocument {
            copies: povm.copies,
            outcomes: povm.len(),
            trials: result.trials,
            seed: result.seed,
            mean: result.mean,
            standard_error: result.standard_error,
            optimal_fidelity: povm_forge_core::verification::optimal_fidelity(povm.copies),
            frequencies: result.frequencies.clone(),
            counts: result.counts.clone(),
        }
    }
}
