//! Lower bounds on the number of outcomes.

mod certificate;
mod counting;

pub use certificate::{
    certificate_auto, certificate_generic, certificate_quadratic, certificate_quadratic_linear,
    certificate_quartic, certificate_quartic_linear, certified_min_outcomes, weight_cap_for, Ansatz, Certificate, OutcomeCertificate,
    PRECONDITION_TOLERANCE, SLACK_TOLERANCE,
};
pub use counting::{
    antipodal_equation_count, antipodal_unknown_count, equation_count, n_min, unknown_count,
    CountingBound,
};
