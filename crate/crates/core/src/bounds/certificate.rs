//! Sum-of-squares certificates.
//!
//! For outcome `i` and a monic polynomial `p` of degree `D`,
//!
//! ```text
//! S_i = Σ_{r≠i} c²_r w(t_r) p(t_r)² ≥ 0,    t_r = n̂_i·n̂_r,  w ∈ {1, 1+t}
//! ```
//!
//! is manifestly non-negative. On an optimal POVM the contracted moment
//! identities `Σ_{r≠i} c²_r t_r^s = μ_s − c²_i` (valid for `s ≤ N`) turn
//! `S_i` into a quadratic form in the free coefficients of `p` whose
//! entries depend on `c²_i` alone. Minimizing it gives a function of `c²_i`
//! whose sign caps the weight; summing the cap over outcomes with
//! `Σ c² = N+1` bounds `n` from below.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::math::powi;
use crate::povm::{validate, Povm};
use crate::verification::{contracted_moment, moment_rows};
use crate::{Error, Result};

/// Slack non-negativity tolerance.
pub const SLACK_TOLERANCE: f64 = 1e-10;
/// Moment equations must hold to this level before a certificate applies.
pub const PRECONDITION_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ansatz {
    /// `(b + t)²`, `N = 2`.
    Quadratic,
    /// `(1 + t)(b + t)²`, `N = 3`.
    QuadraticWithLinearFactor,
    /// `(b + d t + t²)²`, `N = 4`.
    Quartic,
    /// `(1 + t)(b + d t + t²)²`, `N = 5`.
    QuarticWithLinearFactor,
    /// Monic `p` of any degree, optionally with the `(1 + t)` factor.
    Generic { degree: usize, linear_factor: bool },
}

impl Ansatz {
    pub fn tag(&self) -> &'static str {
        match self {
            Ansatz::Quadratic => "quadratic",
            Ansatz::QuadraticWithLinearFactor => "quadratic_with_linear_factor",
            Ansatz::Quartic => "quartic",
            Ansatz::QuarticWithLinearFactor => "quartic_with_linear_factor",
            Ansatz::Generic { degree: 3, .. } => "cubic_generic",
            Ansatz::Generic { .. } => "generic",
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            Ansatz::Quadratic | Ansatz::QuadraticWithLinearFactor => 1,
            Ansatz::Quartic | Ansatz::QuarticWithLinearFactor => 2,
            Ansatz::Generic { degree, .. } => *degree,
        }
    }

    pub fn linear_factor(&self) -> bool {
        match self {
            Ansatz::Quadratic | Ansatz::Quartic => false,
            Ansatz::QuadraticWithLinearFactor | Ansatz::QuarticWithLinearFactor => true,
            Ansatz::Generic { linear_factor, .. } => *linear_factor,
        }
    }

    /// Highest moment the expanded sum touches: `2D`, or `2D + 1` with the
    /// linear factor. It must not exceed `N`.
    pub fn moment_order(&self) -> usize {
        2 * self.degree() + usize::from(self.linear_factor())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeCertificate {
    pub weight: f64,
    /// Optimal free coefficients of `p`, lowest order first: `b`, then `d`, …
    pub coefficients: Vec<f64>,
    /// Minimum of the quadratic form, a function of `c²_i` only.
    pub slack: f64,
    /// The sign-determining expression in its usual form (`3 − 4c²` for the
    /// quadratic ansatz, `(5/4 − c²)(5/9 − c²)` for the quartic, …).
    pub inequality: f64,
    /// `Σ_{r≠i} c²_r w(t_r) p(t_r)²` evaluated on the actual directions with
    /// the optimal coefficients. Equals `slack` when the moments hold.
    pub direct_sum: f64,
    /// The quadratic form was not positive definite.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub copies: usize,
    pub outcomes: usize,
    pub ansatz: Ansatz,
    pub per_outcome: Vec<OutcomeCertificate>,
    /// Largest `c²` with non-negative slack.
    pub weight_cap: f64,
    /// `Σ_i (cap − c²_i)`, which equals `n·cap − (N+1)` and must be ≥ 0.
    pub cap_sum: f64,
    /// `⌈(N+1)/cap⌉`.
    pub implied_min_outcomes: usize,
    /// Every `inequality ≥ −SLACK_TOLERANCE`.
    pub valid: bool,
    /// Every `|slack| < SLACK_TOLERANCE`: the bound is attained.
    pub saturated: bool,
    pub degenerate: bool,
}

impl Certificate {
    pub fn max_abs_slack(&self) -> f64 {
        self.per_outcome.iter().map(|o| o.slack.abs()).fold(0.0, f64::max)
    }
}

/// Checks the copies and the moment equations up to the order the ansatz
/// consumes (all of `q ≤ N`).
fn check_preconditions(povm: &Povm, ansatz: &Ansatz) -> Result<()> {
    if povm.is_empty() {
        return Err(Error::EmptyPovm);
    }
    if ansatz.degree() == 0 {
        return Err(Error::InvalidConfig("certificate polynomial degree must be at least 1"));
    }
    if ansatz.moment_order() > povm.copies {
        return Err(Error::InvalidConfig("ansatz needs moments beyond q = N"));
    }
    if !validate(povm).is_empty() {
        return Err(Error::InvalidConfig("POVM fails data-model validation"));
    }
    for (e, target) in moment_rows(povm.copies) {
        let value: f64 = povm
            .outcomes
            .iter()
            .map(|o| o.weight * crate::math::monomial(&o.direction.cartesian, &e))
            .sum();
        let residual = (value - target).abs();
        if !(residual <= PRECONDITION_TOLERANCE) {
            return Err(Error::MomentPrecondition {
                q: e[0] + e[1] + e[2],
                residual,
            });
        }
    }
    Ok(())
}

fn require_copies(povm: &Povm, expected: usize) -> Result<()> {
    if povm.copies != expected {
        return Err(Error::WrongCopies {
            expected,
            actual: povm.copies,
        });
    }
    Ok(())
}

/// `Σ_{r≠i} c²_r w(t_r) t_r^s` reduced by the moment identities.
fn reduced_moment(copies: usize, weight: f64, s: usize, linear_factor: bool) -> f64 {
    let mut m = contracted_moment(copies, s) - weight;
    if linear_factor {
        m += contracted_moment(copies, s + 1) - weight;
    }
    m
}

/// Minimizes the reduced quadratic form for a given `c²`. Returns the
/// optimal coefficients and the minimum, or `None` if the form is not
/// positive definite.
fn minimize_form(copies: usize, weight: f64, degree: usize, linear_factor: bool) -> Option<(Vec<f64>, f64)> {
    let m = |s: usize| reduced_moment(copies, weight, s, linear_factor);
    let gram = DMatrix::from_fn(degree, degree, |j, k| m(j + k));
    let cross = DVector::from_fn(degree, |j, _| m(j + degree));
    let chol = gram.cholesky()?;
    let coefficients = -chol.solve(&cross);
    let minimum = m(2 * degree) + cross.dot(&coefficients);
    Some((coefficients.iter().copied().collect(), minimum))
}

/// Evaluates the defining sum on the actual configuration.
fn direct_sum(povm: &Povm, i: usize, coefficients: &[f64], linear_factor: bool) -> f64 {
    let ni = &povm.outcomes[i].direction;
    povm.outcomes
        .iter()
        .enumerate()
        .filter(|(r, _)| *r != i)
        .map(|(_, o)| {
            let t = ni.dot(&o.direction);
            let p = coefficients
                .iter()
                .enumerate()
                .map(|(j, a)| a * powi(t, j as u32))
                .sum::<f64>()
                + powi(t, coefficients.len() as u32);
            let w = if linear_factor { 1.0 + t } else { 1.0 };
            o.weight * w * p * p
        })
        .sum()
}

/// Largest `c ∈ (0, 1]` for which the reduced form is positive definite
/// with non-negative minimum.
fn weight_cap(copies: usize, degree: usize, linear_factor: bool) -> f64 {
    let feasible = |c: f64| match minimize_form(copies, c, degree, linear_factor) {
        Some((_, s)) => s >= 0.0,
        None => false,
    };
    const STEPS: usize = 4096;
    let mut lo = 0.0;
    for k in 1..=STEPS {
        let c = k as f64 / STEPS as f64;
        if !feasible(c) {
            let mut hi = c;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if feasible(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= f64::EPSILON * hi {
                    break;
                }
            }
            return lo;
        }
        lo = c;
    }
    1.0
}

struct ClosedForm {
    ansatz: Ansatz,
    copies: usize,
    cap: f64,
    slack: fn(f64) -> f64,
    inequality: fn(f64) -> f64,
}

fn closed_form_certificate(povm: &Povm, form: ClosedForm) -> Result<Certificate> {
    require_copies(povm, form.copies)?;
    check_preconditions(povm, &form.ansatz)?;
    let degree = form.ansatz.degree();
    let linear = form.ansatz.linear_factor();
    let per_outcome = povm
        .outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let c = o.weight;
            let solved = minimize_form(povm.copies, c, degree, linear);
            let (coefficients, degenerate) = match solved {
                Some((a, _)) => (a, false),
                None => (alloc::vec![f64::NAN; degree], true),
            };
            OutcomeCertificate {
                weight: c,
                direct_sum: direct_sum(povm, i, &coefficients, linear),
                coefficients,
                slack: (form.slack)(c),
                inequality: (form.inequality)(c),
                degenerate,
            }
        })
        .collect();
    Ok(assemble(povm, form.ansatz, per_outcome, form.cap))
}

fn assemble(povm: &Povm, ansatz: Ansatz, per_outcome: Vec<OutcomeCertificate>, cap: f64) -> Certificate {
    let cap_sum = per_outcome.iter().map(|o| cap - o.weight).sum();
    let ratio = (povm.copies + 1) as f64 / cap;
    let implied_min_outcomes = libm::ceil(ratio - 1e-9) as usize;
    let valid = per_outcome.iter().all(|o| o.inequality >= -SLACK_TOLERANCE);
    let saturated = per_outcome.iter().all(|o| o.slack.abs() < SLACK_TOLERANCE);
    let degenerate = per_outcome.iter().any(|o| o.degenerate);
    Certificate {
        copies: povm.copies,
        outcomes: povm.len(),
        ansatz,
        per_outcome,
        weight_cap: cap,
        cap_sum,
        implied_min_outcomes,
        valid,
        saturated,
        degenerate,
    }
}

/// `N = 2`: `b = c²/(3 − c²)`, `S = (3 − 4c²)/(3 − c²)`, cap `3/4`, and
/// `Σ(3 − 4c²) = 3(n − 4)`.
pub fn certificate_quadratic(povm: &Povm) -> Result<Certificate> {
    closed_form_certificate(
        povm,
        ClosedForm {
            ansatz: Ansatz::Quadratic,
            copies: 2,
            cap: 0.75,
            slack: |c| (3.0 - 4.0 * c) / (3.0 - c),
            inequality: |c| 3.0 - 4.0 * c,
        },
    )
}

/// `N = 3`: `b = −(1/3)(2 − 3c²)/(2 − c²)`,
/// `S = (8/9)(2 − 3c²)/(2 − c²)`, cap `2/3`, `Σ(2 − 3c²) = 2(n − 6)`.
pub fn certificate_quadratic_linear(povm: &Povm) -> Result<Certificate> {
    closed_form_certificate(
        povm,
        ClosedForm {
            ansatz: Ansatz::QuadraticWithLinearFactor,
            copies: 3,
            cap: 2.0 / 3.0,
            slack: |c| 8.0 / 9.0 * (2.0 - 3.0 * c) / (2.0 - c),
            inequality: |c| 2.0 - 3.0 * c,
        },
    )
}

/// `N = 4`: minimizing over `(b, d)` gives `S = (5/9 − c²)/(5/4 − c²)`, so
/// `(5/4 − c²)(5/9 − c²) ≥ 0`, cap `5/9` and `Σ(5/9 − c²) = (5/9)(n − 9)`.
pub fn certificate_quartic(povm: &Povm) -> Result<Certificate> {
    closed_form_certificate(
        povm,
        ClosedForm {
            ansatz: Ansatz::Quartic,
            copies: 4,
            cap: 5.0 / 9.0,
            slack: |c| (5.0 / 9.0 - c) / (5.0 / 4.0 - c),
            inequality: |c| (5.0 / 4.0 - c) * (5.0 / 9.0 - c),
        },
    )
}

/// `N = 5`: `S = 8(1 − 2c²)/(25(1 − c²))`, cap `1/2`, `Σ(1 − 2c²) = n − 12`.
pub fn certificate_quartic_linear(povm: &Povm) -> Result<Certificate> {
    closed_form_certificate(
        povm,
        ClosedForm {
            ansatz: Ansatz::QuarticWithLinearFactor,
            copies: 5,
            cap: 0.5,
            slack: |c| 8.0 * (1.0 - 2.0 * c) / (25.0 * (1.0 - c)),
            inequality: |c| 1.0 - 2.0 * c,
        },
    )
}

/// Numeric certificate for any degree: the reduced quadratic form is solved
/// directly (Cholesky, dimension `degree`) for every outcome and the weight
/// cap is located by bisection on the sign of the minimum.
pub fn certificate_generic(povm: &Povm, degree: usize, linear_factor: bool) -> Result<Certificate> {
    let ansatz = Ansatz::Generic {
        degree,
        linear_factor,
    };
    check_preconditions(povm, &ansatz)?;
    let per_outcome = povm
        .outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| match minimize_form(povm.copies, o.weight, degree, linear_factor) {
            Some((coefficients, slack)) => OutcomeCertificate {
                weight: o.weight,
                direct_sum: direct_sum(povm, i, &coefficients, linear_factor),
                coefficients,
                slack,
                inequality: slack,
                degenerate: false,
            },
            None => OutcomeCertificate {
                weight: o.weight,
                coefficients: alloc::vec![f64::NAN; degree],
                slack: f64::NAN,
                inequality: f64::NAN,
                direct_sum: f64::NAN,
                degenerate: true,
            },
        })
        .collect();
    let cap = weight_cap(povm.copies, degree, linear_factor);
    Ok(assemble(povm, ansatz, per_outcome, cap))
}

/// Largest admissible `c²` under the strongest ansatz the moment order
/// allows (degree `⌊N/2⌋`, linear factor for odd `N`).
pub fn weight_cap_for(copies: usize) -> Option<f64> {
    if copies < 2 {
        return None;
    }
    Some(weight_cap(copies, copies / 2, copies % 2 == 1))
}

/// Smallest `n` not excluded by the certificate cap or by the dimension
/// `N + 1` of the symmetric subspace. Outcome counts below this are proven
/// infeasible.
pub fn certified_min_outcomes(copies: usize) -> usize {
    let by_dimension = copies + 1;
    match weight_cap_for(copies) {
        Some(cap) => by_dimension.max(libm::ceil((copies + 1) as f64 / cap - 1e-9) as usize),
        None => by_dimension,
    }
}

/// Picks the strongest ansatz the moment order allows: the closed forms for
/// `N = 2..=5`, otherwise the generic certificate of degree `⌊N/2⌋`
/// (with the linear factor when `N` is odd).
pub fn certificate_auto(povm: &Povm) -> Result<Certificate> {
    match povm.copies {
        2 => certificate_quadratic(povm),
        3 => certificate_quadratic_linear(povm),
        4 => certificate_quartic(povm),
        5 => certificate_quartic_linear(povm),
        n => certificate_generic(povm, n / 2, n % 2 == 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Direction;
    use crate::povm::catalog_get;

    #[test]
    fn quadratic_on_tetrahedron() {
        let cert = certificate_quadratic(&catalog_get(2).unwrap().povm).unwrap();
        assert_eq!(cert.ansatz.tag(), "quadratic");
        for o in &cert.per_outcome {
            assert!(o.slack.abs() < 1e-15);
            assert!((o.coefficients[0] - 1.0 / 3.0).abs() < 1e-15);
            assert!(o.direct_sum.abs() < 1e-12);
        }
        assert!(cert.saturated && cert.valid);
        assert_eq!(cert.weight_cap, 0.75);
        assert_eq!(cert.implied_min_outcomes, 4);
        assert!(cert.cap_sum.abs() < 1e-14);
    }

    #[test]
    fn closed_form_b_for_n3() {
        let cert = certificate_quadratic_linear(&catalog_get(3).unwrap().povm).unwrap();
        let c: f64 = 2.0 / 3.0;
        let b = -(2.0 - 3.0 * c) / (3.0 * (2.0 - c));
        for o in &cert.per_outcome {
            assert!((o.coefficients[0] - b).abs() < 1e-15);
        }
        assert!(cert.saturated);
        assert_eq!(cert.implied_min_outcomes, 6);
    }

    #[test]
    fn quartic_is_strict_on_n4_catalog() {
        let cert = certificate_quartic(&catalog_get(4).unwrap().povm).unwrap();
        assert!(cert.valid && !cert.saturated);
        assert!(cert.per_outcome.iter().all(|o| o.inequality > 0.0 && o.slack > 0.0));
        for o in &cert.per_outcome {
            assert!((o.direct_sum - o.slack).abs() < 1e-12);
        }
        assert_eq!(cert.implied_min_outcomes, 9);
        // Σ(5/9 − c²) = (5/9)(n − 9) with n = 10
        assert!((cert.cap_sum - 5.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn quartic_equality_at_five_ninths() {
        let c: f64 = 5.0 / 9.0;
        assert!(((5.0 / 4.0 - c) * (5.0 / 9.0 - c)).abs() < 1e-16);
        let (_, s) = minimize_form(4, c, 2, false).unwrap();
        assert!(s.abs() < 1e-14);
    }

    #[test]
    fn quartic_linear_on_icosahedron() {
        let cert = certificate_quartic_linear(&catalog_get(5).unwrap().povm).unwrap();
        assert!(cert.saturated);
        assert_eq!(cert.weight_cap, 0.5);
        assert_eq!(cert.implied_min_outcomes, 12);
        for o in &cert.per_outcome {
            assert!(o.direct_sum.abs() < 1e-12);
            assert_eq!(o.coefficients.len(), 2);
        }
    }

    #[test]
    fn closed_forms_agree_with_generic() {
        type Closed = fn(&Povm) -> Result<Certificate>;
        let cases: [(usize, Closed, usize, bool); 4] = [
            (2, certificate_quadratic, 1, false),
            (3, certificate_quadratic_linear, 1, true),
            (4, certificate_quartic, 2, false),
            (5, certificate_quartic_linear, 2, true),
        ];
        for (n, closed, degree, linear) in cases {
            let p = catalog_get(n).unwrap().povm;
            let a = closed(&p).unwrap();
            let g = certificate_generic(&p, degree, linear).unwrap();
            for (x, y) in a.per_outcome.iter().zip(&g.per_outcome) {
                assert!((x.slack - y.slack).abs() < 1e-10, "N={n}");
                for (u, v) in x.coefficients.iter().zip(&y.coefficients) {
                    assert!((u - v).abs() < 1e-10);
                }
            }
            assert!((a.weight_cap - g.weight_cap).abs() < 1e-12, "N={n}: {} vs {}", a.weight_cap, g.weight_cap);
            assert_eq!(a.implied_min_outcomes, g.implied_min_outcomes);
        }
        // slack as a function of c² alone, away from the catalog weights
        for k in 1..20 {
            let c = k as f64 / 21.0;
            let (_, s) = minimize_form(4, c, 2, false).unwrap();
            assert!((s - (5.0 / 9.0 - c) / (5.0 / 4.0 - c)).abs() < 1e-12);
            let (_, s) = minimize_form(5, c, 2, true).unwrap();
            assert!((s - 8.0 * (1.0 - 2.0 * c) / (25.0 * (1.0 - c))).abs() < 1e-12);
        }
    }

    #[test]
    fn cubic_certificates_for_n6_n7() {
        let six = certificate_generic(&catalog_get(6).unwrap().povm, 3, false).unwrap();
        assert_eq!(six.ansatz.tag(), "cubic_generic");
        assert!(six.per_outcome.iter().all(|o| o.slack >= -1e-9));
        assert!((six.weight_cap - 7.0 / 16.0).abs() < 1e-12);
        assert_eq!(six.implied_min_outcomes, 16);
        let seven = certificate_generic(&catalog_get(7).unwrap().povm, 3, true).unwrap();
        assert!(seven.per_outcome.iter().all(|o| o.slack >= -1e-9));
        assert!((seven.weight_cap - 0.4).abs() < 1e-12);
        assert_eq!(seven.implied_min_outcomes, 20);
        for o in six.per_outcome.iter().chain(&seven.per_outcome) {
            assert!((o.direct_sum - o.slack).abs() < 1e-10);
        }
    }

    #[test]
    fn precondition_errors() {
        let mut p = catalog_get(2).unwrap().povm;
        let d = p.outcomes[1].direction;
        p.outcomes[1].direction = Direction::from_angles(d.theta + 0.01, d.psi);
        match certificate_quadratic(&p) {
            Err(Error::MomentPrecondition { q, .. }) => assert!((1..=2).contains(&q)),
            other => panic!("expected precondition error, got {other:?}"),
        }
        let oct = catalog_get(3).unwrap().povm;
        assert_eq!(
            certificate_quadratic(&oct).unwrap_err(),
            Error::WrongCopies { expected: 2, actual: 3 }
        );
        assert!(matches!(certificate_quartic_linear(&oct), Err(Error::WrongCopies { .. })));
        // odd moment broken by moving weight between antipodes
        let mut q1 = oct.clone();
        q1.outcomes[0].weight += 0.01;
        q1.outcomes[1].weight -= 0.01;
        assert!(matches!(
            certificate_quadratic_linear(&q1),
            Err(Error::MomentPrecondition { q: 1, .. })
        ));
        // degree too high for the available moments
        assert!(certificate_generic(&catalog_get(4).unwrap().povm, 2, true).is_err());
        let empty = Povm::new(2, alloc::vec![]);
        assert!(certificate_quadratic(&empty).is_err());
    }

    #[test]
    fn certified_minima() {
        let got: Vec<usize> = (1..=7).map(certified_min_outcomes).collect();
        assert_eq!(got, [2, 4, 6, 9, 12, 16, 20]);
        for n in 2..=12 {
            assert!(certified_min_outcomes(n) <= super::super::n_min(n).n_min);
        }
    }

    #[test]
    fn auto_selection() {
        for n in 2..=7 {
            let cert = certificate_auto(&catalog_get(n).unwrap().povm).unwrap();
            assert!(cert.valid, "N={n}");
            assert_eq!(cert.ansatz.moment_order(), n);
        }
    }
}
