use crate::geometry::{sphere_rule, QuadratureRule};
use crate::math::{log, powi};
use crate::povm::Povm;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub enum FidelityMethod<'a> {
    /// `(N+1)/(N+2)`, the optimum; meaningful only for verified POVMs.
    ClosedForm,
    /// Exact product rule of degree `N+1`.
    Quadrature,
    /// A caller-supplied rule; must be exact to degree at least `N+1`.
    Rule(&'a QuadratureRule),
}

/// Optimal mean fidelity for `N` copies.
pub fn optimal_fidelity(copies: usize) -> f64 {
    (copies + 1) as f64 / (copies + 2) as f64
}

/// Mean fidelity `Σ_r ∫ Dn̂ c²_r ((1 + n̂·n̂_r)/2)^{N+1}` over the isotropic
/// prior, when outcome `r` is read as the guess `n̂_r`.
pub fn mean_fidelity(povm: &Povm, method: FidelityMethod<'_>) -> Result<f64> {
    let owned;
    let rule = match method {
        FidelityMethod::ClosedForm => return Ok(optimal_fidelity(povm.copies)),
        FidelityMethod::Quadrature => {
            owned = sphere_rule(povm.copies + 1);
            &owned
        }
        FidelityMethod::Rule(rule) => {
            if rule.exact_degree < povm.copies + 1 {
                return Err(Error::InvalidConfig("quadrature rule degree below N+1"));
            }
            rule
        }
    };
    let power = povm.copies as u32 + 1;
    Ok(rule.integrate(|probe| {
        povm.outcomes
            .iter()
            .map(|o| o.weight * powi((1.0 + probe.dot(&o.direction)) / 2.0, power))
            .sum()
    }))
}

/// Maximal mean information gain in bits, `(ln(N+1) − N/(N+1)) / ln 2`.
pub fn shannon_gain(copies: usize) -> f64 {
    let n = copies as f64;
    (log(n + 1.0) - n / (n + 1.0)) / core::f64::consts::LN_2
}
