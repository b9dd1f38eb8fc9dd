//! The equivalent moment formulations of the optimality condition.

use alloc::vec::Vec;

use super::{Formulation, ResidualReport};
use crate::geometry::{assoc_legendre, Direction};
use crate::math::{atan2, cos, double_factorial, exponent_triples, monomial, powi, sin};
use crate::povm::Povm;

/// `Σ_r c²_r ((1 + n̂·n̂_r)/2)^N − 1` at each probe direction.
pub fn pointwise_completeness_residual(povm: &Povm, probes: &[Direction]) -> ResidualReport {
    let n = povm.copies as u32;
    let residuals = probes
        .iter()
        .map(|probe| {
            povm.outcomes
                .iter()
                .map(|o| o.weight * powi((1.0 + probe.dot(&o.direction)) / 2.0, n))
                .sum::<f64>()
                - 1.0
        })
        .collect();
    ResidualReport::new(Formulation::Pointwise, residuals)
}

/// `Σ c² − (N+1)` followed by the real and imaginary parts of
/// `Σ c²_r P_L^M(cosθ_r) e^{iMψ_r}` for `L = 1..N`, `M = 0..L`.
///
/// Each row is scaled by `√((L−M)!/(L+M)!)`, which bounds the functions by
/// one. The zero set is unchanged; without the scaling the `M = L` rows
/// grow like `(2L−1)!!` and round-off alone reaches `1e-10` at `N = 7`.
pub fn legendre_residuals(povm: &Povm) -> ResidualReport {
    let n = povm.copies;
    let mut residuals = Vec::with_capacity(1 + n * (n + 3));
    residuals.push(povm.total_weight() - (n + 1) as f64);
    for l in 1..=n {
        for m in 0..=l {
            let scale = legendre_scale(l, m);
            let (mut re, mut im) = (0.0, 0.0);
            for o in &povm.outcomes {
                let [x, y, z] = o.direction.cartesian;
                let p = assoc_legendre(l, m, z.clamp(-1.0, 1.0)).unwrap_or(0.0);
                let psi = atan2(y, x);
                let phase = m as f64 * psi;
                re += o.weight * p * cos(phase);
                im += o.weight * p * sin(phase);
            }
            residuals.push(scale * re);
            residuals.push(scale * im);
        }
    }
    ResidualReport::new(Formulation::Legendre, residuals)
}

/// `√((L−M)!/(L+M)!)`.
fn legendre_scale(l: usize, m: usize) -> f64 {
    let ratio = ((l - m + 1)..=(l + m)).fold(1.0, |acc, k| acc / k as f64);
    libm::sqrt(ratio)
}

/// Target of `Σ c² z^k x^m`:
/// `even(k) even(m) (N+1) (m−1)!! (k−1)!! / (k+m+1)!!`.
pub fn monomial_target(copies: usize, k: usize, m: usize) -> f64 {
    if k % 2 == 1 || m % 2 == 1 {
        return 0.0;
    }
    (copies + 1) as f64 * double_factorial(m as i64 - 1) * double_factorial(k as i64 - 1)
        / double_factorial((k + m) as i64 + 1)
}

/// Rows `Σ c² z^k x^m − target` for `m = 0..N`, `k = 0..N−m`, each followed
/// (for `m ≥ 1`) by the odd-in-`y` row `Σ c² z^k x^{m−1} y`.
pub fn monomial_residuals(povm: &Povm) -> ResidualReport {
    let n = povm.copies;
    let mut residuals = Vec::new();
    for m in 0..=n {
        for k in 0..=n - m {
            let mut even = 0.0;
            let mut odd_y = 0.0;
            for o in &povm.outcomes {
                let [x, y, z] = o.direction.cartesian;
                let zk = powi(z, k as u32);
                even += o.weight * zk * powi(x, m as u32);
                if m >= 1 {
                    odd_y += o.weight * zk * powi(x, m as u32 - 1) * y;
                }
            }
            residuals.push(even - monomial_target(n, k, m));
            if m >= 1 {
                residuals.push(odd_y);
            }
        }
    }
    ResidualReport::new(Formulation::Monomial, residuals)
}

/// A fully symmetric rank-`q` tensor over three indices, stored by its
/// independent components. Component `[a, b, c]` is the entry with `a`
/// indices equal to `x`, `b` to `y` and `c` to `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTensor {
    pub rank: usize,
    pub components: Vec<([usize; 3], f64)>,
}

impl MomentTensor {
    /// `Σ_r c²_r n̂(r)^{⊗q}`.
    pub fn of_povm(povm: &Povm, rank: usize) -> Self {
        let components = exponent_triples(rank)
            .map(|e| {
                let v = povm
                    .outcomes
                    .iter()
                    .map(|o| o.weight * monomial(&o.direction.cartesian, &e))
                    .sum();
                (e, v)
            })
            .collect();
        MomentTensor { rank, components }
    }

    /// The isotropic target `even(q) (N+1)/(q+1) I^{(q)}`, where `I^{(q)}` is
    /// the symmetrized product of Kronecker deltas normalized so that
    /// `I^{(2)} = δ` and `I^{(4)} = (δδ + δδ + δδ)/3`.
    pub fn target(copies: usize, rank: usize) -> Self {
        let components = exponent_triples(rank)
            .map(|e| (e, moment_target(copies, &e)))
            .collect();
        MomentTensor { rank, components }
    }

    /// Entry for an explicit index list (each index in `0..3`).
    pub fn get(&self, indices: &[usize]) -> f64 {
        assert_eq!(indices.len(), self.rank, "index count must equal rank");
        let mut e = [0usize; 3];
        for &i in indices {
            e[i] += 1;
        }
        self.components
            .iter()
            .find(|(c, _)| *c == e)
            .map(|(_, v)| *v)
            .unwrap_or(0.0)
    }
}

/// `(N+1) E[x^a y^b z^c]` under the uniform measure:
/// `(N+1) (a−1)!! (b−1)!! (c−1)!! / (q+1)!!` if all exponents are even.
pub(crate) fn moment_target(copies: usize, e: &[usize; 3]) -> f64 {
    if e.iter().any(|k| k % 2 == 1) {
        return 0.0;
    }
    let q = e[0] + e[1] + e[2];
    (copies + 1) as f64 * e.iter().map(|&k| double_factorial(k as i64 - 1)).product::<f64>()
        / double_factorial(q as i64 + 1)
}

/// The exponent triples of every independent moment component for
/// `q = 0..=N`, with their targets, in report order.
pub(crate) fn moment_rows(copies: usize) -> Vec<([usize; 3], f64)> {
    (0..=copies)
        .flat_map(exponent_triples)
        .map(|e| (e, moment_target(copies, &e)))
        .collect()
}

/// `Σ c² n̂(r)^{⊗q} − target` for `q = 0..N`, flattened over independent
/// components.
pub fn tensor_residuals(povm: &Povm) -> ResidualReport {
    let residuals = moment_rows(povm.copies)
        .into_iter()
        .map(|(e, target)| {
            povm.outcomes
                .iter()
                .map(|o| o.weight * monomial(&o.direction.cartesian, &e))
                .sum::<f64>()
                - target
        })
        .collect();
    ResidualReport::new(Formulation::Tensor, residuals)
}

/// `Σ_{r≠i} c²_r (n̂_r·n̂_i)^q − [even(q)(N+1)/(q+1) − c²_i]` for every
/// outcome `i` and `q = 0..N`.
pub fn contracted_residuals(povm: &Povm) -> ResidualReport {
    let n = povm.copies;
    let mut residuals = Vec::with_capacity(povm.len() * (n + 1));
    for (i, oi) in povm.outcomes.iter().enumerate() {
        for q in 0..=n {
            let lhs: f64 = povm
                .outcomes
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != i)
                .map(|(_, o)| o.weight * powi(o.direction.dot(&oi.direction), q as u32))
                .sum();
            residuals.push(lhs - (contracted_moment(n, q) - oi.weight));
        }
    }
    ResidualReport::new(Formulation::Contracted, residuals)
}

/// `even(q) (N+1)/(q+1)`: the full contracted moment including `r = i`.
pub(crate) fn contracted_moment(copies: usize, q: usize) -> f64 {
    if q % 2 == 1 {
        0.0
    } else {
        (copies + 1) as f64 / (q + 1) as f64
    }
}
