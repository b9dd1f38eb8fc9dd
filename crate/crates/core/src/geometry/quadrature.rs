use alloc::vec::Vec;

use super::Direction;
use crate::math::{cos, CompensatedSum, PI, TAU};

/// A positive quadrature rule for the normalized isotropic measure on the
/// sphere (total weight 1).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<(Direction, f64)>,
    /// Every polynomial in `(x, y, z)` of total degree at most this value is
    /// integrated exactly.
    pub exact_degree: usize,
}

impl QuadratureRule {
    pub fn integrate<F: FnMut(&Direction) -> f64>(&self, mut f: F) -> f64 {
        let mut acc = CompensatedSum::default();
        for (d, w) in &self.nodes {
            acc.add(w * f(d));
        }
        acc.value()
    }

    pub fn total_weight(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    pub fn directions(&self) -> impl Iterator<Item = &Direction> {
        self.nodes.iter().map(|(d, _)| d)
    }
}

/// Gauss–Legendre abscissae and weights on `[-1, 1]`, ordered by increasing
/// node. Newton iteration on `P_count` from the usual cosine initial guess.
pub fn gauss_legendre_nodes(count: usize) -> Vec<(f64, f64)> {
    assert!(count >= 1, "Gauss-Legendre rule needs at least one node");
    let n = count as f64;
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut x = cos(PI * (i as f64 + 0.75) / (n + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            // P_n(x) and P_{n-1}(x) by three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=count {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let (pn, pn1) = if count == 1 { (x, 1.0) } else { (p1, p0) };
            dp = n * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        if count == 1 {
            out.push((0.0, 2.0));
            continue;
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.reverse();
    out
}

/// Product rule exact for spherical polynomials of degree `max_degree`:
/// Gauss–Legendre in `cosθ` with `⌈(d+1)/2⌉ + 1` nodes times a uniform
/// azimuthal grid of `d + 2` points.
///
/// The Gauss factor is exact to degree `2⌈(d+1)/2⌉ + 1 ≥ d + 2` and the
/// azimuthal grid to trigonometric degree `d + 1`, so
/// `exact_degree = d + 1`.
pub fn sphere_rule(max_degree: usize) -> QuadratureRule {
    let polar = gauss_legendre_nodes(max_degree.div_ceil(2) + 1);
    let azimuthal = max_degree + 2;
    let mut nodes = Vec::with_capacity(polar.len() * azimuthal);
    for &(t, w) in &polar {
        let theta = libm::acos(t);
        for j in 0..azimuthal {
            let psi = TAU * j as f64 / azimuthal as f64;
            nodes.push((Direction::from_angles(theta, psi), 0.5 * w / azimuthal as f64));
        }
    }
    QuadratureRule {
        nodes,
        exact_degree: max_degree + 1,
    }
}
