//! Parameter encoding of a gauge-fixed POVM and the moment residual map.
//!
//! Layout: one free real `u` per independent outcome (`c² = u²`), then the
//! directions. Independent direction 0 is pinned to `+z`, direction 1 is
//! `(x, 0, z)` and every other direction is a free 3-vector; all are
//! normalized at decode. In antipodal mode each independent outcome stands
//! for the pair `(c², n̂)`, `(c², −n̂)` and odd-order rows are dropped since
//! they vanish identically.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::geometry::Direction;
use crate::math::norm;
use crate::povm::{Outcome, Povm};
use crate::verification::moment_rows;

#[derive(Debug, Clone)]
pub struct Encoding {
    copies: usize,
    outcomes: usize,
    antipodal: bool,
    rows: Vec<([usize; 3], f64)>,
}

impl Encoding {
    /// `outcomes` must be even in antipodal mode.
    pub fn new(copies: usize, outcomes: usize, antipodal: bool) -> Self {
        let rows = moment_rows(copies)
            .into_iter()
            .filter(|(e, _)| !antipodal || (e[0] + e[1] + e[2]) % 2 == 0)
            .collect();
        Encoding {
            copies,
            outcomes,
            antipodal,
            rows,
        }
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn antipodal(&self) -> bool {
        self.antipodal
    }

    /// Number of independent outcomes.
    pub fn independent(&self) -> usize {
        if self.antipodal {
            self.outcomes / 2
        } else {
            self.outcomes
        }
    }

    pub fn parameter_len(&self) -> usize {
        let m = self.independent();
        m + if m >= 2 { 2 + 3 * (m - 2) } else { 0 }
    }

    /// Moment rows plus one weight-cap penalty row per independent outcome.
    pub fn residual_len(&self) -> usize {
        self.rows.len() + self.independent()
    }

    /// Raw (unnormalized) direction vector of independent outcome `k`.
    pub(crate) fn raw_vector(&self, params: &[f64], k: usize) -> [f64; 3] {
        let base = self.independent();
        match k {
            0 => [0.0, 0.0, 1.0],
            1 => [params[base], 0.0, params[base + 1]],
            _ => {
                let i = base + 2 + 3 * (k - 2);
                [params[i], params[i + 1], params[i + 2]]
            }
        }
    }

    pub(crate) fn set_raw_vector(&self, params: &mut [f64], k: usize, v: [f64; 3]) {
        let base = self.independent();
        match k {
            0 => {}
            1 => {
                params[base] = v[0];
                params[base + 1] = v[2];
            }
            _ => {
                let i = base + 2 + 3 * (k - 2);
                params[i..i + 3].copy_from_slice(&v);
            }
        }
    }

    fn unit(&self, params: &[f64], k: usize) -> ([f64; 3], f64) {
        let v = self.raw_vector(params, k);
        let len = norm(&v);
        ([v[0] / len, v[1] / len, v[2] / len], len)
    }

    /// Decodes to a POVM with weights clamped to `c² ≤ 1`. Returns `None` if
    /// a direction vector is zero or not finite.
    pub fn decode(&self, params: &[f64]) -> Option<Povm> {
        let mut outcomes = Vec::with_capacity(self.outcomes);
        for k in 0..self.independent() {
            let weight = (params[k] * params[k]).min(1.0);
            let direction = Direction::from_vector(self.raw_vector(params, k)).ok()?;
            outcomes.push(Outcome::new(weight, direction));
            if self.antipodal {
                outcomes.push(Outcome::new(weight, direction.antipode()));
            }
        }
        Some(Povm::new(self.copies, outcomes))
    }

    /// Inverse of [`decode`](Self::decode) for a POVM already in the gauge
    /// (outcome 0 at `+z`, outcome 1 with `y = 0`). In antipodal mode the
    /// even-indexed outcomes are taken.
    pub fn encode(&self, povm: &Povm) -> Vec<f64> {
        let step = if self.antipodal { 2 } else { 1 };
        let mut params = alloc::vec![0.0; self.parameter_len()];
        for k in 0..self.independent() {
            let o = &povm.outcomes[k * step];
            params[k] = libm::sqrt(o.weight);
            self.set_raw_vector(&mut params, k, o.direction.cartesian);
        }
        params
    }

    fn multiplicity(&self) -> f64 {
        if self.antipodal {
            2.0
        } else {
            1.0
        }
    }

    pub fn residuals(&self, params: &[f64]) -> DVector<f64> {
        let m = self.independent();
        let units: Vec<[f64; 3]> = (0..m).map(|k| self.unit(params, k).0).collect();
        let f = self.multiplicity();
        let mut r = DVector::zeros(self.residual_len());
        for (row, (e, target)) in self.rows.iter().enumerate() {
            let s: f64 = (0..m)
                .map(|k| params[k] * params[k] * crate::math::monomial(&units[k], e))
                .sum();
            r[row] = f * s - target;
        }
        for k in 0..m {
            r[self.rows.len() + k] = (params[k] * params[k] - 1.0).max(0.0);
        }
        r
    }

    pub fn jacobian(&self, params: &[f64]) -> DMatrix<f64> {
        let m = self.independent();
        let base = m;
        let f = self.multiplicity();
        let mut jac = DMatrix::zeros(self.residual_len(), self.parameter_len());
        for k in 0..m {
            let (n, len) = self.unit(params, k);
            let w = params[k] * params[k];
            for (row, (e, _)) in self.rows.iter().enumerate() {
                let value = crate::math::monomial(&n, e);
                jac[(row, k)] = f * 2.0 * params[k] * value;
                if k == 0 {
                    continue;
                }
                let mut g = [0.0; 3];
                for axis in 0..3 {
                    if e[axis] == 0 {
                        continue;
                    }
                    let mut d = *e;
                    d[axis] -= 1;
                    g[axis] = e[axis] as f64 * crate::math::monomial(&n, &d);
                }
                let radial = g[0] * n[0] + g[1] * n[1] + g[2] * n[2];
                let grad: [f64; 3] = core::array::from_fn(|a| f * w * (g[a] - radial * n[a]) / len);
                if k == 1 {
                    jac[(row, base)] = grad[0];
                    jac[(row, base + 1)] = grad[2];
                } else {
                    let i = base + 2 + 3 * (k - 2);
                    for a in 0..3 {
                        jac[(row, i + a)] = grad[a];
                    }
                }
            }
            if params[k] * params[k] > 1.0 {
                jac[(self.rows.len() + k, k)] = 2.0 * params[k];
            }
        }
        jac
    }
}
