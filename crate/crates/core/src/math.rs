//! Small numeric helpers that `core` does not provide for `f64`.

pub(crate) use libm::{acos, atan2, cos, log, sin, sqrt};

pub(crate) const PI: f64 = core::f64::consts::PI;
pub(crate) const TAU: f64 = core::f64::consts::TAU;

/// `x^n` by repeated squaring.
pub(crate) fn powi(mut x: f64, mut n: u32) -> f64 {
    let mut acc = 1.0;
    while n > 0 {
        if n & 1 == 1 {
            acc *= x;
        }
        x *= x;
        n >>= 1;
    }
    acc
}

/// `k!!` with the convention `(-1)!! = 0!! = 1`.
pub(crate) fn double_factorial(k: i64) -> f64 {
    let mut acc = 1.0;
    let mut j = k;
    while j > 1 {
        acc *= j as f64;
        j -= 2;
    }
    acc
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

pub(crate) fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: &[f64; 3]) -> f64 {
    sqrt(dot(a, a))
}

/// Angle between two unit vectors, accurate near 0 and π.
pub(crate) fn angle_between(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    atan2(norm(&cross(a, b)), dot(a, b))
}

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Exponent triples `(a, b, c)` with `a + b + c = q`, in a fixed order.
/// These label the independent components of a symmetric rank-`q` tensor
/// over three indices.
pub(crate) fn exponent_triples(q: usize) -> impl Iterator<Item = [usize; 3]> {
    (0..=q).rev().flat_map(move |a| (0..=q - a).rev().map(move |b| [a, b, q - a - b]))
}

pub(crate) fn monomial(v: &[f64; 3], e: &[usize; 3]) -> f64 {
    powi(v[0], e[0] as u32) * powi(v[1], e[1] as u32) * powi(v[2], e[2] as u32)
}
