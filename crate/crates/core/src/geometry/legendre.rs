use crate::math::sqrt;
use crate::{Error, Result};

/// Associated Legendre function `P_L^M(x)` including the Condon–Shortley
/// phase `(-1)^M`, evaluated by upward recurrence in `L` from the closed
/// form of `P_M^M`.
///
/// Only the zero set of the Legendre moment equations is convention
/// independent; residual magnitudes reported elsewhere use this phase and
/// the unnormalized functions.
pub fn assoc_legendre(l: usize, m: usize, x: f64) -> Result<f64> {
    if m > l || !(x.abs() <= 1.0) {
        return Err(Error::LegendreDomain { l, m, x });
    }
    // P_M^M = (-1)^M (2M-1)!! (1-x²)^{M/2}
    let mut pmm = 1.0;
    if m > 0 {
        let s = sqrt((1.0 - x) * (1.0 + x));
        let mut odd = 1.0;
        for _ in 0..m {
            pmm *= -odd * s;
            odd += 2.0;
        }
    }
    if l == m {
        return Ok(pmm);
    }
    let mut pm1 = x * (2 * m + 1) as f64 * pmm;
    if l == m + 1 {
        return Ok(pm1);
    }
    let mut pm2 = pmm;
    for ll in (m + 2)..=l {
        let next = ((2 * ll - 1) as f64 * x * pm1 - (ll + m - 1) as f64 * pm2) / (ll - m) as f64;
        pm2 = pm1;
        pm1 = next;
    }
    Ok(pm1)
}
