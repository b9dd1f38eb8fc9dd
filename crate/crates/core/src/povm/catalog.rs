//! Known minimal optimal POVMs for `N = 2..=7`.
//!
//! Weights and angles are written as the closed-form expressions and
//! evaluated at load time. Outcome order follows the tabulated indexing
//! `r = 1..n` (stored 0-based), including the half-step azimuthal offsets of
//! the lower rings.

use alloc::vec::Vec;

use super::{Outcome, Povm};
use crate::geometry::Direction;
use crate::math::{acos, sqrt, PI};
use crate::{Error, Result};

/// Copies for which a catalog entry exists.
pub const CATALOG_COPIES: [usize; 6] = [2, 3, 4, 5, 6, 7];

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub copies: usize,
    pub povm: Povm,
    pub label: &'static str,
    /// The closed forms the entry was evaluated from.
    pub provenance: &'static str,
}

/// Builds a POVM from `(weight, theta, psi)` rows.
fn build(copies: usize, rows: impl Iterator<Item = (f64, f64, f64)>) -> Povm {
    let outcomes: Vec<Outcome> = rows
        .map(|(w, theta, psi)| Outcome::new(w, Direction::from_angles(theta, psi)))
        .collect();
    Povm::new(copies, outcomes)
}

pub fn catalog_get(copies: usize) -> Result<CatalogEntry> {
    let r_range = |lo: usize, hi: usize| (lo..=hi).map(|r| r as f64);
    let entry = match copies {
        2 => {
            let theta = acos(-1.0 / 3.0);
            let rows = core::iter::once((0.75, 0.0, 0.0))
                .chain(r_range(2, 4).map(|r| (0.75, theta, (r - 2.0) * 2.0 * PI / 3.0)));
            CatalogEntry {
                copies,
                povm: build(copies, rows),
                label: "tetrahedron",
                provenance: "c2=3/4; theta_1=0; theta_r=arccos(-1/3), psi_r=(r-2)2pi/3, r=2..4",
            }
        }
        3 => {
            let rows = [(2.0 / 3.0, 0.0, 0.0), (2.0 / 3.0, PI, 0.0)]
                .into_iter()
                .chain(r_range(3, 6).map(|r| (2.0 / 3.0, PI / 2.0, (r - 3.0) * PI / 2.0)));
            CatalogEntry {
                copies,
                povm: build(copies, rows),
                label: "octahedron",
                provenance: "c2=2/3; theta_1=0, theta_2=pi; theta_r=pi/2, psi_r=(r-3)pi/2, r=3..6",
            }
        }
        4 => {
            let theta = acos(1.0 / sqrt(5.0));
            let w = 25.0 / 48.0;
            let rows = [(5.0 / 12.0, 0.0, 0.0), (5.0 / 12.0, PI, 0.0)]
                .into_iter()
                .chain(r_range(3, 6).map(|r| (w, theta, (r - 3.0) * PI / 2.0)))
                .chain(r_range(7, 10).map(|r| (w, PI - theta, (r - 6.5) * PI / 2.0)));
            CatalogEntry {
                copies,
                povm: build(copies, rows),
                label: "twisted square prism with pyramidal caps",
                provenance: "c2_1=c2_2=5/12, c2_r=25/48; theta_r=arccos(1/sqrt5), psi_r=(r-3)pi/2, r=3..6; \
                             theta_r=pi-theta_3, psi_r=(r-13/2)pi/2, r=7..10",
            }
        }
        5 => {
            let theta = acos(1.0 / sqrt(5.0));
            let step = 2.0 * PI / 5.0;
            let rows = [(0.5, 0.0, 0.0), (0.5, PI, 0.0)]
                .into_iter()
                .chain(r_range(3, 7).map(|r| (0.5, theta, (r - 3.0) * step)))
                .chain(r_range(8, 12).map(|r| (0.5, PI - theta, (r - 7.5) * step)));
            CatalogEntry {
                copies,
                povm: build(copies, rows),
                label: "icosahedron",
                provenance: "c2=1/2; theta_r=arccos(1/sqrt5), psi_r=(r-3)2pi/5, r=3..7; \
                             theta_r=pi-theta_3, psi_r=(r-15/2)2pi/5, r=8..12",
            }
        }
        6 => {
            let s30 = sqrt(30.0);
            let upper = acos(sqrt(13.0 + 2.0 * s30) / 7.0);
            let lower = acos(-sqrt(13.0 - 2.0 * s30) / 7.0);
            let w_plus = 7.0 * (410.0 + s30) / 7200.0;
            let w_minus = 7.0 * (410.0 - s30) / 7200.0;
            let psi = |r: f64| {
                if r <= 6.0 {
                    (r - 3.0) * PI / 2.0
                } else {
                    (r - 6.5) * PI / 2.0
                }
            };
            let rows = [(14.0 / 45.0, 0.0, 0.0), (14.0 / 45.0, PI, 0.0)]
                .into_iter()
                .chain(r_range(3, 6).map(|r| (w_plus, upper, psi(r))))
                .chain(r_range(7, 10).map(|r| (w_plus, PI - upper, psi(r))))
                .chain(r_range(11, 14).map(|r| (w_minus, lower, psi(r - 8.0))))
                .chain(r_range(15, 18).map(|r| (w_minus, PI - lower, psi(r - 8.0))));
            CatalogEntry {
                copies,
                povm: build(copies, rows),
                label: "18-outcome double-ring configuration",
                provenance: "c2_1=c2_2=14/45; c2_r=7(410+sqrt30)/7200, r=3..10; c2_r=7(410-sqrt30)/7200, r=11..18; \
                             theta_3=arccos(sqrt(13+2sqrt30)/7); theta_11=arccos(-sqrt(13-2sqrt30)/7)",
            }
        }
        7 => {
            let k = 3.0 * sqrt(3.0 / 35.0);
            let upper = acos(0.5 * sqrt(1.0 + k));
            let lower = acos(-0.5 * sqrt(1.0 - k));
            let s105 = sqrt(105.0);
            let w_plus = (147.0 + s105) / 405.0;
            let w_minus = (147.0 - s105) / 405.0;
            let step = 2.0 * PI / 5.0;
            let psi = |r: f64| {
                if r <= 7.0 {
                    (r - 3.0) * step
                } else {
                    (r - 7.5) * step
                }
            };
            let rows = [(10.0 / 27.0, 0.0, 0.0), (10.0 / 27.0, PI, 0.0)]
                .into_iter()
                .chain(r_range(3, 7).map(|r| (w_plus, upper, psi(r))))
                .chain(r_range(8, 12).map(|r| (w_plus, PI - upper, psi(r))))
                .chain(r_range(13, 17).map(|r| (w_minus, lower, psi(r - 10.0))))
                .chain(r_range(18, 22).map(|r| (w_minus, PI - lower, psi(r - 10.0))));
            CatalogEntry {
                copies,
                povm: build(copies, rows),
                label: "22-outcome double-ring configuration",
                provenance: "c2_1=c2_2=10/27; c2_r=(147+sqrt105)/405, r=3..12; c2_r=(147-sqrt105)/405, r=13..22; \
                             theta_3=arccos(sqrt(1+3sqrt(3/35))/2); theta_13=arccos(-sqrt(1-3sqrt(3/35))/2)",
            }
        }
        other => return Err(Error::UnsupportedCopies(other)),
    };
    Ok(entry)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_total_weight() {
        let sizes = [4, 6, 10, 12, 18, 22];
        for (n, size) in CATALOG_COPIES.into_iter().zip(sizes) {
            let e = catalog_get(n).unwrap();
            assert_eq!(e.copies, n);
            assert_eq!(e.povm.len(), size);
            assert!((e.povm.total_weight() - (n + 1) as f64).abs() < 1e-12, "N={n}");
        }
        assert_eq!(catalog_get(1), Err(Error::UnsupportedCopies(1)));
        assert_eq!(catalog_get(8), Err(Error::UnsupportedCopies(8)));
    }

    #[test]
    fn tetrahedron_layout() {
        let p = catalog_get(2).unwrap().povm;
        assert!(p.outcomes.iter().all(|o| o.weight == 0.75));
        assert_eq!(p.outcomes[0].direction.theta, 0.0);
        for (i, o) in p.outcomes.iter().enumerate().skip(1) {
            assert!((o.direction.theta - acos(-1.0 / 3.0)).abs() < 1e-15);
            assert!((o.direction.psi - (i - 1) as f64 * 2.0 * PI / 3.0).abs() < 1e-15);
        }
        for d in p.pairwise_dots() {
            assert!((d + 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn octahedron_antipodal_pairs() {
        let p = catalog_get(3).unwrap().povm;
        let o = &p.outcomes;
        for (i, j) in [(0, 1), (2, 4), (3, 5)] {
            assert!((o[i].direction.dot(&o[j].direction) + 1.0).abs() < 1e-12);
        }
        let dots = p.pairwise_dots();
        assert!(dots.iter().all(|d| d.abs() < 1e-12 || (d + 1.0).abs() < 1e-12));
        assert_eq!(dots.iter().filter(|d| (**d + 1.0).abs() < 1e-12).count(), 3);
    }

    #[test]
    fn icosahedron_dots() {
        let p = catalog_get(5).unwrap().povm;
        let r = 1.0 / sqrt(5.0);
        for d in p.pairwise_dots() {
            assert!(
                [-1.0, r, -r].iter().any(|t| (d - t).abs() < 1e-12),
                "unexpected dot {d}"
            );
        }
        assert!(p.outcomes.iter().all(|o| o.weight == 0.5));
    }

    #[test]
    fn n4_weights_and_lower_ring_offset() {
        let p = catalog_get(4).unwrap().povm;
        assert_eq!(p.outcomes[0].weight, 5.0 / 12.0);
        assert_eq!(p.outcomes[9].weight, 25.0 / 48.0);
        // r = 7 sits at psi = pi/4
        assert!((p.outcomes[6].direction.psi - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn n6_n7_weights_cancel_surds() {
        let p6 = catalog_get(6).unwrap().povm;
        assert_eq!(p6.outcomes[0].weight, 14.0 / 45.0);
        assert!((p6.outcomes[2].weight - 7.0 * (410.0 + sqrt(30.0)) / 7200.0).abs() < 1e-16);
        assert!((p6.outcomes[17].weight - 7.0 * (410.0 - sqrt(30.0)) / 7200.0).abs() < 1e-16);
        let p7 = catalog_get(7).unwrap().povm;
        assert_eq!(p7.outcomes[1].weight, 10.0 / 27.0);
        assert!((p7.total_weight() - 8.0).abs() < 1e-12);
        // psi_r = psi_{r-10} for the second pair of rings
        assert!((p7.outcomes[12].direction.psi - p7.outcomes[2].direction.psi).abs() < 1e-15);
    }
}
