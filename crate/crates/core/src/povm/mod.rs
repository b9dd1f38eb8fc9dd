//! POVM data model, the catalog of known minimal solutions, gauge fixing
//! and comparison up to a global rotation.

mod align;
mod catalog;

pub use align::{equivalent_up_to_rotation, Equivalence};
pub use catalog::{catalog_get, CatalogEntry, CATALOG_COPIES};

use alloc::vec::Vec;
use core::fmt;

use crate::geometry::{Direction, Rotation};
use crate::math::{cross, dot, norm, PI, TAU};
use crate::{Error, Result};

/// One measurement outcome: the weighted projector
/// `c² |θ,ψ⟩⟨θ,ψ|^{⊗N}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    /// `c²`, in `(0, 1]` for a valid POVM.
    pub weight: f64,
    pub direction: Direction,
}

impl Outcome {
    pub fn new(weight: f64, direction: Direction) -> Self {
        Outcome { weight, direction }
    }
}

/// A finite POVM on `copies` qubits built from spin-coherent projectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    pub copies: usize,
    pub outcomes: Vec<Outcome>,
}

impl Povm {
    pub fn new(copies: usize, outcomes: Vec<Outcome>) -> Self {
        Povm { copies, outcomes }
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Dimension of the symmetric subspace, `N + 1`.
    pub fn dimension(&self) -> usize {
        self.copies + 1
    }

    pub fn total_weight(&self) -> f64 {
        self.outcomes.iter().map(|o| o.weight).sum()
    }

    pub fn rotated(&self, rotation: &Rotation) -> Povm {
        Povm {
            copies: self.copies,
            outcomes: self
                .outcomes
                .iter()
                .map(|o| Outcome::new(o.weight, o.direction.rotated(rotation)))
                .collect(),
        }
    }

    /// Multiset of pairwise dot products `n̂_i·n̂_j`, `i < j`, sorted.
    pub fn pairwise_dots(&self) -> Vec<f64> {
        let mut dots = Vec::with_capacity(self.len() * self.len().saturating_sub(1) / 2);
        for (i, a) in self.outcomes.iter().enumerate() {
            for b in &self.outcomes[i + 1..] {
                dots.push(a.direction.dot(&b.direction));
            }
        }
        dots.sort_by(f64::total_cmp);
        dots
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ViolationKind {
    ZeroCopies,
    NoOutcomes,
    WeightOutOfRange { weight: f64 },
    DirectionNorm { norm: f64 },
    AngleRange { theta: f64, psi: f64 },
    AngleMismatch { deviation: f64 },
}

/// A failed data-model invariant. `outcome` is `None` for POVM-level issues.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub outcome: Option<usize>,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(i) = self.outcome {
            write!(f, "outcome {i}: ")?;
        }
        match self.kind {
            ViolationKind::ZeroCopies => write!(f, "number of copies must be at least 1"),
            ViolationKind::NoOutcomes => write!(f, "no outcomes"),
            ViolationKind::WeightOutOfRange { weight } => {
                write!(f, "weight out of range: {weight} not in (0, 1]")
            }
            ViolationKind::DirectionNorm { norm } => write!(f, "direction norm: |n| = {norm}"),
            ViolationKind::AngleRange { theta, psi } => {
                write!(f, "angle range: theta={theta}, psi={psi}")
            }
            ViolationKind::AngleMismatch { deviation } => {
                write!(f, "angles disagree with cartesian vector by {deviation:.3e}")
            }
        }
    }
}

const DIRECTION_TOL: f64 = 1e-12;

/// Checks every data-model invariant; an empty list means the POVM is well
/// formed (not that it is optimal).
pub fn validate(povm: &Povm) -> Vec<Violation> {
    let mut out = Vec::new();
    if povm.copies == 0 {
        out.push(Violation {
            outcome: None,
            kind: ViolationKind::ZeroCopies,
        });
    }
    if povm.outcomes.is_empty() {
        out.push(Violation {
            outcome: None,
            kind: ViolationKind::NoOutcomes,
        });
    }
    for (i, o) in povm.outcomes.iter().enumerate() {
        let w = o.weight;
        if !(w > 0.0 && w <= 1.0) {
            out.push(Violation {
                outcome: Some(i),
                kind: ViolationKind::WeightOutOfRange { weight: w },
            });
        }
        let d = &o.direction;
        let len = norm(&d.cartesian);
        if !((len - 1.0).abs() <= DIRECTION_TOL) {
            out.push(Violation {
                outcome: Some(i),
                kind: ViolationKind::DirectionNorm { norm: len },
            });
            continue;
        }
        if !((0.0..=PI).contains(&d.theta) && (0.0..TAU).contains(&d.psi)) {
            out.push(Violation {
                outcome: Some(i),
                kind: ViolationKind::AngleRange {
                    theta: d.theta,
                    psi: d.psi,
                },
            });
            continue;
        }
        let expect = Direction::from_angles(d.theta, d.psi).cartesian;
        let deviation = (0..3)
            .map(|k| (expect[k] - d.cartesian[k]).abs())
            .fold(0.0, f64::max);
        if deviation > DIRECTION_TOL {
            out.push(Violation {
                outcome: Some(i),
                kind: ViolationKind::AngleMismatch { deviation },
            });
        }
    }
    out
}

/// Outcomes closer than this (radians) are merged by canonicalization.
pub const MERGE_ANGLE: f64 = 1e-9;

/// Fixes the rotational gauge: outcome 0 is moved to `+z` and the first
/// outcome not collinear with it into the `x–z` half-plane with `x > 0`.
/// Coincident outcomes are merged first by adding their weights; order is
/// otherwise preserved.
pub fn canonicalize(povm: &Povm) -> Result<Povm> {
    let mut merged: Vec<Outcome> = Vec::with_capacity(povm.len());
    for o in &povm.outcomes {
        match merged
            .iter_mut()
            .find(|m| m.direction.angle_to(&o.direction) < MERGE_ANGLE)
        {
            Some(m) => m.weight += o.weight,
            None => merged.push(*o),
        }
    }
    let first = merged.first().ok_or(Error::EmptyPovm)?.direction.cartesian;
    let pivot = merged
        .iter()
        .position(|o| norm(&cross(&first, &o.direction.cartesian)) > MERGE_ANGLE)
        .ok_or(Error::CollinearOutcomes)?;
    let rotation = gauge_rotation(&first, &merged[pivot].direction.cartesian);
    let mut outcomes: Vec<Outcome> = merged
        .iter()
        .map(|o| Outcome::new(o.weight, o.direction.rotated(&rotation)))
        .collect();
    outcomes[0].direction = Direction::NORTH;
    let p = outcomes[pivot].direction.cartesian;
    outcomes[pivot].direction = Direction::from_vector([p[0].abs(), 0.0, p[2]])?;
    Ok(Povm::new(povm.copies, outcomes))
}

/// Rotation taking `a` to `+z` and `b` into the `x–z` half-plane `x ≥ 0`.
/// `a` and `b` must be unit vectors that are not collinear.
pub(crate) fn gauge_rotation(a: &[f64; 3], b: &[f64; 3]) -> Rotation {
    Rotation::from_rows_unchecked(frame(a, b))
}

/// Orthonormal right-handed frame `(e1, e2, e3)` with `e3 = a` and `b` in
/// the `e1–e3` plane.
pub(crate) fn frame(a: &[f64; 3], b: &[f64; 3]) -> [[f64; 3]; 3] {
    let ab = dot(a, b);
    let mut e1 = [b[0] - ab * a[0], b[1] - ab * a[1], b[2] - ab * a[2]];
    let len = norm(&e1);
    for c in &mut e1 {
        *c /= len;
    }
    let e2 = cross(a, &e1);
    [e1, e2, *a]
}
