//! Comparison of two POVMs up to a global rotation and a relabeling of
//! outcomes.
//!
//! Candidate rotations come from mapping an anchor pair of outcomes of `a`
//! onto every compatible ordered pair of `b`. Each candidate is scored by an
//! optimal assignment on angular distance, then refined by a weighted
//! Kabsch fit over the matched pairs.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::Matrix3;

use super::{frame, Povm};
use crate::geometry::Rotation;
use crate::math::{cross, dot, norm};

#[derive(Debug, Clone, PartialEq)]
pub struct Equivalence {
    pub equivalent: bool,
    /// Rotation `R` with `R n̂_a(i) ≈ n̂_b(matching[i])`, when one was found.
    pub rotation: Option<Rotation>,
    pub matching: Vec<usize>,
    pub max_angle: f64,
    pub max_weight_difference: f64,
}

impl Equivalence {
    fn none() -> Self {
        Equivalence {
            equivalent: false,
            rotation: None,
            matching: Vec::new(),
            max_angle: f64::INFINITY,
            max_weight_difference: f64::INFINITY,
        }
    }

    fn score(&self) -> f64 {
        self.max_angle.max(self.max_weight_difference)
    }
}

const COLLINEAR: f64 = 1e-6;

pub fn equivalent_up_to_rotation(a: &Povm, b: &Povm, tol: f64) -> Equivalence {
    if a.copies != b.copies || a.len() != b.len() || a.is_empty() {
        return Equivalence::none();
    }
    let n = a.len();
    let loose = 4.0 * tol + 1e-12;
    let av: Vec<[f64; 3]> = a.outcomes.iter().map(|o| o.direction.cartesian).collect();
    let bv: Vec<[f64; 3]> = b.outcomes.iter().map(|o| o.direction.cartesian).collect();
    let aw: Vec<f64> = a.outcomes.iter().map(|o| o.weight).collect();
    let bw: Vec<f64> = b.outcomes.iter().map(|o| o.weight).collect();

    let anchor = (1..n).find(|&j| norm(&cross(&av[0], &av[j])) > COLLINEAR);
    let mut best = Equivalence::none();

    let consider = |rotation: Rotation, best: &mut Equivalence| {
        let candidate = score_rotation(&rotation, &av, &aw, &bv, &bw);
        let candidate = refine(candidate, &av, &aw, &bv, &bw);
        if candidate.score() < best.score() {
            *best = candidate;
        }
    };

    for p in 0..n {
        if (aw[0] - bw[p]).abs() > loose {
            continue;
        }
        match anchor {
            Some(j) => {
                let target = dot(&av[0], &av[j]);
                let from = frame(&av[0], &av[j]);
                for q in 0..n {
                    if q == p
                        || (aw[j] - bw[q]).abs() > loose
                        || (dot(&bv[p], &bv[q]) - target).abs() > loose
                        || norm(&cross(&bv[p], &bv[q])) <= COLLINEAR
                    {
                        continue;
                    }
                    let to = frame(&bv[p], &bv[q]);
                    consider(frame_map(&from, &to), &mut best);
                    if best.score() < tol {
                        break;
                    }
                }
            }
            None => {
                // every direction of `a` lies on one axis: align that axis
                let helper = perpendicular(&av[0]);
                let from = frame(&av[0], &helper);
                let to = frame(&bv[p], &perpendicular(&bv[p]));
                consider(frame_map(&from, &to), &mut best);
            }
        }
        if best.score() < tol {
            break;
        }
    }
    best.equivalent = best.max_angle < tol && best.max_weight_difference < tol;
    best
}

fn perpendicular(v: &[f64; 3]) -> [f64; 3] {
    let axis = if v[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let p = cross(v, &axis);
    let len = norm(&p);
    let u = [p[0] / len, p[1] / len, p[2] / len];
    // frame() expects a unit vector in the plane; any non-collinear one works
    [u[0] + v[0], u[1] + v[1], u[2] + v[2]]
}

/// Rotation mapping frame `from` (rows) onto frame `to` (rows): `toᵀ · from`.
fn frame_map(from: &[[f64; 3]; 3], to: &[[f64; 3]; 3]) -> Rotation {
    let mut m = [[0.0; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = (0..3).map(|k| to[k][i] * from[k][j]).sum();
        }
    }
    Rotation::from_rows_unchecked(m)
}

fn score_rotation(
    rotation: &Rotation,
    av: &[[f64; 3]],
    aw: &[f64],
    bv: &[[f64; 3]],
    bw: &[f64],
) -> Equivalence {
    let n = av.len();
    let rotated: Vec<[f64; 3]> = av.iter().map(|v| rotation.apply(v)).collect();
    let mut cost = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            cost[i * n + k] =
                crate::math::angle_between(&rotated[i], &bv[k]) + (aw[i] - bw[k]).abs();
        }
    }
    let matching = hungarian(&cost, n);
    deviations(*rotation, matching, &rotated, aw, bv, bw)
}

fn deviations(
    rotation: Rotation,
    matching: Vec<usize>,
    rotated: &[[f64; 3]],
    aw: &[f64],
    bv: &[[f64; 3]],
    bw: &[f64],
) -> Equivalence {
    let mut max_angle: f64 = 0.0;
    let mut max_weight_difference: f64 = 0.0;
    for (i, &k) in matching.iter().enumerate() {
        max_angle = max_angle.max(crate::math::angle_between(&rotated[i], &bv[k]));
        max_weight_difference = max_weight_difference.max((aw[i] - bw[k]).abs());
    }
    Equivalence {
        equivalent: false,
        rotation: Some(rotation),
        matching,
        max_angle,
        max_weight_difference,
    }
}

/// Weighted Kabsch fit over the matched pairs, keeping the matching.
fn refine(
    candidate: Equivalence,
    av: &[[f64; 3]],
    aw: &[f64],
    bv: &[[f64; 3]],
    bw: &[f64],
) -> Equivalence {
    let pairs: Vec<([f64; 3], [f64; 3], f64)> = candidate
        .matching
        .iter()
        .enumerate()
        .map(|(i, &k)| (av[i], bv[k], aw[i] + bw[k]))
        .collect();
    let Some(rotation) = kabsch(&pairs) else {
        return candidate;
    };
    let rotated: Vec<[f64; 3]> = av.iter().map(|v| rotation.apply(v)).collect();
    let refined = deviations(rotation, candidate.matching.clone(), &rotated, aw, bv, bw);
    if refined.score() <= candidate.score() {
        refined
    } else {
        candidate
    }
}

/// Proper rotation `R` minimizing `Σ w |R a - b|²` (no translation: the
/// points live on the unit sphere).
pub(crate) fn kabsch(pairs: &[([f64; 3], [f64; 3], f64)]) -> Option<Rotation> {
    let mut h = Matrix3::<f64>::zeros();
    for (a, b, w) in pairs {
        for i in 0..3 {
            for j in 0..3 {
                h[(i, j)] += w * a[i] * b[j];
            }
        }
    }
    let svd = h.svd(true, true);
    let u = svd.u?;
    let v_t = svd.v_t?;
    let v = v_t.transpose();
    let d = (v * u.transpose()).determinant().signum();
    let correction = Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 1.0, d));
    let r = v * correction * u.transpose();
    let m = [
        [r[(0, 0)], r[(0, 1)], r[(0, 2)]],
        [r[(1, 0)], r[(1, 1)], r[(1, 2)]],
        [r[(2, 0)], r[(2, 1)], r[(2, 2)]],
    ];
    Rotation::new(m).ok()
}

/// Minimum-cost perfect assignment on a dense `n × n` cost matrix
/// (row-major). Returns `assignment[row] = column`. Shortest augmenting
/// path with potentials, `O(n³)`.
pub(crate) fn hungarian(cost: &[f64], n: usize) -> Vec<usize> {
    let inf = f64::INFINITY;
    // 1-based internally; index 0 is the virtual source column
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut col_owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        col_owner[0] = row;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = col_owner[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[col_owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if col_owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            col_owner[j0] = col_owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if col_owner[j] > 0 {
            assignment[col_owner[j] - 1] = j - 1;
        }
    }
    assignment
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::{catalog_get, Outcome, CATALOG_COPIES};
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_force_assignment(cost: &[f64], n: usize) -> f64 {
        fn go(row: usize, n: usize, used: &mut Vec<bool>, cost: &[f64]) -> f64 {
            if row == n {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for c in 0..n {
                if !used[c] {
                    used[c] = true;
                    best = best.min(cost[row * n + c] + go(row + 1, n, used, cost));
                    used[c] = false;
                }
            }
            best
        }
        go(0, n, &mut vec![false; n], cost)
    }

    #[test]
    fn hungarian_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for n in 1..=7 {
            for _ in 0..20 {
                let cost: Vec<f64> = (0..n * n).map(|_| rng.random::<f64>()).collect();
                let a = hungarian(&cost, n);
                let mut seen = a.clone();
                seen.sort();
                assert_eq!(seen, (0..n).collect::<Vec<_>>());
                let total: f64 = a.iter().enumerate().map(|(i, &j)| cost[i * n + j]).sum();
                assert!((total - brute_force_assignment(&cost, n)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn kabsch_recovers_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let r = Rotation::random(&mut rng);
        let pairs: Vec<_> = (0..6)
            .map(|_| {
                let a = crate::geometry::Direction::random(&mut rng).cartesian;
                (a, r.apply(&a), 1.0)
            })
            .collect();
        let fit = kabsch(&pairs).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((fit.matrix()[i][j] - r.matrix()[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rotated_and_permuted_entries_are_equivalent() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for n in CATALOG_COPIES {
            let p = catalog_get(n).unwrap().povm;
            let mut q = p.rotated(&Rotation::random(&mut rng));
            q.outcomes.shuffle(&mut rng);
            let eq = equivalent_up_to_rotation(&p, &q, 1e-8);
            assert!(eq.equivalent, "N={n}: {eq:?}");
            let back = equivalent_up_to_rotation(&q, &p, 1e-8);
            assert!(back.equivalent, "symmetry N={n}");
            assert!(equivalent_up_to_rotation(&p, &p, 1e-8).equivalent, "reflexive N={n}");
        }
    }

    #[test]
    fn different_sizes_are_not_equivalent() {
        let tet = catalog_get(2).unwrap().povm;
        let mut oct = catalog_get(3).unwrap().povm;
        oct.copies = 2;
        let eq = equivalent_up_to_rotation(&tet, &oct, 1e-8);
        assert!(!eq.equivalent);
        assert!(eq.rotation.is_none());
    }

    #[test]
    fn weight_mismatch_is_detected() {
        let tet = catalog_get(2).unwrap().povm;
        let mut other = tet.clone();
        other.outcomes[2] = Outcome::new(0.75 + 1e-5, other.outcomes[2].direction);
        assert!(!equivalent_up_to_rotation(&tet, &other, 1e-8).equivalent);
        assert!(equivalent_up_to_rotation(&tet, &other, 1e-4).equivalent);
    }
}
