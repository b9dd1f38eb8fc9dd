//! Spherical geometry primitives shared by every other module.
//!
//! Angles are stored next to the Cartesian unit vector, but inner loops
//! always read the Cartesian form so that the poles `θ ∈ {0, π}` need no
//! special casing.

mod legendre;
mod quadrature;

pub use legendre::assoc_legendre;
pub use quadrature::{gauss_legendre_nodes, sphere_rule, QuadratureRule};

use rand::Rng;

use crate::math::{atan2, cos, cross, dot, norm, sin, sqrt, PI, TAU};
use crate::{Error, Result};

/// A point on the unit sphere.
///
/// `cartesian = (sinθ cosψ, sinθ sinψ, cosθ)`, `θ ∈ [0, π]`, `ψ ∈ [0, 2π)`.
/// The fields are public so that callers (and [`crate::povm::validate`]) can
/// inspect them; the constructors always produce consistent values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub theta: f64,
    pub psi: f64,
    pub cartesian: [f64; 3],
}

fn wrap_azimuth(psi: f64) -> f64 {
    let wrapped = psi - TAU * libm::floor(psi / TAU);
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

impl Direction {
    pub const NORTH: Direction = Direction {
        theta: 0.0,
        psi: 0.0,
        cartesian: [0.0, 0.0, 1.0],
    };

    /// Builds a direction from polar and azimuthal angles. The azimuth is
    /// reduced into `[0, 2π)`; the polar angle is taken as given.
    pub fn from_angles(theta: f64, psi: f64) -> Self {
        let psi = wrap_azimuth(psi);
        let (st, ct) = (sin(theta), cos(theta));
        Direction {
            theta,
            psi,
            cartesian: [st * cos(psi), st * sin(psi), ct],
        }
    }

    /// Normalizes `v` and recovers the angles. At the poles `ψ = 0`.
    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        let len = norm(&v);
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::ZeroVector);
        }
        let u = [v[0] / len, v[1] / len, v[2] / len];
        let rho = sqrt(u[0] * u[0] + u[1] * u[1]);
        let theta = atan2(rho, u[2]);
        let psi = if rho == 0.0 { 0.0 } else { wrap_azimuth(atan2(u[1], u[0])) };
        Ok(Direction {
            theta,
            psi,
            cartesian: u,
        })
    }

    /// Uniformly distributed direction: `cosθ` uniform on `[-1, 1]`, `ψ`
    /// uniform on `[0, 2π)`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let z: f64 = 1.0 - 2.0 * rng.random::<f64>();
        let psi = TAU * rng.random::<f64>();
        let rho = sqrt((1.0 - z * z).max(0.0));
        Direction {
            theta: atan2(rho, z),
            psi,
            cartesian: [rho * cos(psi), rho * sin(psi), z],
        }
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        dot(&self.cartesian, &other.cartesian)
    }

    /// Great-circle distance in radians.
    pub fn angle_to(&self, other: &Direction) -> f64 {
        crate::math::angle_between(&self.cartesian, &other.cartesian)
    }

    pub fn antipode(&self) -> Direction {
        let c = self.cartesian;
        Direction {
            theta: PI - self.theta,
            psi: if c[0] == 0.0 && c[1] == 0.0 { 0.0 } else { wrap_azimuth(self.psi + PI) },
            cartesian: [-c[0], -c[1], -c[2]],
        }
    }

    pub fn rotated(&self, rotation: &Rotation) -> Direction {
        let v = rotation.apply(&self.cartesian);
        // rotation preserves the norm, so the vector is never zero
        Direction::from_vector(v).unwrap_or(*self)
    }
}

/// A proper orthogonal 3×3 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation([[f64; 3]; 3]);

const ROTATION_TOL: f64 = 1e-10;

impl Rotation {
    pub const IDENTITY: Rotation = Rotation([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    /// Accepts `m` if `mᵀm = I` and `det m = 1` to within `1e-10`.
    pub fn new(m: [[f64; 3]; 3]) -> Result<Self> {
        let mut defect: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = m.iter().map(|row| row[i] * row[j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((s - target).abs());
            }
        }
        let det = dot(&m[0], &cross(&m[1], &m[2]));
        if defect > ROTATION_TOL || (det - 1.0).abs() > ROTATION_TOL {
            return Err(Error::NotARotation { defect, det });
        }
        Ok(Rotation(m))
    }

    /// Rotation by `angle` about the unit `axis` (right-hand rule).
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Result<Self> {
        let len = norm(&axis);
        if !(len > 0.0) {
            return Err(Error::ZeroVector);
        }
        let [x, y, z] = [axis[0] / len, axis[1] / len, axis[2] / len];
        let (s, c) = (sin(angle), cos(angle));
        let t = 1.0 - c;
        Ok(Rotation([
            [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
            [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
            [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
        ]))
    }

    /// Uniformly distributed rotation (Haar measure) from a random unit
    /// quaternion.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let u1: f64 = rng.random();
        let u2: f64 = TAU * rng.random::<f64>();
        let u3: f64 = TAU * rng.random::<f64>();
        let (a, b) = (sqrt(1.0 - u1), sqrt(u1));
        let (w, x, y, z) = (a * sin(u2), a * cos(u2), b * sin(u3), b * cos(u3));
        Self::from_quaternion([w, x, y, z])
    }

    /// Rotation matrix of the unit quaternion `(w, x, y, z)`.
    pub fn from_quaternion(q: [f64; 4]) -> Self {
        let [w, x, y, z] = q;
        Rotation([
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ])
    }

    /// Builds the rotation from an orthonormal right-handed frame given as
    /// rows. Used internally where the frame is orthonormal by construction.
    pub(crate) fn from_rows_unchecked(rows: [[f64; 3]; 3]) -> Self {
        Rotation(rows)
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.0
    }

    pub fn apply(&self, v: &[f64; 3]) -> [f64; 3] {
        let m = &self.0;
        [dot(&m[0], v), dot(&m[1], v), dot(&m[2], v)]
    }

    pub fn transpose(&self) -> Rotation {
        let m = &self.0;
        Rotation([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Rotation) -> Rotation {
        let (a, b) = (&self.0, &other.0);
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = (0..3).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        Rotation(out)
    }
}

/// Rotates `direction` by `matrix`, rejecting matrices that are not proper
/// rotations.
pub fn rotate(direction: &Direction, matrix: &[[f64; 3]; 3]) -> Result<Direction> {
    let rotation = Rotation::new(*matrix)?;
    Ok(direction.rotated(&rotation))
}
