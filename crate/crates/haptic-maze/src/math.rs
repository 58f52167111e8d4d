//! Small fixed-size linear algebra kernel: 3-vectors, right-handed
//! orthonormal bases built from a motion direction, and the symmetric
//! positive-definite ellipsoid matrices used for stiffness and damping.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Universal degeneracy threshold for vector norms (m or N).
pub const EPS_NORM: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum MathError {
    #[error("vector norm below degeneracy threshold")]
    DegenerateVector,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };
    pub const X: Vec3 = Vec3 { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: Vec3 = Vec3 { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 1.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    /// Planar helper: z is pinned to 0.
    pub const fn planar(x: f64, y: f64) -> Self {
        Vec3 { x, y, z: 0.0 }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * other.z - self.z * other.y,
            y: self.z * other.x - self.x * other.z,
            z: self.x * other.y - self.y * other.x,
        }
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Largest absolute component.
    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Returns the unit vector parallel to `v`.
pub fn normalize(v: Vec3) -> Result<Vec3, MathError> {
    let n = v.norm();
    if n <= EPS_NORM {
        return Err(MathError::DegenerateVector);
    }
    Ok(v * (1.0 / n))
}

/// Angle between two vectors in [0, pi]. The arccos argument is clamped to
/// [-1, 1] so near-parallel inputs cannot produce NaN.
pub fn angle_between(a: Vec3, b: Vec3) -> Result<f64, MathError> {
    let na = a.norm();
    let nb = b.norm();
    if na <= EPS_NORM || nb <= EPS_NORM {
        return Err(MathError::DegenerateVector);
    }
    Ok((a.dot(b) / (na * nb)).clamp(-1.0, 1.0).acos())
}

/// Damping paired with a stiffness value: d = 2 * zeta * sqrt(k).
pub fn damping_from_stiffness(k: f64, zeta: f64) -> Result<f64, MathError> {
    if k <= 0.0 || zeta <= 0.0 {
        return Err(MathError::InvalidParams(format!(
            "damping_from_stiffness requires k > 0 and zeta > 0, got k = {k}, zeta = {zeta}"
        )));
    }
    Ok(2.0 * zeta * k.sqrt())
}

/// Right-handed orthonormal basis stored as three column vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Basis3 {
    pub u1: Vec3,
    pub u2: Vec3,
    pub u3: Vec3,
}

impl Basis3 {
    pub const IDENTITY: Basis3 = Basis3 {
        u1: Vec3::X,
        u2: Vec3::Y,
        u3: Vec3::Z,
    };
}

/// Completes a right-handed orthonormal basis whose first column is the
/// normalized motion vector. A degenerate motion vector returns `fallback`
/// unchanged.
///
/// When the motion is not close to the world z-axis the second column is
/// `normalize(z x u1)`, otherwise the x-axis is used as the helper axis.
pub fn build_basis(motion: Vec3, fallback: Basis3) -> Basis3 {
    let u1 = match normalize(motion) {
        Ok(u) => u,
        Err(_) => return fallback,
    };
    let helper = if u1.dot(Vec3::Z).abs() < 0.999 {
        Vec3::Z
    } else {
        Vec3::X
    };
    // helper x u1 cannot be degenerate after the axis switch above
    let u2 = normalize(helper.cross(u1)).expect("helper axis parallel to motion");
    let u3 = u1.cross(u2);
    Basis3 { u1, u2, u3 }
}

/// Symmetric 3x3 matrix (stiffness in N/m, damping in N*s/m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMat3 {
    m: [[f64; 3]; 3],
}

impl SymMat3 {
    pub fn diagonal(a: f64, b: f64, c: f64) -> Self {
        SymMat3 {
            m: [[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]],
        }
    }

    pub fn isotropic(k: f64) -> Self {
        Self::diagonal(k, k, k)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    pub fn mul_vec(&self, v: Vec3) -> Vec3 {
        let r = &self.m;
        Vec3::new(
            r[0][0] * v.x + r[0][1] * v.y + r[0][2] * v.z,
            r[1][0] * v.x + r[1][1] * v.y + r[1][2] * v.z,
            r[2][0] * v.x + r[2][1] * v.y + r[2][2] * v.z,
        )
    }

    pub fn as_rows(&self) -> [[f64; 3]; 3] {
        self.m
    }
}

/// U * diag(major, minor, minor) * U^T, computed as
/// minor * I + (major - minor) * u1 u1^T so symmetry is exact.
pub fn ellipsoid_matrix(basis: &Basis3, major: f64, minor: f64) -> Result<SymMat3, MathError> {
    if minor <= 0.0 || major < minor {
        return Err(MathError::InvalidParams(format!(
            "ellipsoid_matrix requires major >= minor > 0, got major = {major}, minor = {minor}"
        )));
    }
    let u = basis.u1;
    let d = major - minor;
    let mut m = [[0.0; 3]; 3];
    let c = [u.x, u.y, u.z];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = d * c[i] * c[j];
        }
        m[i][i] += minor;
    }
    Ok(SymMat3 { m })
}

/// Scalar generators for the stiffness/damping ellipsoids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StiffnessParams {
    /// Stiffness along the motion direction (N/m).
    pub k_max: f64,
    /// Stiffness orthogonal to the motion direction (N/m).
    pub k_min: f64,
    /// Damping ratio used for both d_max and d_min.
    #[serde(default = "default_zeta")]
    pub zeta: f64,
}

fn default_zeta() -> f64 {
    0.7
}

impl Default for StiffnessParams {
    fn default() -> Self {
        StiffnessParams {
            k_max: 1000.0,
            k_min: 300.0,
            zeta: 0.7,
        }
    }
}

impl StiffnessParams {
    pub fn validate(&self) -> Result<(), MathError> {
        if !(self.k_min > 0.0 && self.k_min <= self.k_max) {
            return Err(MathError::InvalidParams(format!(
                "stiffness requires 0 < k_min <= k_max, got k_min = {}, k_max = {}",
                self.k_min, self.k_max
            )));
        }
        if !(self.zeta > 0.0 && self.zeta <= 1.0) {
            return Err(MathError::InvalidParams(format!(
                "damping ratio must be in (0, 1], got {}",
                self.zeta
            )));
        }
        Ok(())
    }

    pub fn d_max(&self) -> f64 {
        2.0 * self.zeta * self.k_max.sqrt()
    }

    pub fn d_min(&self) -> f64 {
        2.0 * self.zeta * self.k_min.sqrt()
    }
}
