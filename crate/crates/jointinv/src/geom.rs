//! Dense 3-vector / 3×3-matrix arithmetic and similarity alignment.
//!
//! Everything upstream of the optimizer works in terms of these small value
//! types. The only heavy numerics here is [`align_similarity`], the
//! SVD-based absolute-orientation fit used when comparing a reconstruction
//! against ground truth; the SVD itself is delegated to `nalgebra`.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::Error;

/// A 3-vector of `f64` components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3 { x, y, z }
    }

    /// Euclidean inner product.
    pub fn dot(self, rhs: Vec3) -> f64 {
        self.x * rhs.x + self.y * rhs.y + self.z * rhs.z
    }

    /// Right-handed cross product.
    pub fn cross(self, rhs: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * rhs.z - self.z * rhs.y,
            y: self.z * rhs.x - self.x * rhs.z,
            z: self.x * rhs.y - self.y * rhs.x,
        }
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Largest absolute component (infinity norm).
    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    /// Unit vector in the same direction; errors on (numerically) zero input.
    pub fn try_normalized(self) -> Result<Vec3, Error> {
        let n = self.norm();
        if n <= f64::MIN_POSITIVE || !n.is_finite() {
            return Err(Error::DegenerateConfiguration(
                "cannot normalize a zero-length vector".into(),
            ));
        }
        Ok(self / n)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Vec3 {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

/// Right-handed cross product (free-function form).
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    a.cross(b)
}

/// Euclidean inner product (free-function form).
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a.dot(b)
}

/// Euclidean norm (free-function form).
pub fn norm(a: Vec3) -> f64 {
    a.norm()
}

/// A 3×3 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3 {
    /// `m[row][col]`.
    pub m: [[f64; 3]; 3],
}

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3 {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    pub const fn new(m: [[f64; 3]; 3]) -> Mat3 {
        Mat3 { m }
    }

    pub fn from_rows(r0: Vec3, r1: Vec3, r2: Vec3) -> Mat3 {
        Mat3 {
            m: [r0.to_array(), r1.to_array(), r2.to_array()],
        }
    }

    pub fn row(&self, i: usize) -> Vec3 {
        Vec3::from_array(self.m[i])
    }

    pub fn col(&self, j: usize) -> Vec3 {
        Vec3::new(self.m[0][j], self.m[1][j], self.m[2][j])
    }

    pub fn transpose(&self) -> Mat3 {
        let mut t = [[0.0; 3]; 3];
        for (i, row) in self.m.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                t[j][i] = v;
            }
        }
        Mat3 { m: t }
    }

    pub fn det(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Largest absolute entry (max norm).
    pub fn max_abs(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .fold(0.0f64, |acc, &v| acc.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|v| v.is_finite())
    }

    /// True when `‖MᵀM − Id‖_∞ < tol` and `det(M) > 0` — the rotation-matrix
    /// refinement used by group elements and camera poses.
    pub fn is_rotation(&self, tol: f64) -> bool {
        let gram = self.transpose() * *self;
        let mut dev = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let id = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((gram.m[i][j] - id).abs());
            }
        }
        dev < tol && self.det() > 0.0
    }
}

impl Mul<Vec3> for Mat3 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        Vec3::new(self.row(0).dot(v), self.row(1).dot(v), self.row(2).dot(v))
    }
}

impl Mul<Mat3> for Mat3 {
    type Output = Mat3;
    fn mul(self, rhs: Mat3) -> Mat3 {
        let mut out = [[0.0; 3]; 3];
        for (i, out_row) in out.iter_mut().enumerate() {
            for (j, out_v) in out_row.iter_mut().enumerate() {
                *out_v = self.row(i).dot(rhs.col(j));
            }
        }
        Mat3 { m: out }
    }
}

impl Sub for Mat3 {
    type Output = Mat3;
    fn sub(self, rhs: Mat3) -> Mat3 {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = self.m[i][j] - rhs.m[i][j];
            }
        }
        Mat3 { m: out }
    }
}

/// Rotation matrix for a rotation of `angle` radians about `axis`
/// (Rodrigues' formula). Errors when `axis` is numerically zero.
pub fn rotation_from_axis_angle(axis: Vec3, angle: f64) -> Result<Mat3, Error> {
    let u = axis.try_normalized()?;
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    Ok(Mat3::new([
        [
            c + u.x * u.x * t,
            u.x * u.y * t - u.z * s,
            u.x * u.z * t + u.y * s,
        ],
        [
            u.y * u.x * t + u.z * s,
            c + u.y * u.y * t,
            u.y * u.z * t - u.x * s,
        ],
        [
            u.z * u.x * t - u.y * s,
            u.z * u.y * t + u.x * s,
            c + u.z * u.z * t,
        ],
    ]))
}

/// `x ↦ scale·rotation·x + translation`, the transform class used to compare
/// a reconstruction (defined up to global similarity) with ground truth.
#[derive(Debug, Clone, Copy)]
pub struct SimilarityTransform {
    pub scale: f64,
    pub rotation: Mat3,
    pub translation: Vec3,
}

impl SimilarityTransform {
    pub fn identity() -> SimilarityTransform {
        SimilarityTransform {
            scale: 1.0,
            rotation: Mat3::IDENTITY,
            translation: Vec3::ZERO,
        }
    }

    pub fn apply(&self, p: Vec3) -> Vec3 {
        self.rotation * p * self.scale + self.translation
    }
}

pub(crate) fn from_na(m: &nalgebra::Matrix3<f64>) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = m[(i, j)];
        }
    }
    Mat3::new(out)
}

/// Least-squares similarity alignment (absolute orientation with scale).
///
/// Returns the transform minimizing `Σ ‖s·R·sourceᵢ + t − targetᵢ‖²` together
/// with the residual RMS, via the SVD of the cross-covariance with a
/// determinant-sign correction so the rotation is proper.
///
/// Errors with [`Error::LengthMismatch`] on unequal lengths and
/// [`Error::DegenerateConfiguration`] when the source points are coincident
/// or collinear (scatter rank < 2), where the rotation is not determined.
pub fn align_similarity(
    source: &[Vec3],
    target: &[Vec3],
) -> Result<(SimilarityTransform, f64), Error> {
    if source.len() != target.len() {
        return Err(Error::LengthMismatch {
            expected: source.len(),
            got: target.len(),
        });
    }
    if source.len() < 3 {
        return Err(Error::DegenerateConfiguration(
            "similarity alignment needs at least 3 point pairs".into(),
        ));
    }
    let inv_n = 1.0 / source.len() as f64;
    let mu_s = source.iter().fold(Vec3::ZERO, |a, &p| a + p) * inv_n;
    let mu_t = target.iter().fold(Vec3::ZERO, |a, &p| a + p) * inv_n;

    // Source variance and source-scatter rank check.
    let mut var_s = 0.0;
    let mut scatter = nalgebra::Matrix3::<f64>::zeros();
    for &p in source {
        let c = p - mu_s;
        var_s += c.norm_squared() * inv_n;
        scatter += nalgebra::Vector3::new(c.x, c.y, c.z)
            * nalgebra::RowVector3::new(c.x, c.y, c.z)
            * inv_n;
    }
    if var_s <= f64::MIN_POSITIVE {
        return Err(Error::DegenerateConfiguration(
            "source points are coincident".into(),
        ));
    }
    let scatter_sv = scatter.svd(false, false).singular_values;
    if scatter_sv[1] <= 1e-12 * scatter_sv[0] {
        return Err(Error::DegenerateConfiguration(
            "source points are collinear".into(),
        ));
    }

    // Cross-covariance target×source and its SVD.
    let mut sigma = nalgebra::Matrix3::<f64>::zeros();
    for (&p, &q) in source.iter().zip(target) {
        let c = p - mu_s;
        let d = q - mu_t;
        sigma += nalgebra::Vector3::new(d.x, d.y, d.z)
            * nalgebra::RowVector3::new(c.x, c.y, c.z)
            * inv_n;
    }
    let svd = sigma.svd(true, true);
    let u = svd.u.expect("SVD with U requested");
    let v_t = svd.v_t.expect("SVD with Vᵀ requested");
    let d = svd.singular_values;
    let flip = (u.determinant() * v_t.determinant()) < 0.0;
    let s_diag = nalgebra::Vector3::new(1.0, 1.0, if flip { -1.0 } else { 1.0 });
    let rot_na = u * nalgebra::Matrix3::from_diagonal(&s_diag) * v_t;
    let scale = (d[0] * s_diag[0] + d[1] * s_diag[1] + d[2] * s_diag[2]) / var_s;
    if !(scale.is_finite() && scale > 0.0) {
        // Happens only for adversarial targets (e.g. reflections of near-planar
        // sets); the fit is meaningless, so refuse rather than return garbage.
        return Err(Error::DegenerateConfiguration(format!(
            "similarity fit produced non-positive scale {scale}"
        )));
    }
    let rotation = from_na(&rot_na);
    let translation = mu_t - rotation * mu_s * scale;
    let transform = SimilarityTransform {
        scale,
        rotation,
        translation,
    };
    let mut ss = 0.0;
    for (&p, &q) in source.iter().zip(target) {
        ss += (transform.apply(p) - q).norm_squared();
    }
    Ok((transform, (ss * inv_n).sqrt()))
}
