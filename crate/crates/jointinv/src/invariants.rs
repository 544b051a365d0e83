//! Closed-form fundamental invariants of the three group actions.
//!
//! Every quantity unchanged by a variant's group is a function of the
//! entries listed here; two configurations on the same orbit produce equal
//! vectors. The entries are ratios of cross and dot products of the ray
//! difference vectors, ordered so that vectors from different pictures can
//! be compared index by index:
//!
//! - **Base** (n ≥ 2, length 2n−3): `[I₂, I₃…Iₙ, J₃…Jₙ]` built from
//!   vᵢ = Pᵢ − P₀. `I₂` is the tangent of the angle between the first two
//!   rays; `Iᵢ`/`Jᵢ` locate ray i against the (v₁, v₂) frame.
//! - **Oriented** (n ≥ 1, length 2n+3): `[I_L, I₀, J₀, I₁…Iₙ, J₁…Jₙ]` with
//!   the corner-marker rays u₁ = P_L − P₀, u₂ = P^L − P₀ as the reference
//!   pair; `I_L` and `I₀`, `J₀` are lengths (the rigid markers pin scale).
//! - **Zoom** (n ≥ 1, length 2n−1): `[I₁, I₂…Iₙ, J₂…Jₙ]` with the optical
//!   axis u = P_M − P₀ as the first reference, each entry divided by the
//!   focal factor h(m) = 1 + m − m², m = ‖u‖.

use crate::error::Error;
use crate::geom::Vec3;
use crate::groups::{focal_factor, numerical_rank, SceneConfig, Variant, DEGENERACY_REL_TOL};

/// An ordered, index-comparable vector of fundamental invariant values.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantVector {
    variant: Variant,
    n: usize,
    pub values: Vec<f64>,
}

impl InvariantVector {
    fn new(variant: Variant, n: usize, values: Vec<f64>) -> Result<InvariantVector, Error> {
        debug_assert_eq!(values.len(), variant.invariant_len(n));
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::DegenerateConfiguration(format!(
                "non-finite invariant value {bad}"
            )));
        }
        Ok(InvariantVector { variant, n, values })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Entrywise absolute deviations |aₖ − bₖ|.
    pub fn abs_deviations(&self, other: &InvariantVector) -> Result<Vec<f64>, Error> {
        if self.variant != other.variant {
            return Err(Error::VariantMismatch {
                expected: self.variant,
                got: other.variant,
            });
        }
        if self.values.len() != other.values.len() {
            return Err(Error::LengthMismatch {
                expected: self.values.len(),
                got: other.values.len(),
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .collect())
    }

    /// True when every entry pair agrees to `rel` relative tolerance, with
    /// the absolute floor `abs` taking over near zero.
    pub fn approx_eq(&self, other: &InvariantVector, rel: f64, abs: f64) -> Result<bool, Error> {
        let devs = self.abs_deviations(other)?;
        Ok(devs.iter().zip(&self.values).zip(&other.values).all(
            |((d, a), b)| *d <= abs.max(rel * a.abs().max(b.abs())),
        ))
    }
}

/// Evaluate the fundamental invariants of `cfg` for its own variant.
pub fn invariants(cfg: &SceneConfig) -> Result<InvariantVector, Error> {
    match cfg.variant() {
        Variant::Base => invariants_base(cfg),
        Variant::Oriented => invariants_oriented(cfg),
        Variant::Zoom => invariants_zoom(cfg),
    }
}

/// Human-readable labels for each entry of an invariant vector, in the
/// vector's order (e.g. `I2, I3…In, J3…Jn` for Base).
pub fn invariant_labels(variant: Variant, n: usize) -> Vec<String> {
    let mut labels = Vec::with_capacity(variant.invariant_len(n));
    match variant {
        Variant::Base => {
            for i in 2..=n {
                labels.push(format!("I{i}"));
            }
            for j in 3..=n {
                labels.push(format!("J{j}"));
            }
        }
        Variant::Oriented => {
            labels.push("IL".to_string());
            labels.push("I0".to_string());
            labels.push("J0".to_string());
            for i in 1..=n {
                labels.push(format!("I{i}"));
            }
            for j in 1..=n {
                labels.push(format!("J{j}"));
            }
        }
        Variant::Zoom => {
            for i in 1..=n {
                labels.push(format!("I{i}"));
            }
            for j in 2..=n {
                labels.push(format!("J{j}"));
            }
        }
    }
    debug_assert_eq!(labels.len(), variant.invariant_len(n));
    labels
}

/// Guard a dot-product denominator: vanishing means the invariant pair for
/// `index` is undefined.
fn checked_dot(a: Vec3, b: Vec3, index: usize) -> Result<f64, Error> {
    let d = a.dot(b);
    if d.abs() <= DEGENERACY_REL_TOL * a.norm() * b.norm() {
        return Err(Error::OrthogonalRays { index });
    }
    Ok(d)
}

/// Base invariants `[I₂, I₃…Iₙ, J₃…Jₙ]` from vᵢ = Pᵢ − P₀.
pub fn invariants_base(cfg: &SceneConfig) -> Result<InvariantVector, Error> {
    if cfg.variant() != Variant::Base {
        return Err(Error::VariantMismatch {
            expected: Variant::Base,
            got: cfg.variant(),
        });
    }
    let n = cfg.n();
    if n < 2 {
        return Err(Error::DegenerateConfiguration(
            "base invariants need at least two points".into(),
        ));
    }
    let v: Vec<Vec3> = cfg.points.iter().map(|&p| p - cfg.p0).collect();
    let cross12 = v[0].cross(v[1]);
    let cross12_norm = cross12.norm();
    if cross12_norm <= DEGENERACY_REL_TOL * v[0].norm() * v[1].norm() {
        return Err(Error::CollinearBaseRays);
    }
    let dot12 = checked_dot(v[0], v[1], 2)?;

    let mut values = Vec::with_capacity(2 * n - 3);
    values.push(cross12_norm / dot12);
    let mut j_values = Vec::with_capacity(n.saturating_sub(2));
    for i in 2..n {
        let dot1i = checked_dot(v[0], v[i], i + 1)?;
        values.push(v[0].cross(v[i]).dot(cross12) / (dot1i * cross12_norm));
        j_values.push(v[i].dot(v[1].cross(v[0])) * v[0].norm() / (dot1i * cross12_norm));
    }
    values.extend(j_values);
    InvariantVector::new(Variant::Base, n, values)
}

/// Oriented invariants `[I_L, I₀, J₀, I₁…Iₙ, J₁…Jₙ]` with the corner-marker
/// rays as the reference pair.
pub fn invariants_oriented(cfg: &SceneConfig) -> Result<InvariantVector, Error> {
    if cfg.variant() != Variant::Oriented {
        return Err(Error::VariantMismatch {
            expected: Variant::Oriented,
            got: cfg.variant(),
        });
    }
    let n = cfg.n();
    let u1 = cfg.aux[0] - cfg.p0;
    let u2 = cfg.aux[1] - cfg.p0;
    let cross12 = u1.cross(u2);
    let cross12_norm = cross12.norm();
    if cross12_norm <= DEGENERACY_REL_TOL * u1.norm() * u2.norm() {
        return Err(Error::CollinearBaseRays);
    }
    let u1_norm = u1.norm();

    let mut values = Vec::with_capacity(2 * n + 3);
    values.push(u1_norm);
    values.push(u2.dot(u1) / u1_norm);
    values.push(cross12_norm / u1_norm);
    let mut j_values = Vec::with_capacity(n);
    for i in 0..n {
        let vi = cfg.points[i] - cfg.p0;
        let dot1i = checked_dot(u1, vi, i + 1)?;
        values.push(u1.cross(vi).dot(cross12) / (dot1i * cross12_norm));
        j_values.push(vi.dot(u2.cross(u1)) * u1_norm / (dot1i * cross12_norm));
    }
    values.extend(j_values);
    InvariantVector::new(Variant::Oriented, n, values)
}

/// Zoom invariants `[I₁, I₂…Iₙ, J₂…Jₙ]` with the optical axis u = P_M − P₀
/// as the first reference ray and every entry divided by h(m) = 1 + m − m².
pub fn invariants_zoom(cfg: &SceneConfig) -> Result<InvariantVector, Error> {
    if cfg.variant() != Variant::Zoom {
        return Err(Error::VariantMismatch {
            expected: Variant::Zoom,
            got: cfg.variant(),
        });
    }
    let n = cfg.n();
    let u = cfg.aux[0] - cfg.p0;
    let m = u.norm();
    let h = focal_factor(m);
    if h.abs() < 1e-12 {
        return Err(Error::SingularFocalFactor { m, h });
    }
    let v1 = cfg.points[0] - cfg.p0;
    let cross1 = u.cross(v1);
    let cross1_norm = cross1.norm();
    if n >= 2 && cross1_norm <= DEGENERACY_REL_TOL * m * v1.norm() {
        return Err(Error::CollinearBaseRays);
    }
    let dot1 = checked_dot(v1, u, 1)?;

    let mut values = Vec::with_capacity(2 * n - 1);
    values.push(cross1_norm / (dot1 * h));
    let mut j_values = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..n {
        let vi = cfg.points[i] - cfg.p0;
        let doti = checked_dot(vi, u, i + 1)?;
        values.push(u.cross(vi).dot(cross1) / (cross1_norm * doti * h));
        j_values.push(vi.dot(v1.cross(u)) * m / (cross1_norm * doti * h));
    }
    values.extend(j_values);
    InvariantVector::new(Variant::Zoom, n, values)
}

/// Numerical rank of the invariant map's Jacobian with respect to every
/// configuration coordinate (camera center, auxiliary points, and ray
/// points), by central finite differences with step 1e−6·max(1, |c|).
/// Singular values below 1e−8·σ_max count as zero.
///
/// For configurations in general position the rank equals the size of the
/// fundamental set — the invariants are functionally independent — and it
/// drops on degenerate configurations where the formulas' denominators
/// nearly vanish.
pub fn invariant_jacobian_rank(cfg: &SceneConfig) -> Result<usize, Error> {
    let coords = cfg.coords_flat();
    let variant = cfg.variant();
    let n = cfg.n();
    let rows = variant.invariant_len(n);
    let mut jac = nalgebra::DMatrix::<f64>::zeros(rows, coords.len());
    for j in 0..coords.len() {
        let h = 1e-6 * coords[j].abs().max(1.0);
        let mut plus = coords.clone();
        plus[j] += h;
        let mut minus = coords.clone();
        minus[j] -= h;
        let fp = invariants(&SceneConfig::from_flat(variant, n, &plus)?)?;
        let fm = invariants(&SceneConfig::from_flat(variant, n, &minus)?)?;
        for i in 0..rows {
            jac[(i, j)] = (fp.values[i] - fm.values[i]) / (2.0 * h);
        }
    }
    Ok(numerical_rank(&jac, 1e-8))
}
