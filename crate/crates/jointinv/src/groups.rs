//! The three transformation groups acting on object–camera configurations.
//!
//! A configuration is a camera center `P₀`, an ordered list of points
//! `P₁…Pₙ`, and per-variant auxiliary points:
//!
//! - **Base** — no auxiliary points. A group element is a rigid motion
//!   `(R, T)` plus one depth factor `λᵢ > −1` per point, acting by
//!   `P̄₀ = R·P₀ + T` and `P̄ᵢ = R(Pᵢ + λᵢ(Pᵢ − P₀)) + T`: each point slides
//!   along its ray through the camera center, which is exactly the ambiguity
//!   a single picture leaves.
//! - **Oriented** — two extra points `P_L, P^L` (camera-plane corner
//!   markers) that move rigidly, pinning the picture-plane orientation and
//!   overall scale.
//! - **Zoom** — one extra point `P_M` on the optical axis plus a focal
//!   factor `α > −1` with `P̄_M = R(P_M + α(P_M − P₀)) + T`. Changing focal
//!   length slides `P_M` along the axis and tilts every ray toward or away
//!   from it; the transverse component of each unit ray direction scales by
//!   `h(m̄)/h(m)` where `h(m) = 1 + m − m²`, `m = ‖P_M − P₀‖`,
//!   `m̄ = (1+α)m`, while norms are preserved up to the λ factors
//!   (`‖P̄ᵢ − P̄₀‖ = (1+λᵢ)·‖Pᵢ − P₀‖`). This transverse-scaling form is the
//!   unique completion of the zoom motion consistent with its invariant set;
//!   it composes exactly ((1+α) multiplicative) and fixes configurations at
//!   α = 0.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Error;
use crate::geom::{rotation_from_axis_angle, Mat3, Vec3};

/// Rotation matrices must satisfy `‖RᵀR − Id‖_∞ <` this and have positive
/// determinant wherever the crate validates them.
pub const ROTATION_TOL: f64 = 1e-12;

/// Relative threshold below which denominators / cross products are treated
/// as vanishing by the evaluators and frame solvers.
pub(crate) const DEGENERACY_REL_TOL: f64 = 1e-12;

/// Which of the three group actions (and configuration shapes) is in play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Base,
    Oriented,
    Zoom,
}

impl Variant {
    /// Number of auxiliary points carried by a configuration (0 / 2 / 1).
    pub fn aux_len(self) -> usize {
        match self {
            Variant::Base => 0,
            Variant::Oriented => 2,
            Variant::Zoom => 1,
        }
    }

    /// Whether group elements carry the focal factor α.
    pub fn has_alpha(self) -> bool {
        matches!(self, Variant::Zoom)
    }

    /// Group dimension for n points: 6 rigid + n depth factors (+1 for α).
    pub fn group_dim(self, n: usize) -> usize {
        6 + n + usize::from(self.has_alpha())
    }

    /// Length of the fundamental invariant vector for n points.
    pub fn invariant_len(self, n: usize) -> usize {
        match self {
            Variant::Base => 2 * n - 3,
            Variant::Oriented => 2 * n + 3,
            Variant::Zoom => 2 * n - 1,
        }
    }

    pub const ALL: [Variant; 3] = [Variant::Base, Variant::Oriented, Variant::Zoom];
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Base => "base",
            Variant::Oriented => "oriented",
            Variant::Zoom => "zoom",
        })
    }
}

impl FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "base" => Ok(Variant::Base),
            "oriented" => Ok(Variant::Oriented),
            "zoom" => Ok(Variant::Zoom),
            other => Err(format!(
                "unknown variant '{other}' (expected base, oriented, or zoom)"
            )),
        }
    }
}

/// One object–camera point configuration: the manifold point the groups act on.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneConfig {
    variant: Variant,
    /// Camera center P₀.
    pub p0: Vec3,
    /// Auxiliary points: `[]` (Base), `[P_L, P^L]` (Oriented), `[P_M]` (Zoom).
    pub aux: Vec<Vec3>,
    /// Object / ray points P₁…Pₙ.
    pub points: Vec<Vec3>,
}

impl SceneConfig {
    pub fn new_base(p0: Vec3, points: Vec<Vec3>) -> Result<SceneConfig, Error> {
        SceneConfig::validated(Variant::Base, p0, vec![], points)
    }

    /// `lower` / `upper` are the camera-plane corner markers P_L and P^L.
    pub fn new_oriented(
        p0: Vec3,
        lower: Vec3,
        upper: Vec3,
        points: Vec<Vec3>,
    ) -> Result<SceneConfig, Error> {
        SceneConfig::validated(Variant::Oriented, p0, vec![lower, upper], points)
    }

    /// `axis_point` is the optical-axis marker P_M.
    pub fn new_zoom(p0: Vec3, axis_point: Vec3, points: Vec<Vec3>) -> Result<SceneConfig, Error> {
        SceneConfig::validated(Variant::Zoom, p0, vec![axis_point], points)
    }

    fn validated(
        variant: Variant,
        p0: Vec3,
        aux: Vec<Vec3>,
        points: Vec<Vec3>,
    ) -> Result<SceneConfig, Error> {
        if points.is_empty() {
            return Err(Error::DegenerateConfiguration(
                "a configuration needs at least one point".into(),
            ));
        }
        if !p0.is_finite()
            || aux.iter().any(|v| !v.is_finite())
            || points.iter().any(|v| !v.is_finite())
        {
            return Err(Error::DegenerateConfiguration(
                "non-finite coordinate in configuration".into(),
            ));
        }
        for (k, &q) in aux.iter().chain(points.iter()).enumerate() {
            if (q - p0).norm() <= f64::MIN_POSITIVE {
                return Err(Error::DegenerateConfiguration(format!(
                    "configuration entry {k} coincides with the camera center"
                )));
            }
        }
        Ok(SceneConfig {
            variant,
            p0,
            aux,
            points,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Number of (non-auxiliary) points n.
    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// Dimension of the configuration manifold: 3·(1 + aux + n).
    pub fn manifold_dim(&self) -> usize {
        3 * (1 + self.aux.len() + self.points.len())
    }

    /// All coordinates as one flat vector `[P₀, aux…, P₁…Pₙ]`, the layout
    /// used by finite-difference Jacobians.
    pub fn coords_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.manifold_dim());
        out.extend_from_slice(&self.p0.to_array());
        for a in &self.aux {
            out.extend_from_slice(&a.to_array());
        }
        for p in &self.points {
            out.extend_from_slice(&p.to_array());
        }
        out
    }

    /// Rebuild a configuration from [`Self::coords_flat`] layout without
    /// re-validating distances (finite-difference probes may step through
    /// validation boundaries; evaluators guard their own denominators).
    pub fn from_flat(variant: Variant, n: usize, coords: &[f64]) -> Result<SceneConfig, Error> {
        let aux_len = variant.aux_len();
        let expected = 3 * (1 + aux_len + n);
        if coords.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: coords.len(),
            });
        }
        let at = |k: usize| Vec3::new(coords[3 * k], coords[3 * k + 1], coords[3 * k + 2]);
        Ok(SceneConfig {
            variant,
            p0: at(0),
            aux: (0..aux_len).map(|k| at(1 + k)).collect(),
            points: (0..n).map(|k| at(1 + aux_len + k)).collect(),
        })
    }

    /// Largest coordinate magnitude — the scale used for relative comparisons.
    pub fn max_abs(&self) -> f64 {
        let mut s = self.p0.max_abs();
        for v in self.aux.iter().chain(self.points.iter()) {
            s = s.max(v.max_abs());
        }
        s
    }

    /// Entrywise max-abs difference against another configuration.
    pub fn max_abs_diff(&self, other: &SceneConfig) -> Result<f64, Error> {
        if self.variant != other.variant {
            return Err(Error::VariantMismatch {
                expected: self.variant,
                got: other.variant,
            });
        }
        if self.n() != other.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: other.n(),
            });
        }
        let mut d = (self.p0 - other.p0).max_abs();
        for (a, b) in self.aux.iter().zip(&other.aux) {
            d = d.max((*a - *b).max_abs());
        }
        for (a, b) in self.points.iter().zip(&other.points) {
            d = d.max((*a - *b).max_abs());
        }
        Ok(d)
    }
}

/// One group element: rigid motion, per-point depth factors, and (Zoom) the
/// focal factor α.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub rotation: Mat3,
    pub translation: Vec3,
    /// One λᵢ per configuration point, each > −1.
    pub lambdas: Vec<f64>,
    /// Focal factor α > −1; `Some` exactly for Zoom elements.
    pub alpha: Option<f64>,
}

impl GroupElement {
    /// Validates the rotation ([`ROTATION_TOL`]) and the λ/α > −1 bounds.
    pub fn new(
        rotation: Mat3,
        translation: Vec3,
        lambdas: Vec<f64>,
        alpha: Option<f64>,
    ) -> Result<GroupElement, Error> {
        if !rotation.is_rotation(ROTATION_TOL) {
            return Err(Error::DegenerateConfiguration(
                "rotation part is not a valid rotation matrix".into(),
            ));
        }
        if !translation.is_finite() {
            return Err(Error::DegenerateConfiguration(
                "non-finite translation part".into(),
            ));
        }
        for &l in lambdas.iter().chain(alpha.iter()) {
            if !(l.is_finite() && l > -1.0) {
                return Err(Error::InvalidLambda(l));
            }
        }
        Ok(GroupElement {
            rotation,
            translation,
            lambdas,
            alpha,
        })
    }

    /// The identity element for a given variant and point count.
    pub fn identity(variant: Variant, n: usize) -> GroupElement {
        GroupElement {
            rotation: Mat3::IDENTITY,
            translation: Vec3::ZERO,
            lambdas: vec![0.0; n],
            alpha: variant.has_alpha().then_some(0.0),
        }
    }

    /// `self ∘ first`: the element acting as `first` followed by `self`.
    /// Rigid parts compose as usual; depth factors along a fixed ray compose
    /// as `(1+λ') (1+λ) − 1`, and α likewise.
    pub fn compose(&self, first: &GroupElement) -> Result<GroupElement, Error> {
        if self.lambdas.len() != first.lambdas.len() {
            return Err(Error::LengthMismatch {
                expected: self.lambdas.len(),
                got: first.lambdas.len(),
            });
        }
        if self.alpha.is_some() != first.alpha.is_some() {
            return Err(Error::VariantMismatch {
                expected: if self.alpha.is_some() {
                    Variant::Zoom
                } else {
                    Variant::Base
                },
                got: if first.alpha.is_some() {
                    Variant::Zoom
                } else {
                    Variant::Base
                },
            });
        }
        let lambdas = self
            .lambdas
            .iter()
            .zip(&first.lambdas)
            .map(|(l2, l1)| (1.0 + l2) * (1.0 + l1) - 1.0)
            .collect();
        let alpha = match (self.alpha, first.alpha) {
            (Some(a2), Some(a1)) => Some((1.0 + a2) * (1.0 + a1) - 1.0),
            _ => None,
        };
        Ok(GroupElement {
            rotation: self.rotation * first.rotation,
            translation: self.rotation * first.translation + self.translation,
            lambdas,
            alpha,
        })
    }

    /// Group inverse: `(Rᵀ, −RᵀT, λ ↦ −λ/(1+λ), α ↦ −α/(1+α))`.
    pub fn inverse(&self) -> GroupElement {
        let rt = self.rotation.transpose();
        GroupElement {
            rotation: rt,
            translation: -(rt * self.translation),
            lambdas: self.lambdas.iter().map(|l| -l / (1.0 + l)).collect(),
            alpha: self.alpha.map(|a| -a / (1.0 + a)),
        }
    }

    /// Entrywise max-abs difference over rotation, translation, λ, and α slots.
    pub fn max_abs_diff(&self, other: &GroupElement) -> f64 {
        let mut d = (self.rotation - other.rotation).max_abs();
        d = d.max((self.translation - other.translation).max_abs());
        for (a, b) in self.lambdas.iter().zip(&other.lambdas) {
            d = d.max((a - b).abs());
        }
        if let (Some(a), Some(b)) = (self.alpha, other.alpha) {
            d = d.max((a - b).abs());
        }
        d
    }
}

/// The zoom denominators' scalar factor `h(m) = 1 + m − m²`.
pub(crate) fn focal_factor(m: f64) -> f64 {
    1.0 + m - m * m
}

/// Apply a group element to a configuration.
///
/// Errors: [`Error::LengthMismatch`] when λ count ≠ n;
/// [`Error::VariantMismatch`] when the α slot disagrees with the variant;
/// [`Error::InvalidLambda`] for λ or α ≤ −1;
/// [`Error::RayOrthogonalToAxis`] (Zoom) when a ray is at 90° from the
/// optical axis; [`Error::SingularFocalFactor`] (Zoom) at the golden-ratio
/// singularity of `h(m)`.
pub fn apply(g: &GroupElement, cfg: &SceneConfig) -> Result<SceneConfig, Error> {
    if g.lambdas.len() != cfg.n() {
        return Err(Error::LengthMismatch {
            expected: cfg.n(),
            got: g.lambdas.len(),
        });
    }
    if g.alpha.is_some() != cfg.variant.has_alpha() {
        return Err(Error::VariantMismatch {
            expected: cfg.variant,
            got: if g.alpha.is_some() {
                Variant::Zoom
            } else {
                Variant::Base
            },
        });
    }
    for &l in g.lambdas.iter().chain(g.alpha.iter()) {
        if !(l.is_finite() && l > -1.0) {
            return Err(Error::InvalidLambda(l));
        }
    }
    let rigid = |p: Vec3| g.rotation * p + g.translation;
    let p0_new = rigid(cfg.p0);

    match cfg.variant {
        Variant::Base | Variant::Oriented => {
            // Auxiliary points (Oriented) move rigidly; ray points also
            // stretch along their rays by 1 + λᵢ.
            let aux = cfg.aux.iter().map(|&a| rigid(a)).collect();
            let points = cfg
                .points
                .iter()
                .zip(&g.lambdas)
                .map(|(&p, &l)| rigid(p + (p - cfg.p0) * l))
                .collect();
            Ok(SceneConfig {
                variant: cfg.variant,
                p0: p0_new,
                aux,
                points,
            })
        }
        Variant::Zoom => {
            let alpha = g.alpha.expect("checked above");
            let u = cfg.aux[0] - cfg.p0;
            let m = u.norm();
            let m_new = (1.0 + alpha) * m;
            let h = focal_factor(m);
            let h_new = focal_factor(m_new);
            if h.abs() < 1e-12 || h_new.abs() < 1e-12 {
                let (mm, hh) = if h.abs() < 1e-12 { (m, h) } else { (m_new, h_new) };
                return Err(Error::SingularFocalFactor { m: mm, h: hh });
            }
            // Transverse parts of the unit ray directions scale by ρ; the
            // axial dot product vᵢ·u is preserved exactly by this form.
            let rho = h_new / h;
            let pm_new = rigid(cfg.aux[0] + (cfg.aux[0] - cfg.p0) * alpha);
            let mut points = Vec::with_capacity(cfg.n());
            for (i, (&p, &l)) in cfg.points.iter().zip(&g.lambdas).enumerate() {
                let v = p - cfg.p0;
                let c = v.dot(u);
                if c.abs() <= DEGENERACY_REL_TOL * v.norm() * m {
                    return Err(Error::RayOrthogonalToAxis { index: i + 1 });
                }
                let dir = (v * rho + u * ((1.0 - rho) * c / (m * m))).try_normalized()?;
                points.push(p0_new + g.rotation * dir * ((1.0 + l) * v.norm()));
            }
            Ok(SceneConfig {
                variant: Variant::Zoom,
                p0: p0_new,
                aux: vec![pm_new],
                points,
            })
        }
    }
}

/// Draw a random group element, deterministic per seed.
///
/// The rotation is uniform on SO(3) when `magnitude ≥ 1`, otherwise a
/// uniform-axis rotation with angle uniform in (0, magnitude]. Translation
/// components are uniform in [−magnitude, magnitude]; λᵢ (and α for Zoom)
/// are uniform in (−0.9, magnitude], bounded away from the singular −1.
///
/// Panics when `magnitude` is not a positive finite number (caller bug).
pub fn random_element(variant: Variant, n: usize, seed: u64, magnitude: f64) -> GroupElement {
    assert!(
        magnitude.is_finite() && magnitude > 0.0,
        "magnitude must be positive and finite, got {magnitude}"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_element_with(&mut rng, variant, n, magnitude)
}

/// Same as [`random_element`], drawing from a caller-supplied RNG.
pub fn random_element_with<R: Rng>(
    rng: &mut R,
    variant: Variant,
    n: usize,
    magnitude: f64,
) -> GroupElement {
    let rotation = if magnitude >= 1.0 {
        random_rotation(rng)
    } else {
        let axis = random_unit_vector(rng);
        let angle = rng.gen_range(0.0..=magnitude);
        rotation_from_axis_angle(axis, angle).expect("unit axis")
    };
    let translation = Vec3::new(
        rng.gen_range(-magnitude..=magnitude),
        rng.gen_range(-magnitude..=magnitude),
        rng.gen_range(-magnitude..=magnitude),
    );
    let lambdas = (0..n).map(|_| rng.gen_range(-0.9..=magnitude)).collect();
    let alpha = variant
        .has_alpha()
        .then(|| rng.gen_range(-0.9..=magnitude));
    GroupElement {
        rotation,
        translation,
        lambdas,
        alpha,
    }
}

/// Uniform rotation on SO(3) via a normalized Gaussian quaternion.
pub fn random_rotation<R: Rng>(rng: &mut R) -> Mat3 {
    loop {
        let q: [f64; 4] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let nq = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
        if nq < 1e-6 {
            continue;
        }
        let (w, x, y, z) = (q[0] / nq, q[1] / nq, q[2] / nq, q[3] / nq);
        return Mat3::new([
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - w * z),
                2.0 * (x * z + w * y),
            ],
            [
                2.0 * (x * y + w * z),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - w * x),
            ],
            [
                2.0 * (x * z - w * y),
                2.0 * (y * z + w * x),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ]);
    }
}

/// Uniform direction on the unit sphere.
pub fn random_unit_vector<R: Rng>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        if v.norm() > 1e-6 {
            return v.try_normalized().expect("norm checked");
        }
    }
}

/// Numerical orbit dimension at `cfg`: the rank of the matrix whose columns
/// are finite-difference directions of [`apply`] at the identity, one per
/// group parameter (3 rotations, 3 translations, n depth factors, α for
/// Zoom). Singular values below `1e−8·σ_max` count as zero.
pub fn orbit_dimension(cfg: &SceneConfig) -> Result<usize, Error> {
    const EPS: f64 = 1e-5;
    let n = cfg.n();
    let variant = cfg.variant;
    let dim = variant.group_dim(n);
    let rows = cfg.manifold_dim();

    let element = |param: usize, step: f64| -> Result<GroupElement, Error> {
        let mut g = GroupElement::identity(variant, n);
        match param {
            0..=2 => {
                let mut axis = Vec3::ZERO;
                match param {
                    0 => axis.x = 1.0,
                    1 => axis.y = 1.0,
                    _ => axis.z = 1.0,
                }
                g.rotation = rotation_from_axis_angle(axis, step)?;
            }
            3 => g.translation.x = step,
            4 => g.translation.y = step,
            5 => g.translation.z = step,
            p if p < 6 + n => g.lambdas[p - 6] = step,
            _ => g.alpha = Some(step),
        }
        Ok(g)
    };

    let mut gen = nalgebra::DMatrix::<f64>::zeros(rows, dim);
    for j in 0..dim {
        let plus = apply(&element(j, EPS)?, cfg)?.coords_flat();
        let minus = apply(&element(j, -EPS)?, cfg)?.coords_flat();
        for (i, (p, q)) in plus.iter().zip(&minus).enumerate() {
            gen[(i, j)] = (p - q) / (2.0 * EPS);
        }
    }
    Ok(numerical_rank(&gen, 1e-8))
}

/// Rank with singular values below `rel_tol·σ_max` treated as zero.
pub(crate) fn numerical_rank(m: &nalgebra::DMatrix<f64>, rel_tol: f64) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}
