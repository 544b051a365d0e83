//! Synthetic scenes, camera trajectories, pinhole projection, picture
//! embedding, and measurement noise — the oracle side of the test suite.
//!
//! The key construction is the *picture embedding*: placing the camera
//! center at the origin and each image point at its focal-plane position
//! `(𝓕, 𝓕u, 𝓕v)` turns a 2D picture into a 3D configuration that lies on
//! the same group orbit as the true object–camera system. Invariants of the
//! embedded picture therefore equal invariants of the true configuration,
//! which is what makes multi-view equations solvable from images alone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use crate::error::Error;
use crate::geom::{rotation_from_axis_angle, Mat3, Vec3};
use crate::groups::{random_unit_vector, SceneConfig, Variant};

/// A pinhole camera: world-to-camera rotation with the optical axis along
/// +x of the camera frame, and the image plane at distance `focal`.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraPose {
    pub center: Vec3,
    pub rotation: Mat3,
    pub focal: f64,
}

impl CameraPose {
    pub fn new(center: Vec3, rotation: Mat3, focal: f64) -> Result<CameraPose, Error> {
        if !rotation.is_rotation(crate::groups::ROTATION_TOL) {
            return Err(Error::DegenerateConfiguration(
                "camera rotation is not a valid rotation matrix".into(),
            ));
        }
        if !(focal.is_finite() && focal > 0.0) {
            return Err(Error::DegenerateConfiguration(format!(
                "camera focal length must be positive, got {focal}"
            )));
        }
        if !center.is_finite() {
            return Err(Error::DegenerateConfiguration(
                "non-finite camera center".into(),
            ));
        }
        Ok(CameraPose {
            center,
            rotation,
            focal,
        })
    }

    /// Camera at `center` aimed at `target`.
    pub fn looking_at(center: Vec3, target: Vec3, focal: f64) -> Result<CameraPose, Error> {
        let rotation = look_at_rotation(target - center)?;
        CameraPose::new(center, rotation, focal)
    }
}

/// World-to-camera rotation whose +x axis points along `direction`, keeping
/// the image "up" (camera −v) aligned with world +z where possible (falls
/// back to +y for near-vertical directions).
pub fn look_at_rotation(direction: Vec3) -> Result<Mat3, Error> {
    let e1 = direction.try_normalized().map_err(|_| {
        Error::DegenerateConfiguration("camera aimed at its own center".into())
    })?;
    let up = Vec3::new(0.0, 0.0, 1.0);
    let mut e2 = up.cross(e1);
    if e2.norm() < 1e-6 {
        e2 = Vec3::new(0.0, 1.0, 0.0).cross(e1);
    }
    let e2 = e2.try_normalized()?;
    let e3 = e1.cross(e2);
    Ok(Mat3::from_rows(e1, e2, e3))
}

/// A 3D object: n ordered points with stable ids 1…n.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    points: Vec<Vec3>,
    diameter: f64,
}

impl Scene {
    pub fn new(points: Vec<Vec3>) -> Result<Scene, Error> {
        if points.is_empty() {
            return Err(Error::DegenerateConfiguration(
                "a scene needs at least one point".into(),
            ));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::DegenerateConfiguration(
                "non-finite scene point".into(),
            ));
        }
        let mut diameter = 0.0f64;
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                let d = (points[i] - points[j]).norm();
                if d <= f64::MIN_POSITIVE {
                    return Err(Error::DegenerateConfiguration(format!(
                        "scene points {} and {} coincide",
                        i + 1,
                        j + 1
                    )));
                }
                diameter = diameter.max(d);
            }
        }
        Ok(Scene { points, diameter })
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// Maximum pairwise distance (0 for a single point).
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn centroid(&self) -> Vec3 {
        let mut c = Vec3::ZERO;
        for &p in &self.points {
            c = c + p;
        }
        c / self.points.len() as f64
    }
}

/// Draw n points i.i.d. uniform in the cube [−spread, spread]³,
/// resampling (up to 100 tries, then jittering) to keep every pairwise
/// distance above 0.01·spread. Deterministic per seed.
pub fn generate_scene(n: usize, seed: u64, spread: f64) -> Scene {
    assert!(n >= 1, "scene needs at least one point");
    assert!(
        spread.is_finite() && spread > 0.0,
        "spread must be positive, got {spread}"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let min_dist = 0.01 * spread;
    let mut points: Vec<Vec3> = Vec::with_capacity(n);
    while points.len() < n {
        let mut candidate = Vec3::ZERO;
        let mut ok = false;
        for _ in 0..100 {
            candidate = Vec3::new(
                rng.gen_range(-spread..spread),
                rng.gen_range(-spread..spread),
                rng.gen_range(-spread..spread),
            );
            if points.iter().all(|p| (*p - candidate).norm() > min_dist) {
                ok = true;
                break;
            }
        }
        if !ok {
            // Crowded draw: nudge the last candidate clear instead of
            // looping forever.
            candidate = candidate + random_unit_vector(&mut rng) * (1.1 * min_dist);
        }
        points.push(candidate);
    }
    Scene::new(points).expect("rejection sampling keeps points distinct")
}

/// Camera path shapes for [`generate_trajectory`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrajectoryKind {
    /// Centers on a circle of `radius` about the look-at point, spanning
    /// `arc` radians (2π = full circle), with a seeded start angle and a
    /// small seeded elevation per pose; every camera aims at the look-at
    /// point.
    Orbit { radius: f64, arc: f64 },
    /// Fixed rotation (aimed from `start`), centers on the line
    /// `start + τ·step`.
    Translation { start: Vec3, step: Vec3 },
    /// All centers identical; each pose is the aiming rotation composed
    /// with a random rotation of angle ≤ `max_angle` about a random axis.
    PureRotation { center: Vec3, max_angle: f64 },
}

/// Generate t camera poses of the given kind, all with focal length
/// `focal`, aimed at `look_at`. Deterministic per seed.
pub fn generate_trajectory(
    t: usize,
    kind: &TrajectoryKind,
    look_at: Vec3,
    focal: f64,
    seed: u64,
) -> Result<Vec<CameraPose>, Error> {
    assert!(t >= 1, "trajectory needs at least one pose");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut poses = Vec::with_capacity(t);
    match *kind {
        TrajectoryKind::Orbit { radius, arc } => {
            let theta0 = rng.gen_range(0.0..std::f64::consts::TAU);
            let dtheta = if t > 1 { arc / (t - 1) as f64 } else { 0.0 };
            for tau in 0..t {
                let theta = theta0 + tau as f64 * dtheta;
                let phi: f64 = rng.gen_range(-0.25..0.25);
                let offset = Vec3::new(
                    phi.cos() * theta.cos(),
                    phi.cos() * theta.sin(),
                    phi.sin(),
                ) * radius;
                poses.push(CameraPose::looking_at(look_at + offset, look_at, focal)?);
            }
        }
        TrajectoryKind::Translation { start, step } => {
            let rotation = look_at_rotation(look_at - start)?;
            for tau in 0..t {
                poses.push(CameraPose::new(
                    start + step * tau as f64,
                    rotation,
                    focal,
                )?);
            }
        }
        TrajectoryKind::PureRotation { center, max_angle } => {
            let aim = look_at_rotation(look_at - center)?;
            for _ in 0..t {
                let axis = random_unit_vector(&mut rng);
                let angle = rng.gen_range(0.0..=max_angle);
                let spin = rotation_from_axis_angle(axis, angle)?;
                poses.push(CameraPose::new(center, spin * aim, focal)?);
            }
        }
    }
    Ok(poses)
}

/// One tracked image point in calibrated units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImagePoint {
    pub id: u32,
    pub u: f64,
    pub v: f64,
}

/// One picture: its focal length and the tracked points.
#[derive(Debug, Clone, PartialEq)]
pub struct Picture {
    pub focal: f64,
    pub points: Vec<ImagePoint>,
}

/// Declared image-frame bounds, used to place the Oriented corner markers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameBounds {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl Default for FrameBounds {
    fn default() -> Self {
        FrameBounds {
            u_min: -0.5,
            u_max: 0.5,
            v_min: -0.5,
            v_max: 0.5,
        }
    }
}

/// Point tracks over t pictures with full visibility: every picture lists
/// the same ids in the same order.
#[derive(Debug, Clone, PartialEq)]
pub struct PictureTracks {
    pub bounds: FrameBounds,
    pub pictures: Vec<Picture>,
}

impl PictureTracks {
    pub fn new(bounds: FrameBounds, pictures: Vec<Picture>) -> Result<PictureTracks, Error> {
        if pictures.is_empty() || pictures[0].points.is_empty() {
            return Err(Error::DegenerateConfiguration(
                "tracks need at least one picture with at least one point".into(),
            ));
        }
        let reference: Vec<u32> = pictures[0].points.iter().map(|p| p.id).collect();
        for (tau, pic) in pictures.iter().enumerate() {
            if !(pic.focal.is_finite() && pic.focal > 0.0) {
                return Err(Error::DegenerateConfiguration(format!(
                    "picture {} has non-positive focal length {}",
                    tau + 1,
                    pic.focal
                )));
            }
            if pic.points.len() != reference.len() {
                return Err(Error::LengthMismatch {
                    expected: reference.len(),
                    got: pic.points.len(),
                });
            }
            for (k, p) in pic.points.iter().enumerate() {
                if p.id != reference[k] {
                    return Err(Error::DegenerateConfiguration(format!(
                        "picture {} tracks id {} at position {} where picture 1 has id {}",
                        tau + 1,
                        p.id,
                        k + 1,
                        reference[k]
                    )));
                }
                if !(p.u.is_finite() && p.v.is_finite()) {
                    return Err(Error::DegenerateConfiguration(format!(
                        "picture {} id {} has non-finite coordinates",
                        tau + 1,
                        p.id
                    )));
                }
            }
        }
        Ok(PictureTracks { bounds, pictures })
    }

    /// Number of pictures t.
    pub fn t(&self) -> usize {
        self.pictures.len()
    }

    /// Number of tracked points n.
    pub fn n(&self) -> usize {
        self.pictures[0].points.len()
    }

    pub fn ids(&self) -> Vec<u32> {
        self.pictures[0].points.iter().map(|p| p.id).collect()
    }
}

/// Project the scene through a pose: camera-frame q = R·(𝒪ᵢ − center),
/// image coordinates (u, v) = (q_y/q_x, q_z/q_x). Calibrated units — the
/// focal length enters at embedding time, not here.
pub fn project(scene: &Scene, pose: &CameraPose) -> Result<Vec<ImagePoint>, Error> {
    let mut out = Vec::with_capacity(scene.n());
    for (i, &p) in scene.points().iter().enumerate() {
        let id = (i + 1) as u32;
        let q = pose.rotation * (p - pose.center);
        if q.x <= 1e-9 {
            return Err(Error::PointBehindCamera { id, q_x: q.x });
        }
        out.push(ImagePoint {
            id,
            u: q.y / q.x,
            v: q.z / q.x,
        });
    }
    Ok(out)
}

/// Project the scene through every pose into a full track set.
pub fn render_tracks(
    scene: &Scene,
    poses: &[CameraPose],
    bounds: FrameBounds,
) -> Result<PictureTracks, Error> {
    let mut pictures = Vec::with_capacity(poses.len());
    for pose in poses {
        pictures.push(Picture {
            focal: pose.focal,
            points: project(scene, pose)?,
        });
    }
    PictureTracks::new(bounds, pictures)
}

/// Embed a picture as a 3D configuration: camera center at the origin,
/// image points at (𝓕, 𝓕u, 𝓕v) on the focal plane. The Oriented corner
/// markers sit at the declared frame corners (u_min, v_min) and
/// (u_min, v_max); the Zoom axis marker at (𝓕, 0, 0).
///
/// The embedded configuration lies on the same group orbit as the true
/// object–camera system that produced the picture.
pub fn embed_picture(
    variant: Variant,
    picture: &Picture,
    bounds: &FrameBounds,
) -> Result<SceneConfig, Error> {
    let f = picture.focal;
    if !(f.is_finite() && f > 0.0) {
        return Err(Error::DegenerateConfiguration(format!(
            "picture focal length must be positive, got {f}"
        )));
    }
    let points: Vec<Vec3> = picture
        .points
        .iter()
        .map(|p| Vec3::new(f, f * p.u, f * p.v))
        .collect();
    match variant {
        Variant::Base => SceneConfig::new_base(Vec3::ZERO, points),
        Variant::Oriented => SceneConfig::new_oriented(
            Vec3::ZERO,
            Vec3::new(f, f * bounds.u_min, f * bounds.v_min),
            Vec3::new(f, f * bounds.u_min, f * bounds.v_max),
            points,
        ),
        Variant::Zoom => SceneConfig::new_zoom(Vec3::ZERO, Vec3::new(f, 0.0, 0.0), points),
    }
}

/// The true object–camera configuration seen by `pose`, with the auxiliary
/// points physically attached to the camera: Oriented corners and the Zoom
/// axis marker at their world positions center + Rᵀ·(focal-plane offset).
/// Its invariants equal those of the corresponding embedded picture.
pub fn true_config(
    variant: Variant,
    scene: &Scene,
    pose: &CameraPose,
    bounds: &FrameBounds,
) -> Result<SceneConfig, Error> {
    let rt = pose.rotation.transpose();
    let f = pose.focal;
    let world = |q: Vec3| pose.center + rt * q;
    match variant {
        Variant::Base => SceneConfig::new_base(pose.center, scene.points().to_vec()),
        Variant::Oriented => SceneConfig::new_oriented(
            pose.center,
            world(Vec3::new(f, f * bounds.u_min, f * bounds.v_min)),
            world(Vec3::new(f, f * bounds.u_min, f * bounds.v_max)),
            scene.points().to_vec(),
        ),
        Variant::Zoom => SceneConfig::new_zoom(
            pose.center,
            world(Vec3::new(f, 0.0, 0.0)),
            scene.points().to_vec(),
        ),
    }
}

/// Add i.i.d. Gaussian noise of standard deviation `sigma` to every image
/// coordinate. Deterministic per seed; `sigma = 0` returns the picture
/// unchanged.
pub fn add_noise(picture: &Picture, sigma: f64, seed: u64) -> Picture {
    assert!(sigma >= 0.0, "noise level must be non-negative, got {sigma}");
    if sigma == 0.0 {
        return picture.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("sigma checked");
    Picture {
        focal: picture.focal,
        points: picture
            .points
            .iter()
            .map(|p| ImagePoint {
                id: p.id,
                u: p.u + rng.sample(normal),
                v: p.v + rng.sample(normal),
            })
            .collect(),
    }
}

/// Noisy copy of a whole track set (per-picture seeds derived from `seed`).
pub fn noisy_tracks(tracks: &PictureTracks, sigma: f64, seed: u64) -> PictureTracks {
    PictureTracks {
        bounds: tracks.bounds,
        pictures: tracks
            .pictures
            .iter()
            .enumerate()
            .map(|(tau, pic)| add_noise(pic, sigma, seed.wrapping_add(tau as u64)))
            .collect(),
    }
}
