//! Multi-view reconstruction: assemble the invariant equations over all
//! pictures, fix the gauge, and solve for object points and camera unknowns
//! with Levenberg–Marquardt.
//!
//! Each picture τ contributes the equations
//! `I(unknowns as seen from camera τ) = I(embedded picture τ)`: the
//! invariants of the unknown object–camera configuration must match the
//! invariants measured on the picture, because both lie on the same group
//! orbit. Stacking all pictures gives (2n−3)t / (2n+3)t / (2n−1)t
//! equations (Base / Oriented / Zoom).
//!
//! The residual symmetry (moving the whole 3D system rigidly — and for Base
//! rescaling it, since every Base invariant is scale-free) is removed by
//! pinning coordinates:
//!
//! - **Base** (7 scalars): 𝔓₀¹ = 0, 𝒪₁ = (1,0,0), 𝒪₂·ẑ = 0 with the 𝒪₂·ŷ ≥ 0
//!   branch; unknowns `[𝒪₂ˣʸ, 𝒪₃…𝒪ₙ, 𝔓₀²…𝔓₀ᵗ]` (3n + 3t − 7 of them).
//! - **Oriented** (6 scalars): 𝔓₀¹ = 0, P_L¹ = (a,0,0), P^L¹ = (b,c,0);
//!   unknowns `[a, b, c, 𝒪₁…𝒪ₙ, (𝔓₀, P_L, P^L)²…ᵗ]` (3n + 9t − 6). Scale is
//!   pinned by the marker-length invariants themselves.
//! - **Zoom** (6 scalars, experimental): 𝔓₀¹ = 0, P_M¹ = (m₁,0,0),
//!   𝒪₁·ẑ = 0 with 𝒪₁·ŷ ≥ 0; unknowns `[m₁, 𝒪₁ˣʸ, 𝒪₂…𝒪ₙ, (𝔓₀, P_M)²…ᵗ]`
//!   (3n + 6t − 6).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::frames::{normalize, ray_aligned_rotation};
use crate::geom::Vec3;
use crate::groups::{SceneConfig, Variant};
use crate::invariants::{invariants, InvariantVector};
use crate::synth::{embed_picture, CameraPose, FrameBounds, PictureTracks, Scene};

/// Damping multiplier applied when a step is rejected (and divisor when one
/// is accepted).
const DAMPING_FACTOR: f64 = 10.0;
/// Damping floor after successful steps.
const DAMPING_MIN: f64 = 1e-15;
/// Beyond this damping the solver gives up: every direction increases cost.
const DAMPING_OVERFLOW: f64 = 1e12;

/// Levenberg–Marquardt and reconstruction knobs. `Default` carries the
/// values used throughout the test suite.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub max_iterations: usize,
    pub initial_damping: f64,
    /// Stop when ‖Jᵀr‖_∞ falls below this.
    pub gradient_tol: f64,
    /// Stop when ‖δ‖ ≤ step_tol·(‖x‖ + step_tol).
    pub step_tol: f64,
    /// Relative finite-difference step: h = fd_step·max(1, |xⱼ|).
    pub fd_step: f64,
    /// Number of independent starts; best final cost wins, ties broken by
    /// lowest start index.
    pub multistart: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iterations: 200,
            initial_damping: 1e-3,
            gradient_tol: 1e-10,
            step_tol: 1e-12,
            fd_step: 1e-7,
            multistart: 1,
            seed: 0,
        }
    }
}

impl SolverOptions {
    fn validate(&self) {
        assert!(self.max_iterations >= 1, "need at least one iteration");
        assert!(
            self.initial_damping > 0.0
                && self.gradient_tol > 0.0
                && self.step_tol > 0.0
                && self.fd_step > 0.0,
            "all tolerances must be positive"
        );
        assert!(self.multistart >= 1, "need at least one start");
    }
}

/// Result of one Levenberg–Marquardt run.
#[derive(Debug, Clone)]
pub struct LmOutcome {
    pub x: Vec<f64>,
    /// Residual vector at `x`.
    pub residuals: Vec<f64>,
    /// 0.5·‖residuals‖².
    pub cost: f64,
    /// Completed outer iterations (accepted steps).
    pub iterations: usize,
    /// True when the gradient or step criterion fired before the iteration
    /// budget ran out.
    pub converged: bool,
    /// Cost after the initial evaluation and after every accepted step;
    /// strictly decreasing by construction.
    pub cost_trace: Vec<f64>,
}

/// Minimize 0.5·‖f(x)‖² by damped Gauss–Newton steps with finite-difference
/// Jacobians (forward differences, falling back to backward when the
/// forward probe is unevaluable).
///
/// A trial step whose residual errors or is non-finite is treated as a
/// rejected step (the damping grows and the step shrinks), so the solver
/// walks around evaluation domain boundaries instead of crashing into them.
///
/// Errors: the initial evaluation's error is propagated
/// ([`Error::NonFiniteResidual`] when it produces NaN/Inf);
/// [`Error::AllStepsRejected`] when damping overflows 1e12.
pub fn levenberg_marquardt<F>(f: F, x0: &[f64], opts: &SolverOptions) -> Result<LmOutcome, Error>
where
    F: Fn(&[f64]) -> Result<Vec<f64>, Error>,
{
    opts.validate();
    let finite = |r: &[f64]| r.iter().all(|v| v.is_finite());
    let cost_of = |r: &[f64]| 0.5 * r.iter().map(|v| v * v).sum::<f64>();

    let mut x = x0.to_vec();
    let mut r = f(&x)?;
    if !finite(&r) {
        return Err(Error::NonFiniteResidual);
    }
    let m = r.len();
    let dim = x.len();
    let mut cost = cost_of(&r);
    let mut mu = opts.initial_damping;
    let mut cost_trace = vec![cost];
    let mut iterations = 0usize;
    let mut converged = false;

    'outer: while iterations < opts.max_iterations {
        // Jacobian at the current iterate.
        let mut jac = nalgebra::DMatrix::<f64>::zeros(m, dim);
        for j in 0..dim {
            let h = opts.fd_step * x[j].abs().max(1.0);
            let mut probe = x.clone();
            probe[j] += h;
            let column: Vec<f64> = match f(&probe) {
                Ok(rp) if finite(&rp) => rp.iter().zip(&r).map(|(a, b)| (a - b) / h).collect(),
                _ => {
                    probe[j] = x[j] - h;
                    let rm = f(&probe)?;
                    if !finite(&rm) {
                        return Err(Error::NonFiniteResidual);
                    }
                    r.iter().zip(&rm).map(|(a, b)| (a - b) / h).collect()
                }
            };
            for i in 0..m {
                jac[(i, j)] = column[i];
            }
        }
        let r_vec = nalgebra::DVector::from_column_slice(&r);
        let grad = jac.tr_mul(&r_vec);
        if grad.amax() <= opts.gradient_tol {
            converged = true;
            break;
        }
        let jtj = jac.tr_mul(&jac);

        // Damping loop: shrink the trust region until a strict descent step
        // is found.
        loop {
            if mu > DAMPING_OVERFLOW {
                return Err(Error::AllStepsRejected { iterations });
            }
            let mut damped = jtj.clone();
            for k in 0..dim {
                damped[(k, k)] += mu * jtj[(k, k)].max(1e-12);
            }
            let delta = match nalgebra::Cholesky::new(damped) {
                Some(ch) => ch.solve(&(-&grad)),
                None => {
                    mu *= DAMPING_FACTOR;
                    continue;
                }
            };
            let x_trial: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, d)| a + d).collect();
            let accepted = match f(&x_trial) {
                Ok(rt) if finite(&rt) => {
                    let cost_trial = cost_of(&rt);
                    if cost_trial < cost {
                        Some((rt, cost_trial))
                    } else {
                        None
                    }
                }
                _ => None,
            };
            match accepted {
                Some((rt, cost_trial)) => {
                    let step_norm = delta.norm();
                    let x_norm = x_trial.iter().map(|v| v * v).sum::<f64>().sqrt();
                    x = x_trial;
                    r = rt;
                    cost = cost_trial;
                    cost_trace.push(cost);
                    iterations += 1;
                    mu = (mu / DAMPING_FACTOR).max(DAMPING_MIN);
                    if step_norm <= opts.step_tol * (x_norm + opts.step_tol) {
                        converged = true;
                        break 'outer;
                    }
                    break;
                }
                None => mu *= DAMPING_FACTOR,
            }
        }
    }

    Ok(LmOutcome {
        x,
        residuals: r,
        cost,
        iterations,
        converged,
        cost_trace,
    })
}

/// Whether (n, t) gives at least as many equations as free unknowns.
pub fn counting_condition_holds(variant: Variant, n: usize, t: usize) -> bool {
    match variant {
        // (2n−3)t ≥ 3n+3t−7 and (2n+3)t ≥ 3n+9t−6 both reduce to
        // t·(2n−6) ≥ 3n−6, which needs n > 3.
        Variant::Base | Variant::Oriented => n > 3 && t * (2 * n - 6) >= 3 * n - 6,
        // (2n−1)t ≥ 3n+6t−6 ⇔ t·(2n−7) ≥ 3n−6, which needs n ≥ 4.
        Variant::Zoom => n >= 4 && t * (2 * n - 7) >= 3 * n - 6,
    }
}

fn counting_requirement(variant: Variant) -> String {
    match variant {
        Variant::Base | Variant::Oriented => {
            "n > 3 and t ≥ (3n−6)/(2n−6)".to_string()
        }
        Variant::Zoom => "n ≥ 4 and t·(2n−7) ≥ 3n−6".to_string(),
    }
}

/// Number of free unknowns after gauge fixing.
pub fn unknown_len(variant: Variant, n: usize, t: usize) -> usize {
    match variant {
        Variant::Base => 3 * n + 3 * t - 7,
        Variant::Oriented => 3 * n + 9 * t - 6,
        Variant::Zoom => 3 * n + 6 * t - 6,
    }
}

/// The assembled multi-picture problem: per-picture target invariants plus
/// the gauge and layout conventions of this module.
#[derive(Debug, Clone)]
pub struct ReconstructionProblem {
    variant: Variant,
    n: usize,
    t: usize,
    targets: Vec<InvariantVector>,
}

impl ReconstructionProblem {
    /// Validates the counting condition and target consistency.
    pub fn new(
        variant: Variant,
        n: usize,
        t: usize,
        targets: Vec<InvariantVector>,
    ) -> Result<ReconstructionProblem, Error> {
        if !counting_condition_holds(variant, n, t) {
            return Err(Error::InsufficientData {
                n,
                t,
                requirement: counting_requirement(variant),
            });
        }
        if targets.len() != t {
            return Err(Error::LengthMismatch {
                expected: t,
                got: targets.len(),
            });
        }
        for target in &targets {
            if target.variant() != variant {
                return Err(Error::VariantMismatch {
                    expected: variant,
                    got: target.variant(),
                });
            }
            if target.n() != n {
                return Err(Error::LengthMismatch {
                    expected: variant.invariant_len(n),
                    got: target.len(),
                });
            }
        }
        Ok(ReconstructionProblem {
            variant,
            n,
            t,
            targets,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn targets(&self) -> &[InvariantVector] {
        &self.targets
    }

    /// Total residual length: t stacked invariant vectors.
    pub fn residual_len(&self) -> usize {
        self.t * self.variant.invariant_len(self.n)
    }

    pub fn unknown_len(&self) -> usize {
        unknown_len(self.variant, self.n, self.t)
    }
}

/// Compute per-picture target invariants by embedding each picture and
/// evaluating its invariant vector.
pub fn compute_targets(
    tracks: &PictureTracks,
    variant: Variant,
) -> Result<Vec<InvariantVector>, Error> {
    let mut targets = Vec::with_capacity(tracks.t());
    for (tau, picture) in tracks.pictures.iter().enumerate() {
        let embedded = embed_picture(variant, picture, &tracks.bounds)
            .and_then(|cfg| invariants(&cfg))
            .map_err(|e| {
                Error::DegenerateTargets(format!("picture {}: {e}", tau + 1))
            })?;
        targets.push(embedded);
    }
    Ok(targets)
}

/// Split the flat unknown vector into per-picture configurations following
/// the gauge layout in the module docs. The object points are shared across
/// pictures; camera center and auxiliary points vary per picture.
/// Construction failures (e.g. an iterate that drives a camera onto an
/// object point) are wrapped as [`Error::Evaluation`] with the failing
/// picture's 1-based index.
pub fn configs_from_unknowns(
    problem: &ReconstructionProblem,
    x: &[f64],
) -> Result<Vec<SceneConfig>, Error> {
    let (n, t) = (problem.n, problem.t);
    if x.len() != problem.unknown_len() {
        return Err(Error::LengthMismatch {
            expected: problem.unknown_len(),
            got: x.len(),
        });
    }
    let vec3_at = |k: usize| Vec3::new(x[k], x[k + 1], x[k + 2]);
    let at_picture = |tau: usize| {
        move |e: Error| Error::Evaluation {
            picture: tau + 1,
            source: Box::new(e),
        }
    };
    match problem.variant {
        Variant::Base => {
            let mut points = Vec::with_capacity(n);
            points.push(Vec3::new(1.0, 0.0, 0.0));
            points.push(Vec3::new(x[0], x[1], 0.0));
            for i in 0..n - 2 {
                points.push(vec3_at(2 + 3 * i));
            }
            let cam_base = 2 + 3 * (n - 2);
            let mut configs = Vec::with_capacity(t);
            configs
                .push(SceneConfig::new_base(Vec3::ZERO, points.clone()).map_err(at_picture(0))?);
            for tau in 1..t {
                let c = vec3_at(cam_base + 3 * (tau - 1));
                configs.push(SceneConfig::new_base(c, points.clone()).map_err(at_picture(tau))?);
            }
            Ok(configs)
        }
        Variant::Oriented => {
            let (a, b, c) = (x[0], x[1], x[2]);
            let mut points = Vec::with_capacity(n);
            for i in 0..n {
                points.push(vec3_at(3 + 3 * i));
            }
            let cam_base = 3 + 3 * n;
            let mut configs = Vec::with_capacity(t);
            configs.push(
                SceneConfig::new_oriented(
                    Vec3::ZERO,
                    Vec3::new(a, 0.0, 0.0),
                    Vec3::new(b, c, 0.0),
                    points.clone(),
                )
                .map_err(at_picture(0))?,
            );
            for tau in 1..t {
                let k = cam_base + 9 * (tau - 1);
                configs.push(
                    SceneConfig::new_oriented(
                        vec3_at(k),
                        vec3_at(k + 3),
                        vec3_at(k + 6),
                        points.clone(),
                    )
                    .map_err(at_picture(tau))?,
                );
            }
            Ok(configs)
        }
        Variant::Zoom => {
            let m1 = x[0];
            let mut points = Vec::with_capacity(n);
            points.push(Vec3::new(x[1], x[2], 0.0));
            for i in 0..n - 1 {
                points.push(vec3_at(3 + 3 * i));
            }
            let cam_base = 3 + 3 * (n - 1);
            let mut configs = Vec::with_capacity(t);
            configs.push(
                SceneConfig::new_zoom(Vec3::ZERO, Vec3::new(m1, 0.0, 0.0), points.clone())
                    .map_err(at_picture(0))?,
            );
            for tau in 1..t {
                let k = cam_base + 6 * (tau - 1);
                configs.push(
                    SceneConfig::new_zoom(vec3_at(k), vec3_at(k + 3), points.clone())
                        .map_err(at_picture(tau))?,
                );
            }
            Ok(configs)
        }
    }
}

/// Inverse of [`configs_from_unknowns`]: pack per-picture configurations
/// (sharing object points) into the flat unknown vector.
fn pack_unknowns(variant: Variant, configs: &[SceneConfig]) -> Vec<f64> {
    let n = configs[0].n();
    let t = configs.len();
    let mut x = Vec::with_capacity(unknown_len(variant, n, t));
    let push3 = |x: &mut Vec<f64>, v: Vec3| x.extend_from_slice(&v.to_array());
    match variant {
        Variant::Base => {
            x.push(configs[0].points[1].x);
            x.push(configs[0].points[1].y);
            for p in &configs[0].points[2..] {
                push3(&mut x, *p);
            }
            for cfg in &configs[1..t] {
                push3(&mut x, cfg.p0);
            }
        }
        Variant::Oriented => {
            x.push(configs[0].aux[0].x);
            x.push(configs[0].aux[1].x);
            x.push(configs[0].aux[1].y);
            for p in &configs[0].points {
                push3(&mut x, *p);
            }
            for cfg in &configs[1..t] {
                push3(&mut x, cfg.p0);
                push3(&mut x, cfg.aux[0]);
                push3(&mut x, cfg.aux[1]);
            }
        }
        Variant::Zoom => {
            x.push(configs[0].aux[0].x);
            x.push(configs[0].points[0].x);
            x.push(configs[0].points[0].y);
            for p in &configs[0].points[1..] {
                push3(&mut x, *p);
            }
            for cfg in &configs[1..t] {
                push3(&mut x, cfg.p0);
                push3(&mut x, cfg.aux[0]);
            }
        }
    }
    x
}

/// Evaluate the stacked residual vector at `x`: pictures outer, invariant
/// order inner, each entry `I(unknowns) − target`. Evaluation failures are
/// wrapped with the failing picture's index so the optimizer can treat them
/// as step rejections and the caller can report them.
pub fn assemble_residuals(
    problem: &ReconstructionProblem,
    x: &[f64],
) -> Result<Vec<f64>, Error> {
    let configs = configs_from_unknowns(problem, x)?;
    let mut residuals = Vec::with_capacity(problem.residual_len());
    for (tau, (cfg, target)) in configs.iter().zip(&problem.targets).enumerate() {
        let values = invariants(cfg).map_err(|e| Error::Evaluation {
            picture: tau + 1,
            source: Box::new(e),
        })?;
        residuals.extend(
            values
                .values
                .iter()
                .zip(&target.values)
                .map(|(a, b)| a - b),
        );
    }
    Ok(residuals)
}

/// Depth (in gauge units) at which object points start on their picture-1
/// rays.
const INITIAL_DEPTH: f64 = 2.0;
/// Magnitude of the seeded perturbation applied to the starting camera
/// centers of pictures 2…t.
const INITIAL_CAMERA_SPREAD: f64 = 0.1;

/// Build a deterministic starting point: object points on the picture-1
/// rays (after normalizing the embedded picture into gauge position) at
/// uniform depth 2, cameras 2…t near the gauge origin with a seeded
/// perturbation, auxiliary points at their picture-embedded offsets.
pub fn initialize(
    problem: &ReconstructionProblem,
    tracks: &PictureTracks,
    seed: u64,
) -> Result<Vec<f64>, Error> {
    let variant = problem.variant;
    let t = problem.t;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let perturb = |rng: &mut ChaCha8Rng| {
        Vec3::new(
            rng.gen_range(-INITIAL_CAMERA_SPREAD..INITIAL_CAMERA_SPREAD),
            rng.gen_range(-INITIAL_CAMERA_SPREAD..INITIAL_CAMERA_SPREAD),
            rng.gen_range(-INITIAL_CAMERA_SPREAD..INITIAL_CAMERA_SPREAD),
        )
    };
    let embedded1 = embed_picture(variant, &tracks.pictures[0], &tracks.bounds)?;
    let mut configs: Vec<SceneConfig> = Vec::with_capacity(t);
    match variant {
        Variant::Base | Variant::Oriented => {
            // Gauge position for picture 1 is exactly its frame
            // normalization; rays through the origin and the normalized
            // points carry the initial depth guesses.
            let (_, norm1) = normalize(&embedded1)?;
            let points: Vec<Vec3> = norm1.points.iter().map(|&p| p * INITIAL_DEPTH).collect();
            if variant == Variant::Base {
                let mut first = points.clone();
                first[0] = Vec3::new(1.0, 0.0, 0.0);
                // O₂ stays on its ray with the gauge's z = 0 already exact.
                configs.push(SceneConfig::new_base(Vec3::ZERO, first.clone())?);
                for _ in 1..t {
                    configs.push(SceneConfig::new_base(perturb(&mut rng), first.clone())?);
                }
            } else {
                let aux1 = norm1.aux.clone();
                configs.push(SceneConfig::new_oriented(
                    Vec3::ZERO,
                    aux1[0],
                    aux1[1],
                    points.clone(),
                )?);
                for tau in 1..t {
                    let c = perturb(&mut rng);
                    let f = tracks.pictures[tau].focal;
                    let b = &tracks.bounds;
                    configs.push(SceneConfig::new_oriented(
                        c,
                        c + Vec3::new(f, f * b.u_min, f * b.v_min),
                        c + Vec3::new(f, f * b.u_min, f * b.v_max),
                        points.clone(),
                    )?);
                }
            }
        }
        Variant::Zoom => {
            // Roll the embedded picture about the optical axis so the first
            // ray lies in the upper xy half-plane (the gauge position), then
            // push points to the initial depth.
            let p1 = embedded1.points[0];
            let theta = p1.z.atan2(p1.y);
            let roll = |p: Vec3| {
                Vec3::new(
                    p.x,
                    p.y * theta.cos() + p.z * theta.sin(),
                    -p.y * theta.sin() + p.z * theta.cos(),
                )
            };
            let f1 = tracks.pictures[0].focal;
            let points: Vec<Vec3> = embedded1
                .points
                .iter()
                .map(|&p| roll(p) * (INITIAL_DEPTH / f1))
                .collect();
            let mut first = points;
            first[0].z = 0.0;
            configs.push(SceneConfig::new_zoom(
                Vec3::ZERO,
                Vec3::new(f1, 0.0, 0.0),
                first.clone(),
            )?);
            for tau in 1..t {
                let c = perturb(&mut rng);
                let f = tracks.pictures[tau].focal;
                configs.push(SceneConfig::new_zoom(
                    c,
                    c + Vec3::new(f, 0.0, 0.0),
                    first.clone(),
                )?);
            }
        }
    }
    Ok(pack_unknowns(variant, &configs))
}

/// Camera-side unknowns recovered for one picture.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraSolution {
    pub center: Vec3,
    /// `[]` (Base), `[P_L, P^L]` (Oriented), `[P_M]` (Zoom).
    pub aux: Vec<Vec3>,
}

/// A reconstruction in gauge coordinates (picture-1 camera at the origin).
#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub variant: Variant,
    pub object_points: Vec<Vec3>,
    /// One entry per picture; the first camera sits at the gauge origin.
    pub cameras: Vec<CameraSolution>,
    /// √(mean of squared residual entries) at the returned solution.
    pub residual_rms: f64,
    pub per_equation_residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Final cost of each multistart run (NaN for starts that failed).
    pub start_costs: Vec<f64>,
}

/// Full pipeline: embed pictures, compute targets, fix the gauge,
/// initialize, and run (multistart) Levenberg–Marquardt.
///
/// Errors: [`Error::InsufficientData`] when the counting condition fails,
/// [`Error::DegenerateTargets`] when a picture's invariants cannot be
/// evaluated, and the best start's error when every start fails. A run
/// that merely exhausts its iteration budget is returned with
/// `converged = false`.
pub fn reconstruct(
    tracks: &PictureTracks,
    variant: Variant,
    opts: &SolverOptions,
) -> Result<ReconstructionResult, Error> {
    opts.validate();
    let (n, t) = (tracks.n(), tracks.t());
    if !counting_condition_holds(variant, n, t) {
        return Err(Error::InsufficientData {
            n,
            t,
            requirement: counting_requirement(variant),
        });
    }
    let targets = compute_targets(tracks, variant)?;
    let problem = ReconstructionProblem::new(variant, n, t, targets)?;
    let residual_fn = |x: &[f64]| assemble_residuals(&problem, x);

    let mut best: Option<(usize, LmOutcome)> = None;
    let mut start_costs = vec![f64::NAN; opts.multistart];
    let mut first_error: Option<Error> = None;
    for k in 0..opts.multistart {
        let run = initialize(&problem, tracks, opts.seed.wrapping_add(k as u64))
            .and_then(|x0| levenberg_marquardt(&residual_fn, &x0, opts));
        match run {
            Ok(outcome) => {
                start_costs[k] = outcome.cost;
                let better = match &best {
                    None => true,
                    Some((_, b)) => outcome.cost < b.cost,
                };
                if better {
                    best = Some((k, outcome));
                }
            }
            Err(e) => {
                if first_error.is_none() {
                    first_error = Some(e);
                }
            }
        }
    }
    let (_, outcome) = match best {
        Some(b) => b,
        None => return Err(first_error.expect("multistart ≥ 1")),
    };

    let configs = configs_from_unknowns(&problem, &outcome.x)?;
    let object_points = configs[0].points.clone();
    let cameras = configs
        .iter()
        .map(|cfg| CameraSolution {
            center: cfg.p0,
            aux: cfg.aux.clone(),
        })
        .collect();
    let residual_rms = (outcome.residuals.iter().map(|r| r * r).sum::<f64>()
        / outcome.residuals.len() as f64)
        .sqrt();
    Ok(ReconstructionResult {
        variant,
        object_points,
        cameras,
        residual_rms,
        per_equation_residuals: outcome.residuals,
        iterations: outcome.iterations,
        converged: outcome.converged,
        start_costs,
    })
}

/// Express the true scene and poses in this module's gauge coordinates and
/// pack them as an unknown vector — the oracle for residual-at-truth tests.
pub fn gauged_truth(
    variant: Variant,
    scene: &Scene,
    poses: &[CameraPose],
    bounds: &FrameBounds,
) -> Result<Vec<f64>, Error> {
    let configs: Vec<SceneConfig> = poses
        .iter()
        .map(|pose| crate::synth::true_config(variant, scene, pose, bounds))
        .collect::<Result<_, _>>()?;
    let c1 = configs[0].p0;
    let (ref1, ref2, scale) = match variant {
        Variant::Base => {
            let v1 = configs[0].points[0] - c1;
            (v1, configs[0].points[1] - c1, 1.0 / v1.norm())
        }
        Variant::Oriented => (configs[0].aux[0] - c1, configs[0].aux[1] - c1, 1.0),
        Variant::Zoom => (configs[0].aux[0] - c1, configs[0].points[0] - c1, 1.0),
    };
    let (r_g, _, _) = ray_aligned_rotation(ref1, ref2)?;
    let map = |p: Vec3| (r_g * (p - c1)) * scale;
    let mapped: Vec<SceneConfig> = configs
        .iter()
        .map(|cfg| {
            SceneConfig::from_flat(
                variant,
                cfg.n(),
                &cfg.coords_flat()
                    .chunks(3)
                    .flat_map(|c| map(Vec3::new(c[0], c[1], c[2])).to_array())
                    .collect::<Vec<f64>>(),
            )
        })
        .collect::<Result<_, _>>()?;
    Ok(pack_unknowns(variant, &mapped))
}
