//! Command-line interface: synthesize test data, print invariants, classify
//! camera motion, reconstruct, and score reconstructions.
//!
//! Exit codes: 0 success (and "pure rotation" verdict), 1 "not a pure
//! rotation" verdict, 2 argument/format errors, 3 degenerate geometry,
//! 4 optimization did not converge, 5 insufficient data.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use jointinv::error::Error;
use jointinv::geom::{align_similarity, Vec3};
use jointinv::groups::Variant;
use jointinv::invariants::invariant_labels;
use jointinv::io::{
    fmt_float, read_scene, read_tracks, write_report, write_scene, write_three_view_svg,
    write_tracks, Report,
};
use jointinv::rotation_test::{detect_pure_rotation, DEFAULT_NOISELESS_TOL};
use jointinv::solver::{compute_targets, reconstruct, SolverOptions};
use jointinv::synth::{
    embed_picture, generate_scene, generate_trajectory, noisy_tracks, render_tracks,
    FrameBounds, TrajectoryKind,
};

#[derive(Parser)]
#[command(
    name = "jointinv",
    version,
    about = "Joint invariants of object-camera point systems: synthetic data, invariant evaluation, motion classification, and 3D reconstruction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Base,
    Oriented,
    Zoom,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Base => Variant::Base,
            VariantArg::Oriented => Variant::Oriented,
            VariantArg::Zoom => Variant::Zoom,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    /// Cameras on an arc around the scene, all aimed at its centroid.
    Orbit,
    /// Cameras translated sideways with a fixed orientation.
    Translation,
    /// All cameras at one center with different orientations.
    PureRotation,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random scene and its projected point tracks.
    Synth {
        /// Number of object points.
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Number of pictures.
        #[arg(long, default_value_t = 4)]
        t: usize,
        /// Camera trajectory kind.
        #[arg(long, value_enum, default_value_t = KindArg::Orbit)]
        kind: KindArg,
        /// Standard deviation of Gaussian noise added to image coordinates.
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Variant recorded in the tracks header.
        #[arg(long, value_enum, default_value_t = VariantArg::Base)]
        variant: VariantArg,
        /// Focal length shared by all pictures.
        #[arg(long, default_value_t = 1.0)]
        focal: f64,
        /// Comma-separated per-picture focal lengths (overrides --focal).
        #[arg(long)]
        focals: Option<String>,
        /// Camera distance from the scene centroid.
        #[arg(long, default_value_t = 2.5)]
        radius: f64,
        /// Orbit arc in radians.
        #[arg(long, default_value_t = 0.9)]
        arc: f64,
        /// Scene half-extent.
        #[arg(long, default_value_t = 1.0)]
        spread: f64,
        /// Output path prefix.
        #[arg(long, default_value = "out")]
        out: String,
    },
    /// Evaluate per-picture invariant vectors from a tracks file.
    Invariants {
        tracks: PathBuf,
        /// Variant to evaluate (default: the tracks header's variant).
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
        #[arg(long, default_value = "out")]
        out: String,
    },
    /// Decide whether two pictures differ by a pure camera rotation.
    DetectRotation {
        tracks: PathBuf,
        /// 1-based index of the first picture.
        tau_a: usize,
        /// 1-based index of the second picture.
        tau_b: usize,
        /// Maximum invariant deviation accepted as a pure rotation.
        #[arg(long, default_value_t = DEFAULT_NOISELESS_TOL)]
        tol: f64,
    },
    /// Reconstruct object points and camera unknowns from tracks.
    Reconstruct {
        tracks: PathBuf,
        /// Variant to reconstruct with (default: the tracks header's variant).
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
        #[arg(long, default_value_t = 1)]
        multistart: usize,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: String,
    },
    /// Similarity-align a reconstructed point cloud to a ground-truth scene.
    Evaluate {
        reconstruction: PathBuf,
        truth: PathBuf,
    },
}

/// Print a line to stdout, ignoring broken pipes so verdict exit codes
/// survive `| head`-style pipelines.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<u8, Error> {
    match command {
        Command::Synth {
            n,
            t,
            kind,
            sigma,
            seed,
            variant,
            focal,
            focals,
            radius,
            arc,
            spread,
            out,
        } => cmd_synth(
            n, t, kind, sigma, seed, variant.into(), focal, focals, radius, arc, spread, &out,
        ),
        Command::Invariants {
            tracks,
            variant,
            out,
        } => cmd_invariants(&tracks, variant.map(Variant::from), &out),
        Command::DetectRotation {
            tracks,
            tau_a,
            tau_b,
            tol,
        } => cmd_detect_rotation(&tracks, tau_a, tau_b, tol),
        Command::Reconstruct {
            tracks,
            variant,
            multistart,
            max_iter,
            seed,
            out,
        } => cmd_reconstruct(
            &tracks,
            variant.map(Variant::from),
            multistart,
            max_iter,
            seed,
            &out,
        ),
        Command::Evaluate {
            reconstruction,
            truth,
        } => cmd_evaluate(&reconstruction, &truth),
    }
}

fn arg_error(flag: &str, message: String) -> Error {
    Error::Format {
        path: flag.to_string(),
        line: 0,
        message,
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_synth(
    n: usize,
    t: usize,
    kind: KindArg,
    sigma: f64,
    seed: u64,
    variant: Variant,
    focal: f64,
    focals: Option<String>,
    radius: f64,
    arc: f64,
    spread: f64,
    out: &str,
) -> Result<u8, Error> {
    if n == 0 || t == 0 {
        return Err(arg_error("--n/--t", "n and t must be positive".into()));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(arg_error("--sigma", format!("sigma must be >= 0, got {sigma}")));
    }
    if !(focal > 0.0 && focal.is_finite()) {
        return Err(arg_error("--focal", format!("focal must be positive, got {focal}")));
    }
    if !(radius > 0.0 && spread > 0.0 && arc >= 0.0) {
        return Err(arg_error(
            "--radius/--arc/--spread",
            "radius and spread must be positive, arc non-negative".into(),
        ));
    }
    let scene = generate_scene(n, seed, spread);
    let look_at = scene.centroid();
    let kind = match kind {
        KindArg::Orbit => TrajectoryKind::Orbit { radius, arc },
        KindArg::Translation => TrajectoryKind::Translation {
            start: look_at + Vec3::new(-radius, 0.0, 0.0),
            step: Vec3::new(0.0, 0.15 * radius, 0.0),
        },
        KindArg::PureRotation => TrajectoryKind::PureRotation {
            center: look_at + Vec3::new(-radius, 0.0, 0.0),
            max_angle: 0.2,
        },
    };
    let mut poses = generate_trajectory(t, &kind, look_at, focal, seed.wrapping_add(1))?;
    if let Some(list) = focals {
        let parsed: Result<Vec<f64>, _> = list.split(',').map(|s| s.trim().parse::<f64>()).collect();
        let parsed =
            parsed.map_err(|e| arg_error("--focals", format!("unparseable focal: {e}")))?;
        if parsed.len() != t {
            return Err(arg_error(
                "--focals",
                format!("{} focal values for t={t}", parsed.len()),
            ));
        }
        if parsed.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
            return Err(arg_error("--focals", "focals must be positive".into()));
        }
        for (pose, f) in poses.iter_mut().zip(parsed) {
            pose.focal = f;
        }
    }
    let clean = render_tracks(&scene, &poses, FrameBounds::default())?;
    let tracks = if sigma > 0.0 {
        noisy_tracks(&clean, sigma, seed.wrapping_add(2))
    } else {
        clean
    };
    let scene_rows: Vec<(u32, Vec3)> = scene
        .points()
        .iter()
        .enumerate()
        .map(|(i, &p)| ((i + 1) as u32, p))
        .collect();
    let scene_path = PathBuf::from(format!("{out}-scene.csv"));
    let tracks_path = PathBuf::from(format!("{out}-tracks.csv"));
    write_scene(&scene_path, &scene_rows)?;
    write_tracks(&tracks_path, &tracks, variant)?;
    say!("wrote {} and {}", scene_path.display(), tracks_path.display());
    Ok(0)
}

fn cmd_invariants(
    tracks_path: &Path,
    variant: Option<Variant>,
    out: &str,
) -> Result<u8, Error> {
    let (tracks, file_variant) = read_tracks(tracks_path)?;
    let variant = variant.unwrap_or(file_variant);
    let targets = compute_targets(&tracks, variant)?;
    let labels = invariant_labels(variant, tracks.n());
    let mut report = Report::new();
    report.push_str("variant", &variant.to_string());
    report.push_int("n", tracks.n());
    report.push_int("t", tracks.t());
    report.push_int("values_per_picture", labels.len());
    let mut rows = Vec::new();
    for (tau, target) in targets.iter().enumerate() {
        for (label, value) in labels.iter().zip(&target.values) {
            rows.push(vec![(tau + 1).to_string(), label.clone(), fmt_float(*value)]);
        }
    }
    report.push_table("invariants", &["picture", "entry", "value"], rows);
    let path = PathBuf::from(format!("{out}-invariants.csv"));
    write_report(&path, &report)?;
    say!(
        "wrote {} ({} invariant values per picture)",
        path.display(),
        labels.len()
    );
    Ok(0)
}

fn cmd_detect_rotation(
    tracks_path: &Path,
    tau_a: usize,
    tau_b: usize,
    tol: f64,
) -> Result<u8, Error> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(arg_error("--tol", format!("tolerance must be positive, got {tol}")));
    }
    let (tracks, _) = read_tracks(tracks_path)?;
    let t = tracks.t();
    for (name, tau) in [("tau_a", tau_a), ("tau_b", tau_b)] {
        if tau < 1 || tau > t {
            return Err(arg_error(
                name,
                format!("picture index {tau} outside [1, {t}]"),
            ));
        }
    }
    let view_of = |tau: usize| -> Result<_, Error> {
        let embedded = embed_picture(Variant::Base, &tracks.pictures[tau - 1], &tracks.bounds)?;
        jointinv::invariants::invariants(&embedded)
    };
    let verdict = detect_pure_rotation(&view_of(tau_a)?, &view_of(tau_b)?, tol)?;
    let labels = invariant_labels(Variant::Base, tracks.n());
    say!(
        "pictures {tau_a} and {tau_b}: {}",
        if verdict.is_pure_rotation {
            "pure rotation"
        } else {
            "not a pure rotation"
        }
    );
    say!("max invariant deviation: {}", fmt_float(verdict.max_abs_deviation));
    say!("tolerance: {}", fmt_float(tol));
    for (label, dev) in labels.iter().zip(&verdict.per_invariant_deviations) {
        say!("  {label}: {}", fmt_float(*dev));
    }
    Ok(if verdict.is_pure_rotation { 0 } else { 1 })
}

fn cmd_reconstruct(
    tracks_path: &Path,
    variant: Option<Variant>,
    multistart: usize,
    max_iter: usize,
    seed: u64,
    out: &str,
) -> Result<u8, Error> {
    if multistart == 0 || max_iter == 0 {
        return Err(arg_error(
            "--multistart/--max-iter",
            "multistart and max-iter must be positive".into(),
        ));
    }
    let (tracks, file_variant) = read_tracks(tracks_path)?;
    let variant = variant.unwrap_or(file_variant);
    let opts = SolverOptions {
        max_iterations: max_iter,
        multistart,
        seed,
        ..SolverOptions::default()
    };
    let result = reconstruct(&tracks, variant, &opts)?;

    let mut report = Report::new();
    report.push_str("variant", &variant.to_string());
    report.push_int("n", tracks.n());
    report.push_int("t", tracks.t());
    report.push_str("converged", if result.converged { "true" } else { "false" });
    report.push_int("iterations", result.iterations);
    report.push_float("residual_rms", result.residual_rms)?;
    report.push_table(
        "start_costs",
        &["start", "final_cost"],
        result
            .start_costs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                vec![
                    k.to_string(),
                    if c.is_finite() { fmt_float(*c) } else { "failed".to_string() },
                ]
            })
            .collect(),
    );
    report.push_table(
        "cameras",
        &["picture", "cx", "cy", "cz"],
        result
            .cameras
            .iter()
            .enumerate()
            .map(|(tau, cam)| {
                vec![
                    (tau + 1).to_string(),
                    fmt_float(cam.center.x),
                    fmt_float(cam.center.y),
                    fmt_float(cam.center.z),
                ]
            })
            .collect(),
    );
    if variant != Variant::Base {
        let mut rows = Vec::new();
        for (tau, cam) in result.cameras.iter().enumerate() {
            for (k, aux) in cam.aux.iter().enumerate() {
                rows.push(vec![
                    (tau + 1).to_string(),
                    (k + 1).to_string(),
                    fmt_float(aux.x),
                    fmt_float(aux.y),
                    fmt_float(aux.z),
                ]);
            }
        }
        report.push_table("camera_markers", &["picture", "marker", "x", "y", "z"], rows);
    }
    let labels = invariant_labels(variant, tracks.n());
    report.push_table(
        "residuals",
        &["picture", "entry", "residual"],
        result
            .per_equation_residuals
            .iter()
            .enumerate()
            .map(|(i, r)| {
                vec![
                    (i / labels.len() + 1).to_string(),
                    labels[i % labels.len()].clone(),
                    fmt_float(*r),
                ]
            })
            .collect(),
    );

    let report_path = PathBuf::from(format!("{out}-report.csv"));
    let points_path = PathBuf::from(format!("{out}-points.csv"));
    let svg_path = PathBuf::from(format!("{out}-views.svg"));
    write_report(&report_path, &report)?;
    let point_rows: Vec<(u32, Vec3)> = result
        .object_points
        .iter()
        .enumerate()
        .map(|(i, &p)| ((i + 1) as u32, p))
        .collect();
    write_scene(&points_path, &point_rows)?;
    let centers: Vec<Vec3> = result.cameras.iter().map(|c| c.center).collect();
    write_three_view_svg(&svg_path, &result.object_points, &centers)?;
    say!(
        "wrote {}, {}, {}",
        report_path.display(),
        points_path.display(),
        svg_path.display()
    );
    say!(
        "converged: {}; iterations: {}; residual rms: {}",
        result.converged,
        result.iterations,
        fmt_float(result.residual_rms)
    );
    Ok(if result.converged { 0 } else { 4 })
}

fn cmd_evaluate(reconstruction_path: &Path, truth_path: &Path) -> Result<u8, Error> {
    let recon = read_scene(reconstruction_path)?;
    let truth = read_scene(truth_path)?;
    if recon.len() != truth.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            got: recon.len(),
        });
    }
    let mut source = Vec::with_capacity(recon.len());
    let mut target = Vec::with_capacity(recon.len());
    for (id, p) in &recon {
        let q = truth
            .iter()
            .find(|(tid, _)| tid == id)
            .map(|(_, q)| *q)
            .ok_or_else(|| {
                arg_error(
                    &truth_path.display().to_string(),
                    format!("id {id} from the reconstruction is missing"),
                )
            })?;
        source.push(*p);
        target.push(q);
    }
    let (_, rms) = align_similarity(&source, &target)?;
    let truth_scene = jointinv::synth::Scene::new(target.clone())?;
    let diameter = truth_scene.diameter();
    say!("points: {}", source.len());
    say!("aligned rms: {}", fmt_float(rms));
    say!("scene diameter: {}", fmt_float(diameter));
    say!("relative error: {}", fmt_float(rms / diameter));
    Ok(0)
}
