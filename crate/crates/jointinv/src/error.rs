//! Crate-wide error type and the process exit-code contract.

use thiserror::Error;

use crate::groups::Variant;

/// All failure modes of the library, one enum so the CLI can map every
/// error to its exit code in a single place.
#[derive(Debug, Error)]
pub enum Error {
    /// Geometrically unusable input: coincident points, collinear point
    /// sets where a plane is needed, and similar.
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    /// A depth factor λᵢ (or the zoom factor α) at or below −1, which
    /// would collapse a point onto (or through) the camera center.
    #[error("invalid depth factor {0}: lambda and alpha must stay > -1")]
    InvalidLambda(f64),

    /// Zoom action: a ray at 90° from the optical axis, where the zoom
    /// transformation of the ray direction is undefined.
    #[error("ray {index} is orthogonal to the optical axis: (P_i - P_0) . (P_M - P_0) vanishes")]
    RayOrthogonalToAxis { index: usize },

    /// The moving-frame normalization equations cannot be solved for this
    /// configuration (it lies off the chart of the chosen cross-section).
    #[error("cross-section degeneracy: {0}")]
    DegenerateCrossSection(String),

    /// A dot-product denominator of an invariant vanishes; `index` is the
    /// 1-based point whose I/J entries are undefined (0 for the I₀/J₀ pair).
    #[error("orthogonal rays: the dot-product denominator of I{index}/J{index} vanishes")]
    OrthogonalRays { index: usize },

    /// The two reference rays of the invariant set are parallel, so the
    /// cross product normalizing the whole set vanishes.
    #[error("collinear base rays: the reference cross product of the invariant set vanishes")]
    CollinearBaseRays,

    /// Zoom: the scalar factor 1 + m − m² in every denominator vanishes
    /// (m = ‖P_M − P₀‖ at the golden ratio).
    #[error("singular focal factor: 1 + m - m^2 = {h:.3e} at m = {m} (golden-ratio singularity)")]
    SingularFocalFactor { m: f64, h: f64 },

    /// Two values that must share a variant do not.
    #[error("variant mismatch: expected {expected}, got {got}")]
    VariantMismatch { expected: Variant, got: Variant },

    /// Two values that must share a length do not.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// An invariant evaluation failed while assembling residuals for one
    /// picture; the optimizer treats this as a rejected step.
    #[error("picture {picture}: {source}")]
    Evaluation {
        picture: usize,
        #[source]
        source: Box<Error>,
    },

    /// Levenberg–Marquardt damping grew past 1e12 without an acceptable step.
    #[error("all steps rejected: damping exceeded 1e12 after {iterations} iterations")]
    AllStepsRejected { iterations: usize },

    /// The residual function produced NaN/Inf where a finite value was required.
    #[error("non-finite residual encountered during optimization")]
    NonFiniteResidual,

    /// The invariant equations cannot determine the unknowns for this (n, t).
    #[error("insufficient data: n = {n}, t = {t}; {requirement}")]
    InsufficientData {
        n: usize,
        t: usize,
        requirement: String,
    },

    /// Target invariants could not be evaluated on an input picture.
    #[error("degenerate invariant targets: {0}")]
    DegenerateTargets(String),

    /// Projection of a point with non-positive camera-frame axial coordinate.
    #[error("point {id} is behind the camera: axial coordinate {q_x:.3e} <= 1e-9")]
    PointBehindCamera { id: u32, q_x: f64 },

    /// A file failed to parse; `line` is 1-based (0 when not line-specific).
    #[error("{path}:{line}: {message}")]
    Format {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for this error under the CLI contract:
    /// 2 = argument/format errors, 3 = degenerate geometry,
    /// 4 = optimization did not produce a usable step, 5 = insufficient data.
    /// (Exit 0 = success / pure rotation, 1 = distinct viewpoints — not errors.)
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Format { .. }
            | Error::Io(_)
            | Error::LengthMismatch { .. }
            | Error::VariantMismatch { .. } => 2,
            Error::DegenerateConfiguration(_)
            | Error::InvalidLambda(_)
            | Error::RayOrthogonalToAxis { .. }
            | Error::DegenerateCrossSection(_)
            | Error::OrthogonalRays { .. }
            | Error::CollinearBaseRays
            | Error::SingularFocalFactor { .. }
            | Error::DegenerateTargets(_)
            | Error::PointBehindCamera { .. } => 3,
            Error::Evaluation { source, .. } => source.exit_code(),
            Error::AllStepsRejected { .. } | Error::NonFiniteResidual => 4,
            Error::InsufficientData { .. } => 5,
        }
    }
}
