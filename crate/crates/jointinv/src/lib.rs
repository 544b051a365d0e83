//! Joint-invariant structure from motion.
//!
//! This crate recovers 3D object points and camera centers from multi-view
//! point tracks by a route that never forms an explicit camera matrix:
//! each picture, embedded into 3D at its focal distance, lies on the same
//! orbit of a custom transformation group as the true object/camera
//! configuration, so the values of the group's joint invariants evaluated
//! on the picture equal their values on the unknown 3D configuration.
//! Collecting those equalities over all pictures yields a nonlinear system
//! whose solution is the reconstruction.
//!
//! The crate is organized bottom-up:
//!
//! - [`geom`] — 3-vector / 3×3-matrix arithmetic and similarity alignment;
//! - [`groups`] — the three group actions (`Base`, `Oriented`, `Zoom`) on
//!   object–camera point configurations;
//! - [`frames`] — closed-form moving-frame solutions (the group element
//!   carrying a configuration onto a fixed cross-section);
//! - [`invariants`] — the fundamental invariant sets of each variant;
//! - [`rotation_test`] — a two-view pure-rotation classifier built on the
//!   invariance of the Base set under camera rotation;
//! - [`synth`] — synthetic scenes, trajectories, projections, embeddings,
//!   and noise (the oracle used throughout the tests);
//! - [`solver`] — gauge fixing, residual assembly, and a dense
//!   Levenberg–Marquardt optimizer with multistart;
//! - [`io`] — file formats (tracks, scenes, reports, a three-view SVG
//!   drawing) and the CLI command implementations.

pub mod error;
pub mod frames;
pub mod geom;
pub mod groups;
pub mod invariants;
pub mod io;
pub mod solver;
pub mod synth;

pub use error::Error;
