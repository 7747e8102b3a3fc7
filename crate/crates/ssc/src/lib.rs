//! Strongly separately continuous (SSC) functions on σ-products of
//! finite-dimensional normed spaces.
//!
//! A σ-product `σ(a)` is the set of points of a countable product that differ
//! from the base point `a` in only finitely many coordinates. This crate
//! builds real-valued SSC functions on σ-products with a prescribed
//! discontinuity point set, and numerically probes the continuity criteria
//! that characterize those sets:
//!
//! * [`space`] — sparse points, splices, σ-components, product metrics;
//! * [`topology`] — 𝒮-openness probing, projective symmetry, coordinated
//!   limits;
//! * [`construct`] — the explicit ball-product constructions and the
//!   function algebra;
//! * [`analysis`] — oscillation estimation, SSC / separate-continuity
//!   checks, the finite-coordinate continuity criterion, nearly-open trace
//!   checks, and brute-force grid oracles;
//! * [`scene`] — JSON scene files, task runner, CSV reports and slices.
//!
//! Everything is deterministic given explicit seeds; sampling loops run on
//! rayon when the `parallel` feature (default) is enabled and fall back to
//! sequential iteration otherwise.

pub mod analysis;
pub mod construct;
pub mod error;
pub mod par;
pub mod sample;
pub mod scene;
pub mod space;
pub mod topology;

pub use error::{Error, Result};
