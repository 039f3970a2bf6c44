//! Random walks of the modular group `PSL(2, ℤ)` on the upper half plane and
//! its boundary, with exact rational arithmetic.
//!
//! The boundary walk `X_n` has a unique stationary law whose survival function
//! on `(0, ∞)` is `χ_{1/2}`, built from Minkowski's question-mark function.
//! This crate provides the walks, the question-mark function and its inverse
//! in exact dyadic arithmetic, the Cayley graph of the generators, and the
//! statistics used to check the stationary laws by simulation.

pub mod cfrac;
pub mod chains;
pub mod error;
pub mod minkowski;
mod numeric;
pub mod psl2z;
pub mod stats;
pub mod tiling;

pub use cfrac::{ContinuedFraction, ExtendedRational};
pub use chains::{
    BoundaryTrajectory, BoundaryValue, IntervalMapIndex, Mode, PlaneTrajectory, PlaneValue,
    SignPair, StationaryBatch, WalkConfig,
};
pub use error::{Error, Result};
pub use minkowski::{chi_half, lambda_survival, qmark, qmark_inverse, DyadicRational};
pub use psl2z::{FloatPoint, GeneratorIndex, ProjectiveMatrix, UpperHalfPoint};
