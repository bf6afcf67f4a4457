//! Effective density of values of inhomogeneous isotropic ternary quadratic
//! forms at integer points.
//!
//! For the standard form `Q(α, β, γ) = β² − 4αγ` and an irrational shift `ξ`,
//! the crate manufactures integer vectors `v` with `|Q(v + ξ) − t| ≤ δ` and
//! `‖v‖ ≤ T` by following the unipotent orbit `ξ·M_m` on the torus, and
//! provides the supporting toolkit: certified fixed-point reals, continued
//! fractions and Diophantine estimates, orbit counting, quadratic Weyl sums
//! and the bounds they satisfy, plus a brute-force oracle for cross-checks.
//!
//! Exact algebra (forms, isometries) is generic over the scalar ring and the
//! floating side of the exponential sums is generic over the float type; the
//! aliases below fix the usual choices.

pub mod circle;
pub mod diophantine;
pub mod error;
pub mod fixed;
pub mod forms;
pub mod harness;
pub mod isometries;
pub mod literal;
pub mod matrix;
pub mod report;
pub mod scalar;
pub mod solver;
pub mod weyl_sums;

pub use diophantine::{Convergent, DiophantineEstimate, DirectionChoice};
pub use error::{Error, Result};
pub use fixed::FixedReal;
pub use forms::{RationalForm, ShiftVector, TernaryForm};
pub use solver::{OracleResult, Solution, SolveReport, TargetLift};
pub use weyl_sums::{TorusPoint2, WeylSumResult};

/// Exact `SL₂(ℤ)` elements.
pub type SL2Matrix = isometries::Sl2<num_bigint::BigInt>;
/// Exact integer isometries of the standard form.
pub type SOQMatrix = isometries::SoqMatrix<num_bigint::BigInt>;
/// Weyl sums evaluated in double precision.
pub type WeylSum = weyl_sums::WeylSumResult<f64>;
