//! Scalar traits the generic parts of the crate are written against.

use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed};

/// Exact commutative ring elements (integers, rationals).
pub trait Ring: Clone + Debug + PartialEq + Num {}
impl<T: Clone + Debug + PartialEq + Num> Ring for T {}

/// Ordered rings where the sign of an element is meaningful.
pub trait OrderedRing: Ring + PartialOrd + Signed {}
impl<T: Ring + PartialOrd + Signed> OrderedRing for T {}

/// Floating-point types used on the floating side of exponential sums and bounds.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Send + Sync {}
impl<T: Float + FloatConst + FromPrimitive + Debug + Send + Sync> Real for T {}
