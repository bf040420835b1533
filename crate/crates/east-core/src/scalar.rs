use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::AddAssign;

use num_traits::{Float, FromPrimitive};

/// Floating point scalar for the model vocabulary. Blanket implemented for
/// every type with the required numeric behaviour, in particular `f32` and
/// `f64`; the solver modules instantiate `f64` throughout.
pub trait Scalar: Float + FromPrimitive + AddAssign + Sum + Debug + Display + 'static {}

impl<T> Scalar for T where T: Float + FromPrimitive + AddAssign + Sum + Debug + Display + 'static {}
