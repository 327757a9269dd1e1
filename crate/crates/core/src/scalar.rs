use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point types the numeric core can run on.
pub trait Scalar: Float + NumAssign + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static {
    /// Converts an `f64` constant, saturating to infinity when out of range.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(|| if v < 0.0 { Self::neg_infinity() } else { Self::infinity() })
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where T: Float + NumAssign + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static {}
