//! Floating-point scalar abstraction for the vector-space scoring code.

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// A floating-point type usable for term weights, embeddings and cosines.
///
/// Implemented for `f32` and `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Default + Debug + Send + Sync + 'static
{
    /// Parses a decimal literal, as found in embedding tables.
    fn parse_decimal(text: &str) -> Option<Self>;
}

impl Scalar for f32 {
    fn parse_decimal(text: &str) -> Option<Self> {
        text.parse().ok().filter(|v: &f32| v.is_finite())
    }
}

impl Scalar for f64 {
    fn parse_decimal(text: &str) -> Option<Self> {
        text.parse().ok().filter(|v: &f64| v.is_finite())
    }
}

/// Maps a similarity in `[-1, 1]` onto the integer 0-100 scale.
///
/// Negative similarities clamp to 0; halves round up.
pub fn percent_round_half_up<F: Scalar>(similarity: F) -> u8 {
    let hundred = F::from_u8(100).unwrap();
    let half = F::from_f64(0.5).unwrap();
    let scaled = (similarity.max(F::zero()) * hundred + half).floor();
    scaled.min(hundred).to_u8().unwrap_or(0)
}
