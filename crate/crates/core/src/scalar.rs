//! Scalar abstractions shared by the exact and float kernels.

use std::fmt::Debug;
use std::hash::Hash;

use num_traits::{Float, FloatConst, PrimInt, Signed};

/// Signed machine integer usable as a cyclotomic coefficient.
///
/// Arithmetic on coefficients is always checked; overflow surfaces as
/// [`crate::Error::Overflow`] instead of wrapping.
pub trait Coeff: PrimInt + Signed + Debug + Hash + Send + Sync + 'static {}

impl<T> Coeff for T where T: PrimInt + Signed + Debug + Hash + Send + Sync + 'static {}

/// Floating-point scalar for the advisory kernels.
pub trait Real: Float + FloatConst + Debug + Send + Sync + 'static {
    /// Relative magnitude below which a float sum is read as zero.
    fn zero_tolerance() -> Self;
}

impl Real for f64 {
    fn zero_tolerance() -> Self {
        1e-9
    }
}

impl Real for f32 {
    fn zero_tolerance() -> Self {
        1e-4
    }
}

/// `exp(2πi · num / den)` evaluated with the numerator reduced first.
pub fn root_of_unity<F: Real>(num: i64, den: u64) -> num_complex::Complex<F> {
    let r = num.rem_euclid(den as i64) as u64;
    let angle = F::TAU() * F::from(r).unwrap() / F::from(den).unwrap();
    num_complex::Complex::new(angle.cos(), angle.sin())
}
