//! Scalar abstractions.
//!
//! Channel structure (validation, the singularity detector, the adversary's
//! best response) only needs field arithmetic, so it is written against
//! [`Scalar`] and runs on exact rationals as well as floats. Anything that
//! takes a logarithm or a square root needs [`Real`].

use std::fmt::Debug;
use std::iter::Sum;
use std::ops::Neg;

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Field element usable as a channel coefficient.
pub trait Scalar: Num + Neg<Output = Self> + Copy + PartialOrd + Debug + Send + Sync + 'static {
    /// Comparisons made with [`Tolerance::Exact`](crate::Tolerance::Exact) are meaningful for this type.
    const EXACT: bool;

    fn magnitude(self) -> Self;

    fn is_finite_scalar(self) -> bool;

    /// Threshold below which a gain counts as zero during validation.
    fn default_zero_tol() -> Self;

    /// Relative tolerance used by the singularity detector.
    fn default_ratio_tol() -> Self;

    /// Lossy conversion for reporting.
    fn to_f64_lossy(self) -> f64;

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

macro_rules! impl_scalar_float {
    ($t:ty, $ratio_tol:expr) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn magnitude(self) -> Self {
                self.abs()
            }

            fn is_finite_scalar(self) -> bool {
                self.is_finite()
            }

            fn default_zero_tol() -> Self {
                1e-12
            }

            fn default_ratio_tol() -> Self {
                $ratio_tol
            }

            fn to_f64_lossy(self) -> f64 {
                self as f64
            }
        }
    };
}

impl_scalar_float!(f32, 1e-6);
impl_scalar_float!(f64, 1e-9);

macro_rules! impl_scalar_ratio {
    ($t:ty) => {
        impl Scalar for Ratio<$t> {
            const EXACT: bool = true;

            fn magnitude(self) -> Self {
                if self < Ratio::from_integer(0) {
                    -self
                } else {
                    self
                }
            }

            fn is_finite_scalar(self) -> bool {
                true
            }

            fn default_zero_tol() -> Self {
                Ratio::from_integer(0)
            }

            fn default_ratio_tol() -> Self {
                Ratio::from_integer(0)
            }

            fn to_f64_lossy(self) -> f64 {
                self.to_f64().unwrap_or(f64::NAN)
            }
        }
    };
}

impl_scalar_ratio!(i32);
impl_scalar_ratio!(i64);
impl_scalar_ratio!(i128);

/// Floating-point scalar used for rates, bounds and regressions.
pub trait Real: Scalar + Float + FromPrimitive + Sum {}

impl Real for f32 {}
impl Real for f64 {}

/// Literal conversion for generic numeric code.
#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in target float type")
}

/// `(1/2) log2(1 + x)`: capacity of a real AWGN channel at SNR `x`.
#[inline]
pub fn half_log2_1p<T: Real>(x: T) -> T {
    lit::<T>(0.5) * x.ln_1p() / lit::<T>(std::f64::consts::LN_2)
}
