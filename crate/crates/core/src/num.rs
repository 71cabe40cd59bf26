//! Scalar abstractions.
//!
//! The transshipment solver and the per-scenario model only need ordered
//! field arithmetic, so they are written against [`Scalar`] and run unchanged
//! on `f32`, `f64` and exact rationals. Monte Carlo estimation and the
//! evolutionary engine additionally need square roots and random draws, which
//! [`Real`] provides for the two IEEE float types.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Ordered field element usable by the LP solver and the scenario model.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Threshold below which a reduced cost is treated as zero during pivoting.
    fn pivot_tolerance() -> Self;

    /// Absolute slack allowed when checking constraint satisfaction.
    fn feasibility_tolerance() -> Self;

    /// Lossy conversion from `f64`; panics only on non-finite input.
    fn from_f64_lossy(value: f64) -> Self {
        Self::from_f64(value).expect("finite f64 converts to every Scalar")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn is_finite_value(&self) -> bool {
        true
    }

    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if a <= b {
            a
        } else {
            b
        }
    }
}

impl Scalar for f64 {
    fn pivot_tolerance() -> Self {
        1e-12
    }
    fn feasibility_tolerance() -> Self {
        1e-9
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for f32 {
    fn pivot_tolerance() -> Self {
        1e-5
    }
    fn feasibility_tolerance() -> Self {
        1e-3
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for BigRational {
    fn pivot_tolerance() -> Self {
        Ratio::from_integer(BigInt::from(0))
    }
    fn feasibility_tolerance() -> Self {
        Ratio::from_integer(BigInt::from(0))
    }
}

impl Scalar for Ratio<i64> {
    fn pivot_tolerance() -> Self {
        Ratio::from_integer(0)
    }
    fn feasibility_tolerance() -> Self {
        Ratio::from_integer(0)
    }
}

/// Floating-point scalar with sampling support.
pub trait Real: Scalar + Float {
    fn sample_standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn sample_standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardNormal.sample(rng)
            }

            fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rng.random::<$t>()
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Neumaier-compensated sum of a sequence of floats.
pub fn compensated_sum<T: Real, I: IntoIterator<Item = T>>(values: I) -> T {
    let mut sum = T::zero();
    let mut carry = T::zero();
    for v in values {
        let t = sum + v;
        if Float::abs(sum) >= Float::abs(v) {
            carry = carry + ((sum - t) + v);
        } else {
            carry = carry + ((v - t) + sum);
        }
        sum = t;
    }
    sum + carry
}
