//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All solvers are written against [`Scalar`] so they run on `f32` or `f64`.
//! The experiment harnesses and the CLI use `f64` throughout.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point type usable by the transport solvers.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal, panicking only on impossible conversions.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal not representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize not representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Tolerance for "sums to one" checks on `len` accumulated terms.
    ///
    /// For `f64` this is `1e-12` at the sizes this crate targets; narrower
    /// types get a bound scaled from their machine epsilon.
    fn mass_tolerance(len: usize) -> Self {
        let floor = Self::lit(1e-12);
        let scaled = Self::epsilon() * Self::from_usize_lossy(len.max(1)) * Self::lit(4.0);
        floor.max(scaled)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `‖v‖_p^p` for `p ≥ 1`, with the `p = 1` and `p = 2` cases kept exact.
pub fn pnorm_pow<T: Scalar>(v: impl IntoIterator<Item = T>, p: T) -> T {
    if p == T::one() {
        v.into_iter().map(|x| x.abs()).sum()
    } else if p == T::lit(2.0) {
        v.into_iter().map(|x| x * x).sum()
    } else {
        v.into_iter().map(|x| x.abs().powf(p)).sum()
    }
}

/// `‖v‖_p`.
pub fn pnorm<T: Scalar>(v: impl IntoIterator<Item = T>, p: T) -> T {
    let s = pnorm_pow(v, p);
    if p == T::one() {
        s
    } else if p == T::lit(2.0) {
        s.sqrt()
    } else {
        s.powf(p.recip())
    }
}
