//! Floating-point abstraction the library is generic over.

use num_traits::{Float, FromPrimitive, NumAssignOps};

/// Scalar type for all configurations, energies and expansions: f32 or f64.
///
/// Everything numerical in this crate is written against this trait; the
/// crate root exports concrete `f64` aliases for the common types. The
/// stated tolerances (1e-10 and tighter) are only meaningful for `f64`.
pub trait Real:
    Float + FromPrimitive + NumAssignOps + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
    /// Natural logarithm of the Gamma function.
    fn lgamma(self) -> Self {
        real(libm::lgamma(self.to_f64().expect("scalar convertible to f64")))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` constant into the working scalar type.
#[inline]
pub(crate) fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant representable in scalar type")
}

/// Converts a count into the working scalar type.
#[inline]
pub(crate) fn count<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}
