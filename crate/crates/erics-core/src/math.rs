//! Scalar math routines shared across the crate.
//!
//! With the `std` feature the intrinsics from `std` are used; without it
//! everything routes through `libm` so the crate stays `no_std`-clean.

/// ln(2 * pi)
pub const LN_2PI: f64 = 1.837_877_066_409_345_3;

#[cfg(feature = "std")]
#[inline]
pub fn ln(x: f64) -> f64 {
    x.ln()
}

#[cfg(not(feature = "std"))]
#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[cfg(feature = "std")]
#[inline]
pub fn exp(x: f64) -> f64 {
    x.exp()
}

#[cfg(not(feature = "std"))]
#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[cfg(feature = "std")]
#[inline]
pub fn sqrt(x: f64) -> f64 {
    x.sqrt()
}

#[cfg(not(feature = "std"))]
#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[cfg(feature = "std")]
#[inline]
pub fn abs(x: f64) -> f64 {
    x.abs()
}

#[cfg(not(feature = "std"))]
#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[cfg(feature = "std")]
#[inline]
pub fn floor(x: f64) -> f64 {
    x.floor()
}

#[cfg(not(feature = "std"))]
#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

const SQRT_2: f64 = core::f64::consts::SQRT_2;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal CDF.
#[inline]
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + libm::erf(z / SQRT_2))
}

/// Standard normal PDF.
#[inline]
pub fn normal_pdf(z: f64) -> f64 {
    INV_SQRT_2PI * exp(-0.5 * z * z)
}

/// Inverse Mills ratio phi(z) / Phi(z).
///
/// For z below -6 the direct quotient loses precision as Phi underflows,
/// so an asymptotic expansion of the tail takes over there.
pub fn inv_mills(z: f64) -> f64 {
    if z > -6.0 {
        normal_pdf(z) / normal_cdf(z)
    } else {
        // Phi(z) ~ phi(z)/(-z) * (1 - 1/z^2 + 3/z^4 - 15/z^6) for z << 0
        let z2 = z * z;
        let series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
        -z / series
    }
}

/// log Phi(z), stable in the left tail.
pub fn log_normal_cdf(z: f64) -> f64 {
    if z > -6.0 {
        ln(normal_cdf(z))
    } else {
        // ln Phi(z) = ln phi(z) - ln lambda(z) with lambda the inverse Mills ratio
        -0.5 * z * z - 0.5 * LN_2PI - ln(inv_mills(z))
    }
}
