//! Error function helpers.
//!
//! `erf` and `erfc` come from `libm`, a port of the FreeBSD msun
//! implementation (rational approximations on five sub-intervals, under
//! 1 ulp across the real line). The helpers here only pick the
//! cancellation-free route for differences of nearly equal values.

/// erf(x)
#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// erfc(x) = 1 - erf(x)
#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// erf(hi) - erf(lo), evaluated through erfc when both arguments sit in
/// the upper tail where erf is within a hair of 1.
pub fn erf_diff(hi: f64, lo: f64) -> f64 {
    if lo >= 0.5 && hi >= 0.5 {
        erfc(lo) - erfc(hi)
    } else if lo <= -0.5 && hi <= -0.5 {
        erfc(-hi) - erfc(-lo)
    } else {
        erf(hi) - erf(lo)
    }
}
