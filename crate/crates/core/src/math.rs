//! Thin wrappers over `libm` so call sites read like `std` float methods.

#[inline]
pub fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn powi(x: f64, n: u32) -> f64 {
    let mut acc = 1.0;
    let mut base = x;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// `|x|^p` with exact fast paths for the exponents used in practice.
#[inline]
pub fn abs_pow(x: f64, p: f64) -> f64 {
    let a = x.abs();
    if p == 2.0 {
        a * a
    } else if p == 1.0 {
        a
    } else if p == 4.0 {
        let s = a * a;
        s * s
    } else if a == 0.0 {
        0.0
    } else {
        libm::pow(a, p)
    }
}

#[inline]
pub fn root(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else if p == 2.0 {
        libm::sqrt(x)
    } else {
        libm::pow(x, 1.0 / p)
    }
}

pub use libm::{atan, ceil, cos, exp, expm1, log, sin, sqrt, tan};
