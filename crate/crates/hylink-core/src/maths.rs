//! Float math routed through std intrinsics or libm, so the crate builds
//! without std.

#![allow(dead_code)]

macro_rules! unary {
    ($name:ident, $libm:ident) => {
        #[inline]
        pub(crate) fn $name(x: f64) -> f64 {
            #[cfg(feature = "std")]
            {
                x.$name()
            }
            #[cfg(not(feature = "std"))]
            {
                libm::$libm(x)
            }
        }
    };
}

unary!(sqrt, sqrt);
unary!(ln, log);
unary!(log2, log2);
unary!(log10, log10);
unary!(exp, exp);
unary!(cos, cos);
unary!(sin, sin);
unary!(acos, acos);
unary!(ceil, ceil);

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.abs()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::fabs(x)
    }
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.powf(y)
    }
    #[cfg(not(feature = "std"))]
    {
        libm::pow(x, y)
    }
}

#[inline]
pub(crate) fn powi(x: f64, n: i32) -> f64 {
    #[cfg(feature = "std")]
    {
        x.powi(n)
    }
    #[cfg(not(feature = "std"))]
    {
        libm::pow(x, n as f64)
    }
}

/// 10^(x/10), the inverse of a decibel value.
#[inline]
pub(crate) fn from_db(x: f64) -> f64 {
    powf(10.0, x / 10.0)
}

/// 10·log10(x); negative infinity for x = 0.
#[inline]
pub(crate) fn to_db(x: f64) -> f64 {
    10.0 * log10(x)
}
