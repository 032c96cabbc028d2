//! Scalar float routines, routed to `std` or `libm` depending on features.

macro_rules! fwd1 {
    ($($name:ident => $method:ident / $libm:ident),* $(,)?) => {
        $(
            #[cfg(feature = "std")]
            #[inline(always)]
            pub(crate) fn $name(x: f64) -> f64 {
                x.$method()
            }
            #[cfg(not(feature = "std"))]
            #[inline(always)]
            pub(crate) fn $name(x: f64) -> f64 {
                libm::$libm(x)
            }
        )*
    };
}

fwd1! {
    exp => exp / exp,
    ln => ln / log,
    sqrt => sqrt / sqrt,
    sin => sin / sin,
    cos => cos / cos,
    sinh => sinh / sinh,
    cosh => cosh / cosh,
    abs => abs / fabs,
    floor => floor / floor,
    ceil => ceil / ceil,
}

#[cfg(feature = "std")]
#[inline(always)]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    x.powf(y)
}

#[cfg(not(feature = "std"))]
#[inline(always)]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[cfg(feature = "std")]
#[inline(always)]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    x.hypot(y)
}

#[cfg(not(feature = "std"))]
#[inline(always)]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

/// Euclidean norm of a 2-vector stored as `[f64; 2]`.
#[inline(always)]
pub(crate) fn norm2(v: [f64; 2]) -> f64 {
    hypot(v[0], v[1])
}

/// Distance between two points.
#[inline(always)]
pub(crate) fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    hypot(a[0] - b[0], a[1] - b[1])
}
