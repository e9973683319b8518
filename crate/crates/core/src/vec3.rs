//! Small fixed-size vector helpers over `[f64; 3]`.

pub type Point3 = [f64; 3];

#[inline]
pub(crate) fn dot(a: &Point3, b: &Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn sub(a: &Point3, b: &Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub(crate) fn scale(a: &Point3, s: f64) -> Point3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub(crate) fn norm(a: &Point3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub(crate) fn squared_distance(a: &Point3, b: &Point3) -> f64 {
    let d = sub(a, b);
    dot(&d, &d)
}

#[inline]
pub(crate) fn distance(a: &Point3, b: &Point3) -> f64 {
    squared_distance(a, b).sqrt()
}

#[inline]
pub(crate) fn is_finite(a: &Point3) -> bool {
    a[0].is_finite() && a[1].is_finite() && a[2].is_finite()
}
