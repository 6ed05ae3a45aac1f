//! Chordal (spherical) metric on the Riemann sphere.
//!
//! Convergence of the truncation ladder is measured in the metric
//! `s(z, ζ) = |z − ζ| / (√(1+|z|²) √(1+|ζ|²))`, extended to the point at
//! infinity by `s(z, ∞) = 1 / √(1+|z|²)`. With this normalization `s ≤ 1`,
//! with equality exactly for antipodal points.

use num_complex::Complex;

use crate::scalar::Real;

/// A point of the Riemann sphere: a finite complex number or `∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpherePoint<T> {
    Finite(Complex<T>),
    Infinity,
}

impl<T: Real> SpherePoint<T> {
    /// Wraps a complex value, mapping non-finite input to `∞`.
    pub fn from_complex(z: Complex<T>) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            SpherePoint::Finite(z)
        } else {
            SpherePoint::Infinity
        }
    }
}

/// Chordal distance between two points of the Riemann sphere.
pub fn spherical_distance<T: Real>(a: SpherePoint<T>, b: SpherePoint<T>) -> T {
    let lift = |z: Complex<T>| (T::one() + z.norm_sqr()).sqrt();
    match (a, b) {
        (SpherePoint::Finite(z), SpherePoint::Finite(w)) => (z - w).norm() / (lift(z) * lift(w)),
        (SpherePoint::Finite(z), SpherePoint::Infinity)
        | (SpherePoint::Infinity, SpherePoint::Finite(z)) => T::one() / lift(z),
        (SpherePoint::Infinity, SpherePoint::Infinity) => T::zero(),
    }
}

/// Chordal distance between two finite points.
pub fn spherical_distance_finite<T: Real>(z: Complex<T>, w: Complex<T>) -> T {
    spherical_distance(SpherePoint::from_complex(z), SpherePoint::from_complex(w))
}

/// Exact maximum of pairwise chordal distances over a finite point set.
///
/// Empty input has diameter zero.
pub fn spherical_diameter<T: Real>(points: &[SpherePoint<T>]) -> T {
    let mut best = T::zero();
    for (i, &a) in points.iter().enumerate() {
        for &b in &points[i + 1..] {
            best = best.max(spherical_distance(a, b));
        }
    }
    best
}
