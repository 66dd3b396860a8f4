//! Torus arithmetic and the circle geometry of danger zones.
//!
//! Crescent quantities are normalized: lengths are in units of the disk
//! radius `r`, areas in units of `r²`. A danger zone therefore has radius 2.

use serde::{Deserialize, Serialize};

use crate::{Error, Real, Result};

/// Close-packing density of the triangular disk lattice, `π√3/6`.
pub const PACKING_DENSITY: f64 = 0.906_899_682_117_108_9;

/// A point of the unit 2-torus with both coordinates in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint<T> {
    x: T,
    y: T,
}

#[inline]
fn wrap<T: Real>(v: T) -> T {
    let w = v - v.floor();
    // `v - floor(v)` rounds up to 1 for tiny negative inputs
    if w >= T::one() || w.is_nan() {
        T::zero()
    } else {
        w
    }
}

#[inline]
fn min_image<T: Real>(d: T) -> T {
    d - d.round()
}

impl<T: Real> TorusPoint<T> {
    /// Builds a point, reducing both coordinates modulo 1.
    pub fn new(x: T, y: T) -> Self {
        Self {
            x: wrap(x),
            y: wrap(y),
        }
    }

    #[inline]
    pub fn x(&self) -> T {
        self.x
    }

    #[inline]
    pub fn y(&self) -> T {
        self.y
    }

    /// Minimal-image displacement vector from `self` to `other`.
    #[inline]
    pub fn displacement_to(&self, other: &Self) -> [T; 2] {
        [min_image(other.x - self.x), min_image(other.y - self.y)]
    }

    /// Translates by a Euclidean vector and wraps back onto the torus.
    #[inline]
    pub fn offset(&self, v: [T; 2]) -> Self {
        Self::new(self.x + v[0], self.y + v[1])
    }
}

/// Torus distance under the minimal-image convention.
#[inline]
pub fn torus_dist<T: Real>(p: &TorusPoint<T>, q: &TorusPoint<T>) -> T {
    let [dx, dy] = p.displacement_to(q);
    dx.hypot(dy)
}

#[inline]
pub(crate) fn torus_dist_sq<T: Real>(p: &TorusPoint<T>, q: &TorusPoint<T>) -> T {
    let [dx, dy] = p.displacement_to(q);
    dx * dx + dy * dy
}

/// Euclidean coordinates around a fixed origin.
///
/// Valid for points within distance 1/4 of the origin, where the
/// minimal-image vector is unique and pairwise differences stay minimal.
#[derive(Debug, Clone, Copy)]
pub struct LocalChart<T> {
    origin: TorusPoint<T>,
}

impl<T: Real> LocalChart<T> {
    pub fn new(origin: TorusPoint<T>) -> Self {
        Self { origin }
    }

    pub fn origin(&self) -> TorusPoint<T> {
        self.origin
    }

    /// Largest distance from the origin at which the chart is trusted.
    pub fn radius() -> T {
        T::lit(0.25)
    }

    pub fn to_plane(&self, p: &TorusPoint<T>) -> [T; 2] {
        self.origin.displacement_to(p)
    }

    /// Like [`to_plane`](Self::to_plane), but rejects points outside the chart.
    pub fn try_to_plane(&self, p: &TorusPoint<T>) -> Result<[T; 2]> {
        let v = self.to_plane(p);
        if v[0].hypot(v[1]) >= Self::radius() {
            return Err(Error::Chart(format!(
                "point ({}, {}) lies outside the chart around ({}, {})",
                p.x, p.y, self.origin.x, self.origin.y
            )));
        }
        Ok(v)
    }

    pub fn to_torus(&self, v: [T; 2]) -> TorusPoint<T> {
        self.origin.offset(v)
    }
}

/// Volume of a `dim`-dimensional ball, `π^{d/2} r^d / Γ(d/2 + 1)`.
pub fn ball_volume<T: Real>(dim: u32, radius: T) -> Result<T> {
    if dim == 0 {
        return Err(Error::domain("dimension", "must be positive"));
    }
    if radius < T::zero() || radius.is_nan() {
        return Err(Error::domain("radius", format!("{radius} < 0")));
    }
    // Γ(d/2 + 1) by the recurrence Γ(x + 1) = x Γ(x) from Γ(1) or Γ(3/2).
    let half = T::lit(0.5);
    let (mut x, mut gamma) = if dim.is_multiple_of(2) {
        (T::one(), T::one())
    } else {
        (T::lit(1.5), T::PI().sqrt() * half)
    };
    let target = T::lit(f64::from(dim)) * half + T::one();
    while x < target - half {
        gamma = gamma * x;
        x = x + T::one();
    }
    let d = T::lit(f64::from(dim));
    Ok(T::PI().powf(d * half) * radius.powi(dim as i32) / gamma)
}

fn check_lambda<T: Real>(lambda: T) -> Result<()> {
    if !(lambda >= T::zero() && lambda <= T::lit(4.0)) {
        return Err(Error::domain(
            "lambda",
            format!("{lambda} not in [0, 4] (use 4π beyond the grid)"),
        ));
    }
    Ok(())
}

/// Area of `Z(y) \ Z(x)` for danger zones of radius 2 at centre distance `λ`.
///
/// `8·asin(λ/4) + λ·√(4 − λ²/4)` for `0 ≤ λ ≤ 4`.
pub fn crescent_area<T: Real>(lambda: T) -> Result<T> {
    check_lambda(lambda)?;
    Ok(crescent_area_unchecked(lambda))
}

#[inline]
pub(crate) fn crescent_area_unchecked<T: Real>(lambda: T) -> T {
    let four = T::lit(4.0);
    let q = (lambda / four).min(T::one());
    let root = (four - lambda * lambda / four).max(T::zero()).sqrt();
    T::lit(8.0) * q.asin() + lambda * root
}

/// Half-angle θ(u, λ) of the arc at distance `u` from `y` lying outside `Z(x)`.
///
/// Law of cosines when `(u, λ, 2)` forms a triangle; `0` when `u < λ − 2`;
/// `π` when `u < 2 − λ`. The crescent covers the fraction `(π − θ)/π` of the
/// circle of radius `u < 2` around `y`.
pub fn crescent_angle<T: Real>(u: T, lambda: T) -> Result<T> {
    if !(u >= T::zero()) {
        return Err(Error::domain("u", format!("{u} < 0")));
    }
    if !(lambda > T::zero() && lambda <= T::lit(4.0)) {
        return Err(Error::domain("lambda", format!("{lambda} not in (0, 4]")));
    }
    Ok(crescent_angle_unchecked(u, lambda))
}

#[inline]
pub(crate) fn crescent_angle_unchecked<T: Real>(u: T, lambda: T) -> T {
    let two = T::lit(2.0);
    if u < lambda - two {
        return T::zero();
    }
    if u < two - lambda {
        return T::PI();
    }
    if u == T::zero() {
        // λ = 2 exactly; the limit u → 0 of acos(u / 4)
        return T::FRAC_PI_2();
    }
    let c = (u * u + lambda * lambda - T::lit(4.0)) / (two * lambda * u);
    c.max(-T::one()).min(T::one()).acos()
}

/// Mirror image of `z` across the perpendicular bisector of segment `ab`.
///
/// Computed in a Euclidean chart centred at the midpoint of `a` and `b`.
pub fn reflect_across_bisector<T: Real>(
    z: &TorusPoint<T>,
    a: &TorusPoint<T>,
    b: &TorusPoint<T>,
) -> Result<TorusPoint<T>> {
    let ab = a.displacement_to(b);
    let len = ab[0].hypot(ab[1]);
    if !(len > T::zero()) {
        return Err(Error::Chart("reflection needs distinct endpoints".into()));
    }
    let half = T::lit(0.5);
    let chart = LocalChart::new(a.offset([ab[0] * half, ab[1] * half]));
    chart.try_to_plane(a)?;
    let v = chart.try_to_plane(z)?;
    let n = [ab[0] / len, ab[1] / len];
    let proj = v[0] * n[0] + v[1] * n[1];
    let two = T::lit(2.0);
    Ok(chart.to_torus([v[0] - two * proj * n[0], v[1] - two * proj * n[1]]))
}
