//! Static line-of-sight probability between a ground point and a UAV.
//!
//! The link survives when the first facade it crosses is lower than the
//! link at that point, and when no further wall along either axis between
//! the crossing and the UAV footprint is taller than the link there. Wall
//! positions along each axis form a Poisson process thinned by the
//! height CDF, so the second factor is a pair of void probabilities.
//!
//! Two independent routes are provided: the Rayleigh closed form built on
//! erf, and a generic-CDF route that integrates the void exponents
//! numerically. With a Rayleigh CDF plugged into the generic route the two
//! agree to quadrature tolerance.

use std::f64::consts::{FRAC_PI_2, SQRT_2};
use std::fmt;
use std::sync::Arc;

use crate::env::{FirstBlockSide, Orientation, Point2, Uav};
use crate::error::{Error, Result};
use crate::quad;
use crate::special::erf_diff;

/// Absolute tolerance on each void-probability exponent in the generic route.
pub const VOID_EXPONENT_TOL: f64 = 1e-10;

/// Building height distribution.
#[derive(Clone)]
pub enum HeightModel {
    Rayleigh { sigma: f64 },
    /// Any CDF; must be nondecreasing with limit 1.
    Cdf(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    Tabulated(TabulatedCdf),
}

impl fmt::Debug for HeightModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Rayleigh { sigma } => f.debug_struct("Rayleigh").field("sigma", sigma).finish(),
            Self::Cdf(_) => f.write_str("Cdf(<fn>)"),
            Self::Tabulated(t) => f.debug_tuple("Tabulated").field(t).finish(),
        }
    }
}

impl HeightModel {
    pub fn rayleigh(sigma: f64) -> Self {
        Self::Rayleigh { sigma }
    }

    /// Rayleigh CDF wrapped as an opaque function, forcing the generic route.
    pub fn rayleigh_as_cdf(sigma: f64) -> Self {
        Self::Cdf(Arc::new(move |h: f64| rayleigh_cdf(h, sigma)))
    }

    pub fn cdf(&self, h: f64) -> f64 {
        match self {
            Self::Rayleigh { sigma } => rayleigh_cdf(h, *sigma),
            Self::Cdf(f) => f(h),
            Self::Tabulated(t) => t.cdf(h),
        }
    }
}

fn rayleigh_cdf(h: f64, sigma: f64) -> f64 {
    if h <= 0.0 {
        0.0
    } else {
        -(-h * h / (2.0 * sigma * sigma)).exp_m1()
    }
}

/// Piecewise-linear CDF through `(height, probability)` knots.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCdf {
    knots: Vec<(f64, f64)>,
}

impl TabulatedCdf {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidParams("a tabulated CDF needs at least two knots".into()));
        }
        let ok = knots.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1)
            && knots[0].1 >= 0.0
            && (knots[knots.len() - 1].1 - 1.0).abs() < 1e-12;
        if !ok {
            return Err(Error::InvalidParams(
                "tabulated CDF must have increasing heights, nondecreasing values in [0, 1], ending at 1".into(),
            ));
        }
        Ok(Self { knots })
    }

    pub fn cdf(&self, h: f64) -> f64 {
        let k = &self.knots;
        if h <= k[0].0 {
            return if h < k[0].0 { 0.0 } else { k[0].1 };
        }
        if h >= k[k.len() - 1].0 {
            return 1.0;
        }
        let i = k.partition_point(|p| p.0 <= h) - 1;
        let (h0, f0) = k[i];
        let (h1, f1) = k[i + 1];
        f0 + (f1 - f0) * (h - h0) / (h1 - h0)
    }
}

/// Void-probability coefficients; the static probability's exponent is
/// `a |x_u - x_0| + b |y_u - y_0|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LosCoefficients {
    pub a: f64,
    pub b: f64,
}

/// Height of the link above the ground point `c`, which lies on the
/// projection between `g` and the UAV. `None` when the UAV is directly
/// above `g`.
pub fn los_height_at(c: Point2, g: Point2, u: &Uav) -> Option<f64> {
    let (dx, dy) = ((u.x - g.x).abs(), (u.y - g.y).abs());
    if dx < 1e-12 && dy < 1e-12 {
        return None;
    }
    Some(if dx >= dy { u.h * (c.x - g.x).abs() / dx } else { u.h * (c.y - g.y).abs() / dy })
}

/// Probability that the first contact building is lower than `h1`.
pub fn p0_los(h1: f64, model: &HeightModel) -> f64 {
    model.cdf(h1)
}

/// Fraction of the ground projection covered before the contact point,
/// measured along the axis the contact wall is perpendicular to.
pub fn contact_ratio(g: Point2, u: &Uav, contact: &FirstBlockSide) -> f64 {
    match contact.orientation {
        Orientation::ParallelX => (contact.point.y - g.y).abs() / (u.y - g.y).abs(),
        Orientation::ParallelY => (contact.point.x - g.x).abs() / (u.x - g.x).abs(),
    }
}

fn erf_coefficient(ratio: f64, lambda: f64, sigma: f64, h_u: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let z = h_u / (SQRT_2 * sigma);
    let r = ratio.clamp(0.0, 1.0);
    -lambda * FRAC_PI_2.sqrt() * (sigma / h_u) * erf_diff(z, z * r)
}

/// Rayleigh void coefficients for contact point `c` on the link `g -> u`.
/// An axis with no extent borrows the other axis's ratio; its term in
/// the exponent vanishes anyway.
pub fn los_coefficients(g: Point2, u: &Uav, c: Point2, lambda: f64, sigma: f64) -> LosCoefficients {
    let (dx, dy) = ((u.x - g.x).abs(), (u.y - g.y).abs());
    let rx = (dx > 0.0).then(|| (c.x - g.x).abs() / dx);
    let ry = (dy > 0.0).then(|| (c.y - g.y).abs() / dy);
    let (rx, ry) = match (rx, ry) {
        (Some(a), Some(b)) => (a, b),
        (Some(a), None) => (a, a),
        (None, Some(b)) => (b, b),
        (None, None) => (1.0, 1.0),
    };
    LosCoefficients {
        a: erf_coefficient(rx, lambda, sigma, u.h),
        b: erf_coefficient(ry, lambda, sigma, u.h),
    }
}

/// Static LoS probability of the link `g -> u` whose projection first
/// meets `contact`. `None`, or a contact at or beyond the UAV footprint,
/// means nothing can occlude the link.
pub fn p_los_static(
    g: Point2,
    u: &Uav,
    contact: Option<&FirstBlockSide>,
    lambda: f64,
    model: &HeightModel,
) -> f64 {
    let Some(c) = contact else { return 1.0 };
    let ratio = contact_ratio(g, u, c);
    if !(ratio < 1.0) {
        return 1.0;
    }
    match model {
        HeightModel::Rayleigh { sigma } => {
            let p0 = rayleigh_cdf(u.h * ratio, *sigma);
            if p0 == 0.0 {
                return 0.0;
            }
            let k = los_coefficients(g, u, c.point, lambda, *sigma);
            p0 * (k.a * (u.x - g.x).abs() + k.b * (u.y - g.y).abs()).exp()
        }
        _ => p_los_static_generic(g, u, c, lambda, model),
    }
}

/// Generic-CDF route: the void exponents are integrated numerically over
/// `[x_c, x_u]` and `[y_c, y_u]`, each oriented so the exponent is <= 0.
pub fn p_los_static_generic(
    g: Point2,
    u: &Uav,
    contact: &FirstBlockSide,
    lambda: f64,
    model: &HeightModel,
) -> f64 {
    let ratio = contact_ratio(g, u, contact);
    if !(ratio < 1.0) {
        return 1.0;
    }
    let p0 = p0_los(u.h * ratio, model);
    if p0 == 0.0 {
        return 0.0;
    }
    let exponent_x = void_exponent(contact.point.x, u.x, g.x, u.h, lambda, model);
    let exponent_y = void_exponent(contact.point.y, u.y, g.y, u.h, lambda, model);
    p0 * (exponent_x + exponent_y).exp()
}

/// `-lambda * integral over [from, to] of (1 - F(h(s))) ds`, where
/// `h(s) = h_u |s - origin| / |to - origin|`.
fn void_exponent(from: f64, to: f64, origin: f64, h_u: f64, lambda: f64, model: &HeightModel) -> f64 {
    let span = (to - origin).abs();
    if span == 0.0 || lambda == 0.0 || from == to {
        return 0.0;
    }
    let (lo, hi) = if from <= to { (from, to) } else { (to, from) };
    let q = quad::integrate(
        |s| lambda * (1.0 - model.cdf(h_u * (s - origin).abs() / span)),
        lo,
        hi,
        VOID_EXPONENT_TOL,
    );
    -q.value
}

#[cfg(test)]
mod tests {
    use super::*;

    fn contact_x(p: Point2) -> FirstBlockSide {
        FirstBlockSide { point: p, orientation: Orientation::ParallelX }
    }

    #[test]
    fn link_height_profile() {
        let g = Point2::new(0.0, 0.0);
        let u = Uav::new(100.0, 80.0, 120.0, 500.0);
        assert_eq!(los_height_at(g, g, &u), Some(0.0));
        let mid = los_height_at(Point2::new(50.0, 40.0), g, &u).unwrap();
        assert!((mid - 60.0).abs() < 1e-12);
        let c = Point2::new(12.5, 10.0);
        let h = los_height_at(c, g, &u).unwrap();
        assert!((h - 15.0).abs() < 1e-12);
        // both axes agree on the segment
        let hy = u.h * c.y / u.y;
        assert!(((h - hy) / h).abs() < 1e-9);
        assert_eq!(los_height_at(g, g, &Uav::new(0.0, 0.0, 50.0, 100.0)), None);
    }

    #[test]
    fn first_contact_probability() {
        let m = HeightModel::rayleigh(8.0);
        assert_eq!(p0_los(0.0, &m), 0.0);
        assert!((1.0 - p0_los(80.0, &m)) < 1e-20);
        let want = 1.0 - (-225.0f64 / 128.0).exp();
        assert!((p0_los(15.0, &m) - want).abs() < 1e-15);
        assert!((want - 0.8276).abs() < 1e-4);
        // against the Rayleigh density integrated numerically
        let pdf = |h: f64| h / 64.0 * (-h * h / 128.0).exp();
        let q = quad::integrate(pdf, 0.0, 15.0, 1e-13).value;
        assert!((q - want).abs() < 1e-12);
    }

    #[test]
    fn coefficients_limits() {
        let g = Point2::new(0.0, 0.0);
        let u = Uav::new(100.0, 80.0, 100.0, 500.0);
        let k = los_coefficients(g, &u, Point2::new(12.5, 10.0), 0.0, 8.0);
        assert_eq!(k, LosCoefficients { a: 0.0, b: 0.0 });
        let k = los_coefficients(g, &u, Point2::new(100.0 - 1e-9, 80.0 - 1e-9), 1.0 / 58.0, 8.0);
        assert!(k.a.abs() < 1e-12 && k.a <= 0.0);
    }

    #[test]
    fn coefficient_matches_defining_integral() {
        // lambda = 1/58, sigma = 8, h_u = 100, ratio 0.1
        let (lambda, sigma) = (1.0 / 58.0, 8.0);
        let g = Point2::new(0.0, 0.0);
        let u = Uav::new(120.0, 90.0, 100.0, 500.0);
        let c = Point2::new(12.0, 9.0);
        let k = los_coefficients(g, &u, c, lambda, sigma);
        let integral = quad::integrate(
            |x: f64| {
                let h = u.h * x / u.x;
                (-h * h / (2.0 * sigma * sigma)).exp()
            },
            c.x,
            u.x,
            1e-14,
        )
        .value;
        let want = -lambda * integral / u.x;
        assert!(((k.a - want) / want).abs() < 1e-9, "{} vs {want}", k.a);
        assert!((k.a - k.b).abs() < 1e-15);
    }

    #[test]
    fn empty_city_leaves_first_contact_only() {
        let g = Point2::new(0.0, 0.0);
        let u = Uav::new(100.0, 80.0, 120.0, 500.0);
        let c = contact_x(Point2::new(12.5, 10.0));
        let m = HeightModel::rayleigh(8.0);
        let p = p_los_static(g, &u, Some(&c), 0.0, &m);
        assert!((p - p0_los(15.0, &m)).abs() < 1e-15);
        assert_eq!(p_los_static(g, &u, None, 0.05, &m), 1.0);
    }

    #[test]
    fn tabulated_cdf_route() {
        let t = TabulatedCdf::new(vec![(0.0, 0.0), (10.0, 0.5), (30.0, 1.0)]).unwrap();
        assert_eq!(t.cdf(5.0), 0.25);
        assert_eq!(t.cdf(40.0), 1.0);
        assert!(TabulatedCdf::new(vec![(0.0, 0.0), (10.0, 0.9)]).is_err());

        let m = HeightModel::Tabulated(t);
        let g = Point2::new(0.0, 0.0);
        let u = Uav::new(60.0, 60.0, 60.0, 500.0);
        let c = contact_x(Point2::new(10.0, 10.0));
        // heights along the link equal x; F(10) = 0.5, and 1 - F(h) is
        // (30 - h) / 40 on [10, 30], zero above: each axis integrates to 5
        let per_axis: f64 = 5.0;
        let want = 0.5 * (-2.0 * 0.01 * per_axis).exp();
        let got = p_los_static(g, &u, Some(&c), 0.01, &m);
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn mirrored_uav_same_probability() {
        let m = HeightModel::rayleigh(8.0);
        let g = Point2::new(0.0, 0.0);
        for dx in [10.0, 40.0, 150.0] {
            let east = Uav::new(dx, 90.0, 70.0, 500.0);
            let west = Uav::new(-dx, 90.0, 70.0, 500.0);
            let ce = crate::env::first_block_side(g, &east, 12.0).unwrap();
            let cw = crate::env::first_block_side(g, &west, 12.0).unwrap();
            let pe = p_los_static(g, &east, Some(&ce), 1.0 / 47.0, &m);
            let pw = p_los_static(g, &west, Some(&cw), 1.0 / 47.0, &m);
            assert!((pe - pw).abs() < 1e-15);
        }
    }
}
