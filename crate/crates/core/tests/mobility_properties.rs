mod common;

use proptest::prelude::*;
use uav_los::analytic::{los_coefficients, p_los_static, HeightModel};
use uav_los::env::{first_block_side, GridParams, Point2, Region, Uav, UserMotion};
use uav_los::mobility::{
    expected_los_total, expected_los_x_segment, p_los_x_segment, plan_from_gaps, poisson_weights,
    truncation_for_mean, MobileLink, SegmentPlan,
};

fn urban() -> GridParams {
    GridParams::new(45.0, 13.0, 8.0, Region::centered(400.0, 400.0)).unwrap()
}

/// Link with the UAV clear of the user's street on the +y side.
fn link_strategy() -> impl Strategy<Value = MobileLink> {
    (
        4.0..20.0f64,
        -150.0..150.0f64,
        5.0..200.0f64,
        20.0..180.0f64,
        0.0..35.0f64,
        1.0..15.0f64,
        20.0..100.0f64,
        3.0..15.0f64,
    )
        .prop_map(|(w, ux, extra, h, v, t, cell, sigma)| {
            let motion = UserMotion::new(Point2::new(0.0, 0.0), v, t, w);
            MobileLink::new(motion, Uav::new(ux, w + extra, h, 1e4), 1.0 / cell, HeightModel::rayleigh(sigma))
        })
}

proptest! {
    #[test]
    fn static_probability_is_a_probability(
        gx in -50.0..50.0f64, dx in -300.0..300.0f64, dy in 1.0..300.0f64,
        h in 1.0..300.0f64, w in 0.5..30.0f64, cell in 5.0..200.0f64, sigma in 1.0..30.0f64,
    ) {
        let g = Point2::new(gx, 0.0);
        let u = Uav::new(gx + dx, dy, h, 1e4);
        let c = first_block_side(g, &u, w);
        let p = p_los_static(g, &u, c.as_ref(), 1.0 / cell, &HeightModel::rayleigh(sigma));
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn static_probability_monotone(
        dx in -200.0..200.0f64, dy in 15.0..200.0f64, h in 10.0..200.0f64,
        cell in 10.0..150.0f64, k in 1.01..3.0f64,
    ) {
        let g = Point2::new(0.0, 0.0);
        let m = HeightModel::rayleigh(8.0);
        let u = Uav::new(dx, dy, h, 1e4);
        let c = first_block_side(g, &u, 10.0);
        let p = p_los_static(g, &u, c.as_ref(), 1.0 / cell, &m);
        // denser streets block more
        let denser = p_los_static(g, &u, c.as_ref(), k / cell, &m);
        prop_assert!(denser <= p * (1.0 + 1e-12));
        // a higher UAV sees more
        let higher = Uav::new(dx, dy, h * k, 1e4);
        let ph = p_los_static(g, &higher, first_block_side(g, &higher, 10.0).as_ref(), 1.0 / cell, &m);
        prop_assert!(ph >= p * (1.0 - 1e-12));
    }

    #[test]
    fn static_probability_mirror_symmetric(
        dx in 0.0..300.0f64, dy in 12.0..300.0f64, h in 5.0..200.0f64, cell in 10.0..150.0f64,
    ) {
        let g = Point2::new(7.0, 0.0);
        let m = HeightModel::rayleigh(8.0);
        let east = Uav::new(g.x + dx, dy, h, 1e4);
        let west = Uav::new(g.x - dx, dy, h, 1e4);
        let pe = p_los_static(g, &east, first_block_side(g, &east, 10.0).as_ref(), 1.0 / cell, &m);
        let pw = p_los_static(g, &west, first_block_side(g, &west, 10.0).as_ref(), 1.0 / cell, &m);
        prop_assert!((pe - pw).abs() <= 1e-14);
    }

    /// Lengths times `c`, street rate over `c`: nothing changes.
    #[test]
    fn static_probability_scale_free(
        dx in -200.0..200.0f64, dy in 15.0..200.0f64, h in 10.0..200.0f64,
        cell in 10.0..150.0f64, c in 0.2..5.0f64,
    ) {
        let g = Point2::new(0.0, 0.0);
        let u = Uav::new(dx, dy, h, 1e4);
        let p = p_los_static(g, &u, first_block_side(g, &u, 10.0).as_ref(), 1.0 / cell, &HeightModel::rayleigh(8.0));
        let us = Uav::new(dx * c, dy * c, h * c, 1e4);
        let ps = p_los_static(g, &us, first_block_side(g, &us, 10.0 * c).as_ref(), 1.0 / (cell * c), &HeightModel::rayleigh(8.0 * c));
        prop_assert!((p - ps).abs() <= 1e-12 * p.max(1e-300) + 1e-300);
    }

    #[test]
    fn facade_segment_linear_in_base(base in 0.0..1.0f64, a in -0.05..0.0f64, v in -30.0..30.0f64, t in 0.0..20.0f64, c in 0.0..1.0f64) {
        let full = expected_los_x_segment(base, a, v, t);
        let scaled = expected_los_x_segment(c * base, a, v, t);
        prop_assert!((scaled - c * full).abs() <= 1e-12 * full.max(1.0));
        prop_assert!(full >= 0.0 && full <= t * base.max(p_los_x_segment(t, base, a, v)) + 1e-12);
    }

    /// Propagating from a segment start agrees with a fresh static evaluation.
    #[test]
    fn facade_propagation_does_not_drift(link in link_strategy(), frac in 0.0..1.0f64) {
        let v = link.motion.speed;
        let t_under = if v > 0.0 { link.uav.x / v } else { f64::INFINITY };
        let (t0, t1) = if t_under > 0.0 && t_under < link.motion.epoch { (0.0, t_under) } else { (0.0, link.motion.epoch) };
        let t = t0 + frac * (t1 - t0);
        let base = link.p_los_facade(t0);
        let mid = link.motion.position(0.5 * (t0 + t1));
        let HeightModel::Rayleigh { sigma } = link.model else { unreachable!() };
        let c = link.facade_contact(0.5 * (t0 + t1)).unwrap();
        let a = los_coefficients(mid, &link.uav, c.point, link.lambda, sigma).a;
        let receding = if mid.x > link.uav.x { v } else { -v };
        let propagated = p_los_x_segment(t - t0, base, a, receding);
        let fresh = link.p_los_facade(t);
        prop_assert!((propagated - fresh).abs() <= 1e-9 * fresh.max(1e-300));
    }

    #[test]
    fn plan_total_within_epoch(link in link_strategy(), p in 0.0..1.0f64, width in 1.0..20.0f64) {
        let (c0, c1) = crossing_span(&link);
        let start = c0 + p * (c1 - c0);
        let plan = plan_from_gaps(&link.motion, &link.uav, &[(start, start + width)]).unwrap();
        let e = link.expected_los_plan(&plan);
        prop_assert!(e >= 0.0 && e <= link.motion.epoch * (1.0 + 1e-12));
    }

    /// One cross street: the three-point rule tracks the piecewise
    /// integrand within twice its own residual against the composite rule.
    #[test]
    fn plan_total_matches_quadrature(link in link_strategy(), p in 0.05..0.8f64, width in 4.0..20.0f64) {
        prop_assume!(link.motion.speed > 1.0);
        let (c0, c1) = crossing_span(&link);
        let start = c0 + p * (c1 - c0);
        let plan = plan_from_gaps(&link.motion, &link.uav, &[(start, start + width)]).unwrap();
        let e = link.expected_los_plan(&plan);
        let mut residual = 0.0;
        let mut direct = 0.0;
        for s in plan.segments() {
            let f = |t: f64| link.p_los_planned(&plan, t.min(s.end - 1e-12 * s.end.max(1.0)));
            direct += common::adaptive_simpson(&f, s.start, s.end, 1e-13);
            if let Some(gap) = s.gap {
                residual += (link.expected_los_y_segment(s.start, s.end, gap)
                    - link.expected_los_y_segment_reference(s.start, s.end, gap)).abs();
            }
        }
        prop_assert!((e - direct).abs() <= 2.0 * residual + 1e-9 * direct.max(1.0), "e={} direct={} residual={}", e, direct, residual);
    }

    /// The cross-street contact sits on the facade crossing at the end
    /// where the link leaves (UAV east) or enters (UAV west) the gap.
    #[test]
    fn segment_stitch_continuous_at_shared_corner(link in link_strategy(), p in 0.1..0.7f64, width in 3.0..20.0f64) {
        prop_assume!(link.motion.speed > 1.0);
        let (c0, c1) = crossing_span(&link);
        let start = c0 + p * (c1 - c0);
        let gap = (start, start + width);
        let plan = plan_from_gaps(&link.motion, &link.uav, &[gap]).unwrap();
        let e = plan.events[0];
        let east_at_tb = link.uav.x > link.motion.position(e.t_b).x;
        let west_at_ta = link.uav.x < link.motion.position(e.t_a).x;
        if east_at_tb && e.t_b < link.motion.epoch {
            let (a, b) = (link.p_los_y_segment(e.t_b, gap), link.p_los_facade(e.t_b));
            prop_assert!((a - b).abs() <= 1e-6 * b.max(1e-300));
        }
        if west_at_ta && e.t_a > 0.0 {
            let (a, b) = (link.p_los_y_segment(e.t_a, gap), link.p_los_facade(e.t_a));
            prop_assert!((a - b).abs() <= 1e-6 * b.max(1e-300));
        }
    }

    #[test]
    fn event_plan_strictly_increasing(link in link_strategy(), n in 1usize..6, seed in 0u64..1000) {
        prop_assume!(link.motion.speed > 0.5);
        let (c0, c1) = crossing_span(&link);
        let step = (c1 - c0) / n as f64;
        let gaps: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let p = c0 + step * (i as f64 + 0.1 + 0.3 * ((seed + i as u64) % 3) as f64 / 3.0);
                (p, p + 0.5 * step)
            })
            .collect();
        let plan = plan_from_gaps(&link.motion, &link.uav, &gaps).unwrap();
        let mut last = 0.0;
        for e in &plan.events {
            prop_assert!(e.t_a >= last && e.t_b > e.t_a);
            last = e.t_b;
        }
    }

    #[test]
    fn expected_total_within_coverage(
        v in 0.0..40.0f64, ux in -250.0..250.0f64, uy in -250.0..250.0f64, h in 20.0..200.0f64,
    ) {
        let m = UserMotion::new(Point2::new(0.0, 0.0), v, 10.0, 13.0).with_lane_offset(6.5);
        let u = Uav::new(ux, uy, h, 250.0);
        let r = expected_los_total(&urban(), &m, &u, 1e-3).unwrap();
        prop_assert!(r.value >= 0.0 && r.value <= r.window.len() * (1.0 + 1e-12));
        prop_assert!(r.weight_mass >= 1.0 - 1e-3);
        let renorm: f64 = r.per_ell.iter().map(|e| e.weight / r.weight_mass).sum();
        prop_assert!((renorm - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn poisson_weights_cover_mass(mu in 0.0..500.0f64, k in 1u32..10) {
        let eps = 10f64.powi(-(k as i32));
        let n = truncation_for_mean(mu, eps);
        let s: f64 = poisson_weights(mu, n).iter().sum();
        prop_assert!(s >= 1.0 - eps);
    }
}

fn crossing_span(link: &MobileLink) -> (f64, f64) {
    let w = link.motion.facing_edge_distance(link.uav.y);
    let ratio = w / (link.uav.y - link.motion.start.y).abs();
    let at = |t: f64| {
        let x = link.motion.position(t).x;
        x + (link.uav.x - x) * ratio
    };
    (at(0.0), at(link.motion.epoch))
}

#[test]
fn empty_plan_is_one_facade_segment() {
    let motion = UserMotion::new(Point2::new(0.0, 0.0), 15.0, 10.0, 13.0);
    let link = MobileLink::new(motion, Uav::new(-40.0, 90.0, 100.0, 1e4), 1.0 / 58.0, HeightModel::rayleigh(8.0));
    let plan = SegmentPlan::empty(10.0);
    assert_eq!(link.expected_los_plan(&plan), link.expected_los_x_span(0.0, 10.0));
}

#[test]
fn stationary_user_is_static_times_epoch() {
    let p = urban();
    let m = UserMotion::new(Point2::new(0.0, 0.0), 0.0, 10.0, 13.0).with_lane_offset(6.5);
    let u = Uav::new(60.0, 80.0, 100.0, 250.0);
    let c = first_block_side(m.start, &u, m.facing_edge_distance(u.y));
    let ps = p_los_static(m.start, &u, c.as_ref(), p.lambda, &HeightModel::rayleigh(8.0));
    assert_eq!(expected_los_total(&p, &m, &u, 1e-3).unwrap().value, ps * 10.0);
}

#[test]
fn sparse_streets_approach_static_value() {
    let m = UserMotion::new(Point2::new(0.0, 0.0), 15.0, 10.0, 13.0).with_lane_offset(6.5);
    let u = Uav::new(60.0, 80.0, 100.0, 1e4);
    let still = UserMotion { speed: 0.0, ..m };
    let sparse = GridParams::new(1e7, 13.0, 8.0, Region::centered(400.0, 400.0)).unwrap();
    let moving = expected_los_total(&sparse, &m, &u, 1e-3).unwrap();
    assert_eq!(moving.n, 0);
    let at_rest = expected_los_total(&sparse, &still, &u, 1e-3).unwrap().value;
    // with no cross streets only the facade term remains, and it
    // vanishes with the street rate
    assert!((moving.value - at_rest).abs() < 1e-3 * at_rest.max(1e-3), "{} vs {}", moving.value, at_rest);
}
