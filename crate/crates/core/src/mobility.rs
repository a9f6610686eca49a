//! Expected line-of-sight time of a user moving along +X.
//!
//! While the projected link leaves the user's street through a facade
//! (a `ParallelX` wall) the contact ratio is frozen, so the static
//! probability evolves as `base * exp(a * v * t)` and integrates in closed
//! form. While the link slips through a cross street it first meets a
//! `ParallelY` wall whose contact ratio changes with time; those segments
//! are integrated with the three-point Simpson rule. An epoch is the
//! alternation of the two, and the number of cross streets met in an
//! epoch is Poisson with mean `lambda * v * T`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::analytic::{los_coefficients, p_los_static, HeightModel};
use crate::env::{first_block_side, FirstBlockSide, GridParams, Orientation, Point2, Uav, UserMotion};
use crate::error::{Error, Result};
use crate::oracle::{coverage_window, CoverageWindow};
use crate::quad;

/// Below this |a v T| the closed form switches to its series limit.
pub const SERIES_SWITCH: f64 = 1e-8;

/// Node count of the composite Simpson reference for cross-street segments.
pub const REFERENCE_NODES: usize = 129;

pub const DEFAULT_EPSILON: f64 = 1e-3;

/// The projected link crosses the cross street `[gap_start, gap_end]`
/// between user times `t_a` and `t_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapEvent {
    pub t_a: f64,
    pub t_b: f64,
    pub gap_start: f64,
    pub gap_end: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub orientation: Orientation,
    /// Cross street bounds for `ParallelY` segments.
    pub gap: Option<(f64, f64)>,
}

/// Alternating facade / cross-street segments over `[0, epoch]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentPlan {
    pub epoch: f64,
    pub events: Vec<GapEvent>,
}

impl SegmentPlan {
    pub fn new(epoch: f64, events: Vec<GapEvent>) -> Result<Self> {
        let mut last = 0.0;
        for e in &events {
            if !(e.t_a >= last && e.t_b >= e.t_a && e.t_b <= epoch) {
                return Err(Error::DegenerateGeometry(format!(
                    "events must satisfy 0 <= t_a <= t_b <= next t_a <= {epoch}; got [{}, {}] after {last}",
                    e.t_a, e.t_b
                )));
            }
            if !(e.gap_end > e.gap_start) {
                return Err(Error::DegenerateGeometry("cross street must have positive width".into()));
            }
            last = e.t_b;
        }
        Ok(Self { epoch, events })
    }

    pub fn empty(epoch: f64) -> Self {
        Self { epoch, events: Vec::new() }
    }

    /// Segments in time order; zero-length pieces are dropped.
    pub fn segments(&self) -> Vec<Segment> {
        let mut out = Vec::with_capacity(2 * self.events.len() + 1);
        let mut cursor = 0.0;
        let mut push = |start: f64, end: f64, orientation, gap| {
            if end > start {
                out.push(Segment { start, end, orientation, gap });
            }
        };
        for e in &self.events {
            push(cursor, e.t_a, Orientation::ParallelX, None);
            push(e.t_a, e.t_b, Orientation::ParallelY, Some((e.gap_start, e.gap_end)));
            cursor = e.t_b;
        }
        push(cursor, self.epoch, Orientation::ParallelX, None);
        out
    }
}

/// Build the plan produced by a list of cross streets (x bands along the
/// facade row), sorted by position. Cross streets outside the epoch are
/// skipped; those straddling its ends are clipped.
pub fn plan_from_gaps(motion: &UserMotion, u: &Uav, gaps: &[(f64, f64)]) -> Result<SegmentPlan> {
    let w = motion.facing_edge_distance(u.y);
    let depth = (u.y - motion.start.y).abs();
    if depth <= w {
        return Err(Error::DegenerateGeometry(format!(
            "UAV at |dy| = {depth} m does not clear the street edge at {w} m"
        )));
    }
    let (x0, v, epoch) = (motion.start.x, motion.speed, motion.epoch);
    let ratio = w / depth;
    let crossing = |t: f64| {
        let xt = x0 + v * t;
        xt + (u.x - xt) * ratio
    };
    // user position at which the facade crossing reaches `c`
    let user_at = |c: f64| (depth * c - w * u.x) / (depth - w);
    let (c0, c1) = (crossing(0.0), crossing(epoch));
    let mut events = Vec::new();
    for &(p, q) in gaps {
        if q <= c0 || p >= c1 {
            continue;
        }
        let (t_a, t_b) = if v > 0.0 {
            (((user_at(p) - x0) / v).max(0.0), ((user_at(q) - x0) / v).min(epoch))
        } else {
            (0.0, epoch)
        };
        if t_b > t_a {
            events.push(GapEvent { t_a, t_b, gap_start: p, gap_end: q });
        }
    }
    SegmentPlan::new(epoch, events)
}

/// Static probability `t` seconds into a facade segment that started
/// with probability `base`. `v` is the rate at which the horizontal
/// user-UAV separation grows; it is negative while the user closes in.
pub fn p_los_x_segment(t: f64, base: f64, a: f64, v: f64) -> f64 {
    base * (a * v * t).exp()
}

/// Closed-form expected LoS time of a facade segment of length `t_alpha`.
pub fn expected_los_x_segment(base: f64, a: f64, v: f64, t_alpha: f64) -> f64 {
    if t_alpha <= 0.0 {
        return 0.0;
    }
    let x = a * v * t_alpha;
    if x.abs() < SERIES_SWITCH {
        base * t_alpha * (1.0 + 0.5 * x)
    } else {
        base * x.exp_m1() / (a * v)
    }
}

/// One user-UAV link evaluated against the statistical city.
#[derive(Debug, Clone)]
pub struct MobileLink {
    pub motion: UserMotion,
    pub uav: Uav,
    pub lambda: f64,
    pub model: HeightModel,
}

impl MobileLink {
    pub fn new(motion: UserMotion, uav: Uav, lambda: f64, model: HeightModel) -> Self {
        Self { motion, uav, lambda, model }
    }

    fn facing(&self) -> f64 {
        self.motion.facing_edge_distance(self.uav.y)
    }

    /// Facade crossing of the link at time `t`.
    pub fn facade_contact(&self, t: f64) -> Option<FirstBlockSide> {
        first_block_side(self.motion.position(t), &self.uav, self.facing())
    }

    /// First cross-street wall hit at time `t` while the facade crossing
    /// lies inside `gap`. `None` when the wall is beyond the UAV footprint.
    pub fn gap_contact(&self, t: f64, gap: (f64, f64)) -> Option<FirstBlockSide> {
        let g = self.motion.position(t);
        let u = &self.uav;
        if u.x == g.x {
            return None;
        }
        let wall = if u.x > g.x { gap.1 } else { gap.0 };
        let ratio = (wall - g.x) / (u.x - g.x);
        if !(0.0..1.0).contains(&ratio) {
            return None;
        }
        Some(FirstBlockSide {
            point: Point2::new(wall, g.y + ratio * (u.y - g.y)),
            orientation: Orientation::ParallelY,
        })
    }

    /// Static probability at time `t` with the facade as first contact.
    pub fn p_los_facade(&self, t: f64) -> f64 {
        let c = self.facade_contact(t);
        p_los_static(self.motion.position(t), &self.uav, c.as_ref(), self.lambda, &self.model)
    }

    /// Probability at time `t` inside a cross-street segment. The contact
    /// point is recomputed on the current link, so the two axis ratios
    /// stay equal but vary with `t`.
    pub fn p_los_y_segment(&self, t: f64, gap: (f64, f64)) -> f64 {
        let c = self.gap_contact(t, gap);
        p_los_static(self.motion.position(t), &self.uav, c.as_ref(), self.lambda, &self.model)
    }

    /// Three-point Simpson estimate over `[t0, t1]`.
    pub fn expected_los_y_segment(&self, t0: f64, t1: f64, gap: (f64, f64)) -> f64 {
        if t1 <= t0 {
            return 0.0;
        }
        let mid = 0.5 * (t0 + t1);
        (t1 - t0) / 6.0
            * (self.p_los_y_segment(t0, gap)
                + 4.0 * self.p_los_y_segment(mid, gap)
                + self.p_los_y_segment(t1, gap))
    }

    /// Composite Simpson with [`REFERENCE_NODES`] nodes, for error reporting.
    pub fn expected_los_y_segment_reference(&self, t0: f64, t1: f64, gap: (f64, f64)) -> f64 {
        if t1 <= t0 {
            return 0.0;
        }
        quad::simpson(|t| self.p_los_y_segment(t, gap), t0, t1, REFERENCE_NODES)
    }

    /// Closed-form expected time of a facade segment `[t0, t1]`. The
    /// segment is split where the user passes under the UAV, since the
    /// separation stops shrinking there.
    pub fn expected_los_x_span(&self, t0: f64, t1: f64) -> f64 {
        if t1 <= t0 {
            return 0.0;
        }
        let v = self.motion.speed;
        let x0 = self.motion.start.x;
        let mut pieces = vec![t0];
        if v > 0.0 {
            let t_under = (self.uav.x - x0) / v;
            if t_under > t0 && t_under < t1 {
                pieces.push(t_under);
            }
        }
        pieces.push(t1);
        pieces
            .windows(2)
            .map(|w| {
                let (a0, a1) = (w[0], w[1]);
                let base = self.p_los_facade(a0);
                // the coefficient is constant on the piece; read it at the
                // midpoint, away from the pass-under point where dx vanishes
                let t_mid = 0.5 * (a0 + a1);
                let g = self.motion.position(t_mid);
                let Some(c) = self.facade_contact(t_mid) else { return base * (a1 - a0) };
                let coeff = match &self.model {
                    HeightModel::Rayleigh { sigma } => {
                        los_coefficients(g, &self.uav, c.point, self.lambda, *sigma).a
                    }
                    _ => return quad::integrate(|t| self.p_los_facade(t), a0, a1, 1e-12).value,
                };
                let receding = if g.x > self.uav.x { v } else { -v };
                expected_los_x_segment(base, coeff, receding, a1 - a0)
            })
            .sum()
    }

    /// Probability at time `t` under `plan`.
    pub fn p_los_planned(&self, plan: &SegmentPlan, t: f64) -> f64 {
        for e in &plan.events {
            if t >= e.t_a && t < e.t_b {
                return self.p_los_y_segment(t, (e.gap_start, e.gap_end));
            }
        }
        self.p_los_facade(t)
    }

    /// Sum of per-segment expectations over the plan.
    pub fn expected_los_plan(&self, plan: &SegmentPlan) -> f64 {
        plan.segments()
            .iter()
            .map(|s| match s.orientation {
                Orientation::ParallelX => self.expected_los_x_span(s.start, s.end),
                Orientation::ParallelY => {
                    self.expected_los_y_segment(s.start, s.end, s.gap.expect("cross-street segment"))
                }
            })
            .sum()
    }
}

/// Smallest `n` whose Poisson(`mu`) CDF reaches `1 - epsilon`.
pub fn truncation_for_mean(mu: f64, epsilon: f64) -> usize {
    assert!(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
    if mu <= 0.0 {
        return 0;
    }
    let target = 1.0 - epsilon;
    let cap = (mu + 40.0 * mu.sqrt() + 100.0) as usize;
    let mut log_term = -mu;
    let mut cdf = log_term.exp();
    let mut n = 0;
    while cdf < target && n < cap {
        n += 1;
        log_term += mu.ln() - (n as f64).ln();
        cdf += log_term.exp();
    }
    n
}

/// Truncation point for `mu = lambda * v * t`.
pub fn poisson_truncation_n(lambda: f64, v: f64, t: f64, epsilon: f64) -> usize {
    truncation_for_mean(lambda * v * t, epsilon)
}

/// Poisson(`mu`) probabilities for `0..=n`.
pub fn poisson_weights(mu: f64, n: usize) -> Vec<f64> {
    if mu <= 0.0 {
        let mut w = vec![0.0; n + 1];
        w[0] = 1.0;
        return w;
    }
    let mut log_term = -mu;
    let mut out = Vec::with_capacity(n + 1);
    out.push(log_term.exp());
    for k in 1..=n {
        log_term += mu.ln() - (k as f64).ln();
        out.push(log_term.exp());
    }
    out
}

/// How `E[T^l]` is formed for a given crossing count `l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LayoutMode {
    /// One representative layout per `l`: crossings at the expected
    /// uniform order statistics, each as wide as a mean street (narrowed
    /// when the spacing is tighter than a mean cell).
    Canonical,
    /// Average over `layouts` random layouts conditioned on `l` crossings.
    Sampled { layouts: usize, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct TotalOptions {
    pub epsilon: f64,
    pub layout: LayoutMode,
    /// Defaults to Rayleigh(params.sigma).
    pub model: Option<HeightModel>,
}

impl Default for TotalOptions {
    fn default() -> Self {
        Self { epsilon: DEFAULT_EPSILON, layout: LayoutMode::Canonical, model: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllTerm {
    pub ell: usize,
    pub expected: f64,
    /// Poisson probability of `ell` crossings, before renormalization.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedLosResult {
    /// Expected LoS seconds inside the coverage window.
    pub value: f64,
    pub per_ell: Vec<EllTerm>,
    pub n: usize,
    pub epsilon: f64,
    /// Sum of the raw Poisson weights, at least `1 - epsilon`.
    pub weight_mass: f64,
    pub window: CoverageWindow,
}

/// Expected LoS time with the default options.
pub fn expected_los_total(
    params: &GridParams,
    motion: &UserMotion,
    u: &Uav,
    epsilon: f64,
) -> Result<ExpectedLosResult> {
    expected_los_total_with(params, motion, u, &TotalOptions { epsilon, ..Default::default() })
}

/// Expected LoS time of `motion` with `u` over the part of the epoch the
/// user spends inside the UAV's coverage disk.
pub fn expected_los_total_with(
    params: &GridParams,
    motion: &UserMotion,
    u: &Uav,
    opts: &TotalOptions,
) -> Result<ExpectedLosResult> {
    params.validate()?;
    motion.validate()?;
    if !(opts.epsilon > 0.0 && opts.epsilon < 1.0) {
        return Err(Error::InvalidParams(format!("epsilon must lie in (0, 1), got {}", opts.epsilon)));
    }
    let window = coverage_window(motion, u);
    let t_min = window.len();
    let empty = |value: f64| ExpectedLosResult {
        value,
        per_ell: vec![EllTerm { ell: 0, expected: value, weight: 1.0 }],
        n: 0,
        epsilon: opts.epsilon,
        weight_mass: 1.0,
        window,
    };
    if t_min <= 0.0 {
        return Ok(empty(0.0));
    }
    let eff = motion.shifted(window.start, t_min);
    // UAV above the user's own street: the projected link never leaves it.
    if (u.y - eff.start.y).abs() <= eff.facing_edge_distance(u.y) {
        return Ok(empty(t_min));
    }
    let model = opts.model.clone().unwrap_or(HeightModel::rayleigh(params.sigma));
    let link = MobileLink::new(eff, *u, params.lambda, model);

    let mu = params.lambda * eff.speed * t_min;
    let n = truncation_for_mean(mu, opts.epsilon);
    let weights = poisson_weights(mu, n);
    let mut per_ell = Vec::with_capacity(n + 1);
    for (ell, &weight) in weights.iter().enumerate() {
        let expected = match opts.layout {
            LayoutMode::Canonical => {
                let plan = plan_from_gaps(&eff, u, &canonical_gaps(params, &eff, u, ell))?;
                link.expected_los_plan(&plan)
            }
            LayoutMode::Sampled { layouts, seed } => {
                sampled_expectation(params, &link, ell, layouts.max(1), seed)?
            }
        };
        per_ell.push(EllTerm { ell, expected, weight });
    }
    let weight_mass: f64 = weights.iter().sum();
    let value = per_ell.iter().map(|e| e.weight * e.expected).sum::<f64>() / weight_mass;
    Ok(ExpectedLosResult { value, per_ell, n, epsilon: opts.epsilon, weight_mass, window })
}

/// Facade-crossing interval swept during the epoch.
fn crossing_span(motion: &UserMotion, u: &Uav) -> (f64, f64) {
    let w = motion.facing_edge_distance(u.y);
    let ratio = w / (u.y - motion.start.y).abs();
    let at = |t: f64| {
        let xt = motion.position(t).x;
        xt + (u.x - xt) * ratio
    };
    (at(0.0), at(motion.epoch))
}

/// Cross streets of the canonical layout with `ell` crossings.
pub fn canonical_gaps(params: &GridParams, motion: &UserMotion, u: &Uav, ell: usize) -> Vec<(f64, f64)> {
    if ell == 0 {
        return Vec::new();
    }
    let (c0, c1) = crossing_span(motion, u);
    let spacing = (c1 - c0) / (ell + 1) as f64;
    let width = params.mu_s.min(params.street_fraction() * spacing);
    (1..=ell)
        .map(|i| {
            let p = c0 + spacing * i as f64;
            (p, p + width)
        })
        .collect()
}

fn sampled_expectation(
    params: &GridParams,
    link: &MobileLink,
    ell: usize,
    layouts: usize,
    seed: u64,
) -> Result<f64> {
    let (c0, c1) = crossing_span(&link.motion, &link.uav);
    let fs = params.street_fraction();
    let exp = Exp::new(params.lambda).map_err(|e| Error::InvalidParams(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(ell as u64);
    let mut total = 0.0;
    for _ in 0..layouts {
        // ell uniform points in the swept span, plus one point on either
        // side; the first crossing must start on a facade.
        let points = loop {
            let mut pts: Vec<f64> = (0..ell).map(|_| rng.random_range(c0..c1)).collect();
            pts.sort_by(f64::total_cmp);
            let before = c0 - exp.sample(&mut rng);
            let after = c1 + exp.sample(&mut rng);
            let first_next = pts.first().copied().unwrap_or(after);
            if c0 >= before + fs * (first_next - before) {
                pts.insert(0, before);
                pts.push(after);
                break pts;
            }
        };
        let gaps: Vec<(f64, f64)> = points[1..points.len() - 1]
            .iter()
            .zip(&points[2..])
            .map(|(&p, &next)| (p, p + fs * (next - p)))
            .collect();
        let plan = plan_from_gaps(&link.motion, &link.uav, &gaps)?;
        total += link.expected_los_plan(&plan);
    }
    Ok(total / layouts as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::Region;

    fn urban() -> GridParams {
        GridParams::new(45.0, 13.0, 8.0, Region::centered(400.0, 400.0)).unwrap()
    }

    #[test]
    fn x_segment_identities() {
        assert_eq!(p_los_x_segment(0.0, 0.6, -0.01, 15.0), 0.6);
        assert_eq!(p_los_x_segment(3.0, 0.6, -0.01, 0.0), 0.6);
        let p = p_los_x_segment(2.0, 0.6, -0.01, 15.0);
        assert!((p - 0.6 * (-0.3f64).exp()).abs() < 1e-15);
        assert!((p - 0.4445).abs() < 1e-4);
    }

    #[test]
    fn x_segment_expectation() {
        assert_eq!(expected_los_x_segment(0.7, -0.01, 0.0, 4.0), 0.7 * 4.0);
        assert_eq!(expected_los_x_segment(0.7, -0.01, 15.0, 0.0), 0.0);
        // a v = -0.1 1/s, T = 10 s
        let e = expected_los_x_segment(1.0, -0.01, 10.0, 10.0);
        let want = (1.0 - (-1.0f64).exp()) / 0.1;
        assert!((e - want).abs() < 1e-12);
        assert!((e - 6.3212).abs() < 1e-4);
        let q = quad::integrate(|t| p_los_x_segment(t, 1.0, -0.01, 10.0), 0.0, 10.0, 1e-13).value;
        assert!(((e - q) / q).abs() < 1e-9);
        // series branch stays continuous with the closed form
        let tiny = expected_los_x_segment(0.5, -1e-10, 1.0, 10.0);
        assert!((tiny - 0.5 * 10.0 * (1.0 - 0.5e-9)).abs() < 1e-15);
    }

    #[test]
    fn x_segment_matches_displaced_static_value() {
        // user receding from a UAV to the west
        let motion = UserMotion::new(Point2::new(0.0, 0.0), 15.0, 10.0, 13.0);
        let u = Uav::new(-60.0, 90.0, 100.0, 1000.0);
        let link = MobileLink::new(motion, u, 1.0 / 58.0, HeightModel::rayleigh(8.0));
        let base = link.p_los_facade(0.0);
        let c = link.facade_contact(0.0).unwrap();
        let a = los_coefficients(motion.start, &u, c.point, link.lambda, 8.0).a;
        for t in [0.5, 2.0, 7.0] {
            let closed = p_los_x_segment(t, base, a, 15.0);
            let fresh = link.p_los_facade(t);
            assert!(((closed - fresh) / fresh).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn poisson_truncation_examples() {
        assert_eq!(truncation_for_mean(0.0, 0.01), 0);
        assert_eq!(truncation_for_mean(0.1, 0.01), 1);
        assert_eq!(truncation_for_mean(0.1, 0.001), 2);
        let mu = 15.0 * 10.0 / 58.0;
        let n = poisson_truncation_n(1.0 / 58.0, 15.0, 10.0, 1e-3);
        let cdf = |k: usize| poisson_weights(mu, k).iter().sum::<f64>();
        assert!(cdf(n) >= 1.0 - 1e-3 && cdf(n - 1) < 1.0 - 1e-3);
        assert_eq!(n, 9);
    }

    #[test]
    fn static_user_gets_static_probability() {
        let params = urban();
        let motion = UserMotion::new(Point2::new(0.0, 0.0), 0.0, 10.0, 13.0);
        let u = Uav::new(80.0, 90.0, 100.0, 1000.0);
        let r = expected_los_total(&params, &motion, &u, 1e-3).unwrap();
        let c = first_block_side(motion.start, &u, 13.0).unwrap();
        let p = p_los_static(motion.start, &u, Some(&c), params.lambda, &HeightModel::rayleigh(8.0));
        assert_eq!(r.n, 0);
        assert!((r.value - p * 10.0).abs() < 1e-12);
    }

    #[test]
    fn uav_over_own_street_is_always_visible() {
        let params = urban();
        let motion = UserMotion::new(Point2::new(0.0, 0.0), 12.0, 10.0, 13.0);
        let u = Uav::new(60.0, 8.0, 100.0, 1000.0);
        let r = expected_los_total(&params, &motion, &u, 1e-3).unwrap();
        assert_eq!(r.value, 10.0);
    }

    #[test]
    fn plan_rejects_overlaps() {
        let e = |a, b| GapEvent { t_a: a, t_b: b, gap_start: 0.0, gap_end: 1.0 };
        assert!(SegmentPlan::new(10.0, vec![e(1.0, 3.0), e(2.0, 4.0)]).is_err());
        assert!(SegmentPlan::new(10.0, vec![e(1.0, 11.0)]).is_err());
        let plan = SegmentPlan::new(10.0, vec![e(1.0, 3.0), e(5.0, 10.0)]).unwrap();
        let kinds: Vec<_> = plan.segments().iter().map(|s| s.orientation).collect();
        use Orientation::*;
        assert_eq!(kinds, vec![ParallelX, ParallelY, ParallelX, ParallelY]);
    }

    #[test]
    fn canonical_gaps_fit_inside_the_sweep() {
        let params = urban();
        let motion = UserMotion::new(Point2::new(0.0, 0.0), 15.0, 10.0, 13.0);
        let u = Uav::new(120.0, 100.0, 100.0, 1000.0);
        let (c0, c1) = crossing_span(&motion, &u);
        for ell in 1..12 {
            let gaps = canonical_gaps(&params, &motion, &u, ell);
            assert_eq!(gaps.len(), ell);
            assert!(gaps.windows(2).all(|w| w[0].1 < w[1].0));
            assert!(gaps[0].0 > c0 && gaps[ell - 1].1 < c1);
            let plan = plan_from_gaps(&motion, &u, &gaps).unwrap();
            assert_eq!(plan.events.len(), ell);
        }
    }
}
