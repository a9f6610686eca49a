//! Exact line of sight on sampled cities and Monte Carlo estimates.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{sample_grid_anchored, Anchor, Building, GridParams, Point2, Uav, UrbanGrid, UserMotion};
use crate::error::{Error, Result};

/// Part of the epoch the user spends inside the coverage disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageWindow {
    pub start: f64,
    pub end: f64,
}

impl CoverageWindow {
    pub fn len(&self) -> f64 {
        (self.end - self.start).max(0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() <= 0.0
    }
}

/// Coverage window of `motion` with respect to `u`. Empty windows have
/// `start == end`.
pub fn coverage_window(motion: &UserMotion, u: &Uav) -> CoverageWindow {
    let none = CoverageWindow { start: 0.0, end: 0.0 };
    let r = u.coverage_radius();
    if !(r > 0.0) {
        return none;
    }
    let dx = motion.start.x - u.x;
    let dy = motion.start.y - u.y;
    let c = dx * dx + dy * dy - r * r;
    let v = motion.speed;
    if v == 0.0 {
        return if c <= 0.0 { CoverageWindow { start: 0.0, end: motion.epoch } } else { none };
    }
    // |dx + v t|^2 + dy^2 <= r^2
    let half_chord2 = r * r - dy * dy;
    if half_chord2 < 0.0 {
        return none;
    }
    let half = half_chord2.sqrt();
    let t_in = ((-dx - half) / v).max(0.0);
    let t_out = ((-dx + half) / v).min(motion.epoch);
    if t_out > t_in {
        CoverageWindow { start: t_in, end: t_out }
    } else {
        none
    }
}

/// Seconds of the epoch spent inside the coverage disk.
pub fn coverage_time(motion: &UserMotion, u: &Uav) -> f64 {
    coverage_window(motion, u).len()
}

/// Exact line of sight from ground point `g` to `u`.
///
/// A building blocks when the link's height where it enters the
/// footprint does not exceed the roof; a link grazing a roof edge is
/// blocked.
pub fn is_los(grid: &UrbanGrid, g: Point2, u: &Uav) -> Result<bool> {
    if grid.is_inside_building(g) {
        return Err(Error::InsideBuilding { x: g.x, y: g.y });
    }
    Ok(grid
        .entries(g, u.ground())
        .iter()
        .all(|e| u.h * e.s > e.building.height))
}

/// Union of time intervals, sorted and disjoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LosIntervalSet {
    pub intervals: Vec<(f64, f64)>,
    /// Coverage window the intervals are measured in (epoch time).
    pub window: CoverageWindow,
}

impl LosIntervalSet {
    pub fn total(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, t: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| t >= a && t <= b)
    }
}

/// Entry parameter of the segment `g -> u` into the open footprint of `b`.
fn entry_param(b: &Building, g: Point2, u: Point2) -> Option<f64> {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for (p, d, min, max) in [(g.x, u.x - g.x, b.x0, b.x1), (g.y, u.y - g.y, b.y0, b.y1)] {
        if d == 0.0 {
            if !(p > min && p < max) {
                return None;
            }
        } else {
            let (s0, s1) = ((min - p) / d, (max - p) / d);
            let (s0, s1) = if s0 < s1 { (s0, s1) } else { (s1, s0) };
            lo = lo.max(s0);
            hi = hi.min(s1);
        }
    }
    (lo < hi).then_some(lo)
}

fn blocks(b: &Building, g: Point2, u: &Uav) -> bool {
    entry_param(b, g, u.ground()).is_some_and(|s| u.h * s <= b.height)
}

/// Blocked sub-intervals of `[0, t_end]` caused by one building.
fn blocked_by(b: &Building, motion: &UserMotion, u: &Uav, t_end: f64) -> Vec<(f64, f64)> {
    let v = motion.speed;
    let y0 = motion.start.y;
    let at = |t: f64| blocks(b, motion.position(t), u);
    if v == 0.0 {
        return if at(0.0) { vec![(0.0, t_end)] } else { Vec::new() };
    }
    // Between the times at which the link passes a corner the entry edge
    // is fixed and its height moves monotonically.
    let mut cuts = vec![0.0, t_end];
    for (cx, cy) in [(b.x0, b.y0), (b.x0, b.y1), (b.x1, b.y0), (b.x1, b.y1)] {
        if cy == u.y {
            continue;
        }
        let x = u.x + (cx - u.x) * (y0 - u.y) / (cy - u.y);
        let t = (x - motion.start.x) / v;
        if t > 0.0 && t < t_end {
            cuts.push(t);
        }
    }
    for x in [b.x0, b.x1, u.x] {
        let t = (x - motion.start.x) / v;
        if t > 0.0 && t < t_end {
            cuts.push(t);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut add = |a: f64, c: f64| {
        if c <= a {
            return;
        }
        match out.last_mut() {
            Some(last) if last.1 >= a => last.1 = last.1.max(c),
            _ => out.push((a, c)),
        }
    };
    for w in cuts.windows(2) {
        let (a, c) = (w[0], w[1]);
        let nudge = (c - a) * 1e-9;
        let (ba, bc) = (at(a + nudge), at(c - nudge));
        match (ba, bc) {
            (true, true) => add(a, c),
            (false, false) => {}
            (first, _) => {
                // one switch inside the piece
                let (mut lo, mut hi) = (a + nudge, c - nudge);
                while hi - lo > 1e-10 * (1.0 + hi.abs()) {
                    let m = 0.5 * (lo + hi);
                    if at(m) == first {
                        lo = m;
                    } else {
                        hi = m;
                    }
                }
                let t = 0.5 * (lo + hi);
                if first {
                    add(a, t)
                } else {
                    add(t, c)
                }
            }
        }
    }
    out
}

fn union(mut v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// Exact LoS intervals of `motion` with `u` inside the coverage window,
/// in epoch time.
pub fn los_time(grid: &UrbanGrid, motion: &UserMotion, u: &Uav) -> Result<LosIntervalSet> {
    let window = coverage_window(motion, u);
    if window.is_empty() {
        return Ok(LosIntervalSet { intervals: Vec::new(), window });
    }
    let eff = motion.shifted(window.start, window.len());
    let (g0, g1) = (eff.position(0.0), eff.position(eff.epoch));
    for g in [g0, g1] {
        if grid.is_inside_building(g) {
            return Err(Error::InsideBuilding { x: g.x, y: g.y });
        }
    }
    let t_end = eff.epoch;
    let x_lo = g0.x.min(u.x);
    let x_hi = g1.x.max(u.x);
    let y_lo = g0.y.min(u.y);
    let y_hi = g0.y.max(u.y);
    let blocked: Vec<(f64, f64)> = grid
        .buildings_in(x_lo, x_hi, y_lo, y_hi)
        .iter()
        .flat_map(|b| blocked_by(b, &eff, u, t_end))
        .collect();
    let blocked = union(blocked);
    let mut intervals = Vec::new();
    let mut cursor = 0.0;
    for (a, b) in blocked {
        if a > cursor {
            intervals.push((cursor, a));
        }
        cursor = cursor.max(b);
    }
    if cursor < t_end {
        intervals.push((cursor, t_end));
    }
    let intervals = intervals
        .into_iter()
        .map(|(a, b)| (a + window.start, b + window.start))
        .collect();
    Ok(LosIntervalSet { intervals, window })
}

/// LoS seconds found by sampling `is_los` every `dt` seconds. Slow;
/// used to cross-check [`los_time`].
pub fn los_time_sampled(grid: &UrbanGrid, motion: &UserMotion, u: &Uav, dt: f64) -> Result<f64> {
    let window = coverage_window(motion, u);
    let steps = (window.len() / dt).ceil() as usize;
    if steps == 0 {
        return Ok(0.0);
    }
    let h = window.len() / steps as f64;
    let mut total = 0.0;
    for k in 0..steps {
        let t = window.start + (k as f64 + 0.5) * h;
        if is_los(grid, motion.position(t), u)? {
            total += h;
        }
    }
    Ok(total)
}

/// How sampled cities are tied to the scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Conditioning {
    /// Plain samples; trials with the user inside a building are rejected.
    None,
    /// The user's street is forced to match the scenario.
    Street,
    /// Street forced and a facade where the link first leaves it.
    Link,
}

/// Per-trial seed, decorrelated from the base seed and trial index.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    let mut z = seed ^ trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn anchor_for(conditioning: Conditioning, motion: &UserMotion, u: &Uav) -> Anchor {
    let window = coverage_window(motion, u);
    let eff = motion.shifted(window.start, window.len().max(f64::MIN_POSITIVE));
    match conditioning {
        Conditioning::None => Anchor::default(),
        Conditioning::Street => Anchor { street: Some(motion.street), facade_x: None },
        Conditioning::Link => Anchor::for_link(&eff, u),
    }
}

const MAX_REJECTED_TRIALS: u64 = 1000;

/// Sample a city for trial `i`; unconditioned samples that put the user
/// inside a building are redrawn with the next sub-seed.
fn trial_grid(
    params: &GridParams,
    motion: &UserMotion,
    anchor: &Anchor,
    seed: u64,
    i: u64,
) -> Result<(u64, UrbanGrid)> {
    let base = trial_seed(seed, i);
    for k in 0..MAX_REJECTED_TRIALS {
        let s = if k == 0 { base } else { trial_seed(base, k) };
        let grid = sample_grid_anchored(params, s, anchor)?;
        let (a, b) = (motion.position(0.0), motion.position(motion.epoch));
        let clear = anchor.street.is_some()
            || !grid.buildings_in(a.x.min(b.x), a.x.max(b.x), a.y, a.y).iter().any(|bd| bd.y0 < a.y && a.y < bd.y1);
        if clear {
            return Ok((s, grid));
        }
    }
    Err(Error::Conditioning { attempts: MAX_REJECTED_TRIALS as usize, reason: "user path keeps landing in buildings".into() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub grid_seed: u64,
    pub los_time: f64,
    pub coverage_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub mean: f64,
    /// Standard error of the mean.
    pub stderr: f64,
    pub trials: usize,
    pub seed: u64,
}

impl TrialStats {
    pub fn from_samples(samples: &[f64], seed: u64) -> Self {
        let n = samples.len();
        if n == 0 {
            return Self { mean: f64::NAN, stderr: f64::NAN, trials: 0, seed };
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, stderr, trials: n, seed }
    }
}

/// Exact LoS time of `trials` sampled cities. Results are identical for
/// a given seed regardless of thread count.
pub fn monte_carlo_trials(
    params: &GridParams,
    motion: &UserMotion,
    u: &Uav,
    trials: usize,
    seed: u64,
    conditioning: Conditioning,
) -> Result<Vec<TrialRecord>> {
    params.validate()?;
    motion.validate()?;
    let anchor = anchor_for(conditioning, motion, u);
    (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let (grid_seed, grid) = trial_grid(params, motion, &anchor, seed, i)?;
            let set = los_time(&grid, motion, u)?;
            Ok(TrialRecord { trial: i, grid_seed, los_time: set.total(), coverage_time: set.window.len() })
        })
        .collect()
}

/// Monte Carlo estimate of the expected LoS time, conditioned on the
/// scenario the analysis assumes.
pub fn monte_carlo_expected_los(
    params: &GridParams,
    motion: &UserMotion,
    u: &Uav,
    trials: usize,
    seed: u64,
) -> Result<TrialStats> {
    monte_carlo_expected_los_with(params, motion, u, trials, seed, Conditioning::Link)
}

pub fn monte_carlo_expected_los_with(
    params: &GridParams,
    motion: &UserMotion,
    u: &Uav,
    trials: usize,
    seed: u64,
    conditioning: Conditioning,
) -> Result<TrialStats> {
    let records = monte_carlo_trials(params, motion, u, trials, seed, conditioning)?;
    let samples: Vec<f64> = records.iter().map(|r| r.los_time).collect();
    Ok(TrialStats::from_samples(&samples, seed))
}

/// Share of sampled cities with LoS at the user's start point.
pub fn monte_carlo_los_fraction(
    params: &GridParams,
    motion: &UserMotion,
    u: &Uav,
    trials: usize,
    seed: u64,
    conditioning: Conditioning,
) -> Result<TrialStats> {
    params.validate()?;
    let anchor = anchor_for(conditioning, &motion.shifted(0.0, motion.epoch), u);
    let still = UserMotion { speed: 0.0, ..*motion };
    let hits: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let (_, grid) = trial_grid(params, &still, &anchor, seed, i)?;
            Ok(if is_los(&grid, motion.start, u)? { 1.0 } else { 0.0 })
        })
        .collect::<Result<_>>()?;
    Ok(TrialStats::from_samples(&hits, seed))
}

/// Write one JSON object per trial.
pub fn write_trials_jsonl<W: Write>(records: &[TrialRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
