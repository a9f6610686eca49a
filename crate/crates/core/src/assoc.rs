//! User-UAV association.
//!
//! Both policies run the same capacity-aware greedy engine over a score
//! matrix: the globally best remaining (user, UAV) pair is fixed first.
//! The proposed policy scores pairs by expected LoS time over the
//! coverage window; the benchmark prefers the nearest UAV that is in LoS
//! at `t = 0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{sample_grid, GridParams, Point2, Uav, UrbanGrid, UserMotion};
use crate::error::{Error, Result};
use crate::mobility::expected_los_total;
use crate::oracle::{is_los, los_time, trial_seed, TrialStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    Proposed,
    Benchmark,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    /// `pairs[i] = (i, uav)` for every user, in user order.
    pub pairs: Vec<(usize, Option<usize>)>,
    pub policy: Policy,
}

impl Assignment {
    pub fn uav_of(&self, user: usize) -> Option<usize> {
        self.pairs[user].1
    }

    /// Users served by each UAV.
    pub fn loads(&self, uavs: usize) -> Vec<usize> {
        let mut load = vec![0; uavs];
        for (_, j) in &self.pairs {
            if let Some(j) = j {
                load[*j] += 1;
            }
        }
        load
    }
}

/// Greedy matching on `scores[user][uav]`; `None` marks a forbidden pair.
/// Higher scores win; ties go to the lower user id, then the lower UAV id.
pub fn greedy(scores: &[Vec<Option<f64>>], capacity: usize) -> Vec<Option<usize>> {
    let mut cand: Vec<(f64, usize, usize)> = scores
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().filter_map(move |(j, s)| s.map(|s| (s, i, j))))
        .collect();
    cand.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let uavs = scores.iter().map(Vec::len).max().unwrap_or(0);
    let mut load = vec![0; uavs];
    let mut out = vec![None; scores.len()];
    for (_, i, j) in cand {
        if out[i].is_none() && load[j] < capacity {
            out[i] = Some(j);
            load[j] += 1;
        }
    }
    out
}

fn assignment(choice: Vec<Option<usize>>, policy: Policy) -> Assignment {
    Assignment { pairs: choice.into_iter().enumerate().collect(), policy }
}

/// Expected LoS time of every user with every UAV.
pub fn score_matrix(
    users: &[UserMotion],
    uavs: &[Uav],
    params: &GridParams,
    epsilon: f64,
) -> Result<Vec<Vec<f64>>> {
    users
        .par_iter()
        .map(|m| uavs.iter().map(|u| expected_los_total(params, m, u, epsilon).map(|r| r.value)).collect())
        .collect()
}

/// Proposed policy from the statistical model alone.
pub fn assign_proposed(
    users: &[UserMotion],
    uavs: &[Uav],
    params: &GridParams,
    epsilon: f64,
    capacity: usize,
) -> Result<Assignment> {
    let scores = score_matrix(users, uavs, params, epsilon)?;
    Ok(proposed_from_scores(&scores, None, capacity))
}

/// Proposed policy on a known city: pairs without LoS at `t = 0` are
/// excluded, as for the benchmark.
pub fn assign_proposed_on_grid(
    users: &[UserMotion],
    uavs: &[Uav],
    params: &GridParams,
    epsilon: f64,
    capacity: usize,
    grid: &UrbanGrid,
) -> Result<Assignment> {
    let scores = score_matrix(users, uavs, params, epsilon)?;
    let visible = visibility(users, uavs, grid)?;
    Ok(proposed_from_scores(&scores, Some(&visible), capacity))
}

fn proposed_from_scores(scores: &[Vec<f64>], visible: Option<&[Vec<bool>]>, capacity: usize) -> Assignment {
    let masked: Vec<Vec<Option<f64>>> = scores
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &s)| (s > 0.0 && visible.is_none_or(|v| v[i][j])).then_some(s))
                .collect()
        })
        .collect();
    assignment(greedy(&masked, capacity), Policy::Proposed)
}

/// In range and in LoS at `t = 0`, per pair.
fn visibility(users: &[UserMotion], uavs: &[Uav], grid: &UrbanGrid) -> Result<Vec<Vec<bool>>> {
    users
        .iter()
        .map(|m| {
            uavs.iter()
                .map(|u| Ok(u.distance_3d(m.start) <= u.range && is_los(grid, m.start, u)?))
                .collect()
        })
        .collect()
}

/// Nearest UAV (3D distance) in LoS and in range at `t = 0`.
pub fn assign_benchmark(
    users: &[UserMotion],
    uavs: &[Uav],
    grid: &UrbanGrid,
    capacity: usize,
) -> Result<Assignment> {
    let visible = visibility(users, uavs, grid)?;
    let scores: Vec<Vec<Option<f64>>> = users
        .iter()
        .enumerate()
        .map(|(i, m)| {
            uavs.iter()
                .enumerate()
                .map(|(j, u)| visible[i][j].then(|| -u.distance_3d(m.start)))
                .collect()
        })
        .collect();
    Ok(assignment(greedy(&scores, capacity), Policy::Benchmark))
}

/// Realized LoS seconds summed over the assigned users.
pub fn realized_total(
    assignment: &Assignment,
    grid: &UrbanGrid,
    users: &[UserMotion],
    uavs: &[Uav],
) -> Result<f64> {
    let mut total = 0.0;
    for &(i, j) in &assignment.pairs {
        if let Some(j) = j {
            total += los_time(grid, &users[i], &uavs[j])?.total();
        }
    }
    Ok(total)
}

/// Random multi-user scene used for policy comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssocScenario {
    pub users: usize,
    pub uavs: usize,
    pub uav_height: f64,
    /// Maximum 3D link distance, m.
    pub range: f64,
    pub speed: f64,
    pub epoch: f64,
    /// Users start within this distance of the origin along each axis.
    pub spread: f64,
    pub capacity: usize,
    pub epsilon: f64,
}

impl AssocScenario {
    pub fn validate(&self, params: &GridParams) -> Result<()> {
        let r = params.region;
        let ok = self.users >= 1
            && self.uavs >= 1
            && self.capacity >= 1
            && self.uav_height > 0.0
            && self.range > self.uav_height
            && self.speed >= 0.0
            && self.epoch > 0.0
            && self.spread >= 0.0
            && self.spread < 0.5 * r.width().min(r.height());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("invalid association scenario {self:?}")))
        }
    }

    /// Users on the centre lines of the city's X-running streets, UAVs
    /// uniform over the region.
    pub fn realize(&self, grid: &UrbanGrid, seed: u64) -> Result<(Vec<UserMotion>, Vec<Uav>)> {
        let r = grid.params.region;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let all: Vec<(f64, f64)> = (0..grid.y_cells())
            .map(|j| {
                let (low, split, _) = grid.y_cell(j);
                (low, split - low)
            })
            .collect();
        let centre = |&(low, w): &(f64, f64)| (low + 0.5 * w).abs();
        let mut streets: Vec<_> = all.iter().copied().filter(|s| centre(s) <= self.spread).collect();
        if streets.is_empty() {
            // fall back to the street closest to the origin
            let nearest = all.iter().copied().min_by(|a, b| centre(a).total_cmp(&centre(b)));
            streets.extend(nearest);
        }
        if streets.is_empty() {
            // no y points: the whole region is open ground
            let w = grid.params.mu_s;
            streets.push((-0.5 * w, w));
        }
        let users = (0..self.users)
            .map(|_| {
                let (low, w) = streets[rng.random_range(0..streets.len())];
                let x = rng.random_range(-self.spread..=self.spread);
                UserMotion::new(Point2::new(x, low + 0.5 * w), self.speed, self.epoch, w).with_lane_offset(0.5 * w)
            })
            .collect();
        let uavs = (0..self.uavs)
            .map(|_| {
                let x = rng.random_range(r.x_min..r.x_max);
                let y = rng.random_range(r.y_min..r.y_max);
                Uav::new(x, y, self.uav_height, self.range)
            })
            .collect();
        Ok((users, uavs))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairedEvaluation {
    pub proposed: TrialStats,
    pub benchmark: TrialStats,
    /// Proposed minus benchmark, per trial.
    pub difference: TrialStats,
    pub ci95: (f64, f64),
}

/// Both policies on the same sampled cities and scenes.
pub fn evaluate_policies(
    params: &GridParams,
    scenario: &AssocScenario,
    trials: usize,
    seed: u64,
) -> Result<PairedEvaluation> {
    params.validate()?;
    scenario.validate(params)?;
    let pairs: Vec<(f64, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let s = trial_seed(seed, i);
            let grid = sample_grid(params, s)?;
            let (users, uavs) = scenario.realize(&grid, s)?;
            let proposed = assign_proposed_on_grid(&users, &uavs, params, scenario.epsilon, scenario.capacity, &grid)?;
            let benchmark = assign_benchmark(&users, &uavs, &grid, scenario.capacity)?;
            Ok((realized_total(&proposed, &grid, &users, &uavs)?, realized_total(&benchmark, &grid, &users, &uavs)?))
        })
        .collect::<Result<_>>()?;
    Ok(paired(&pairs, seed))
}

/// Paired statistics with a normal 95% interval on the mean difference.
pub fn paired(pairs: &[(f64, f64)], seed: u64) -> PairedEvaluation {
    let p: Vec<f64> = pairs.iter().map(|x| x.0).collect();
    let b: Vec<f64> = pairs.iter().map(|x| x.1).collect();
    let d: Vec<f64> = pairs.iter().map(|x| x.0 - x.1).collect();
    let difference = TrialStats::from_samples(&d, seed);
    let half = 1.959_963_984_540_054 * difference.stderr;
    PairedEvaluation {
        proposed: TrialStats::from_samples(&p, seed),
        benchmark: TrialStats::from_samples(&b, seed),
        difference,
        ci95: (difference.mean - half, difference.mean + half),
    }
}
