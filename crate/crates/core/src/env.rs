//! Manhattan Poisson line process city.
//!
//! Two independent homogeneous Poisson point processes, one per axis,
//! cut the plane into cells. Along each axis a cell `[p_k, p_{k+1})` is a
//! street band `[p_k, p_k + f_s L)` followed by a building band, where
//! `f_s = mu_s / (mu_b + mu_s)` and `L` is the cell length. A building is
//! the product of an x building band and a y building band and carries a
//! Rayleigh distributed height.
//!
//! Space not bounded by two sampled points on an axis is open: a grid
//! with no points inside its region has no buildings at all. When the
//! region does hold points, the sampler also draws the nearest point
//! beyond each boundary so the edge cells are complete.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mobility::{plan_from_gaps, SegmentPlan};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Axis-aligned rectangle, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Region {
    /// `width x height` rectangle centred on the origin.
    pub fn centered(width: f64, height: f64) -> Self {
        Self {
            x_min: -0.5 * width,
            x_max: 0.5 * width,
            y_min: -0.5 * height,
            y_max: 0.5 * height,
        }
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }
}

/// Distribution parameters of the city.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    /// Point density per axis, 1/m. Always `1 / (mu_b + mu_s)`.
    pub lambda: f64,
    /// Mean building width, m.
    pub mu_b: f64,
    /// Mean street width, m.
    pub mu_s: f64,
    /// Rayleigh scale of building heights, m.
    pub sigma: f64,
    pub region: Region,
}

impl GridParams {
    pub fn new(mu_b: f64, mu_s: f64, sigma: f64, region: Region) -> Result<Self> {
        let params = Self { lambda: 1.0 / (mu_b + mu_s), mu_b, mu_s, sigma, region };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParams(format!("{name} must be finite and > 0, got {v}")))
            }
        };
        positive("mu_b", self.mu_b)?;
        positive("mu_s", self.mu_s)?;
        positive("sigma", self.sigma)?;
        positive("region width", self.region.width())?;
        positive("region height", self.region.height())?;
        let expected = 1.0 / (self.mu_b + self.mu_s);
        if ((self.lambda - expected) / expected).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!(
                "lambda = {} but 1/(mu_b + mu_s) = {expected}",
                self.lambda
            )));
        }
        Ok(())
    }

    /// Share of every cell taken by its street band.
    pub fn street_fraction(&self) -> f64 {
        self.mu_s / (self.mu_b + self.mu_s)
    }

    pub fn building_fraction(&self) -> f64 {
        self.mu_b / (self.mu_b + self.mu_s)
    }

    /// Mean of Rayleigh(sigma).
    pub fn mean_height(&self) -> f64 {
        self.sigma * (std::f64::consts::FRAC_PI_2).sqrt()
    }
}

/// UAV hovering at `(x, y, h)` with a maximum 3D link distance `range`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Uav {
    pub x: f64,
    pub y: f64,
    pub h: f64,
    pub range: f64,
}

impl Uav {
    pub fn new(x: f64, y: f64, h: f64, range: f64) -> Self {
        Self { x, y, h, range }
    }

    pub fn ground(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    /// Radius of the ground disk the UAV can serve; zero when the range
    /// does not reach the ground.
    pub fn coverage_radius(&self) -> f64 {
        if self.range > self.h {
            (self.range * self.range - self.h * self.h).sqrt()
        } else {
            0.0
        }
    }

    pub fn distance_3d(&self, g: Point2) -> f64 {
        let d = self.ground().dist(g);
        d.hypot(self.h)
    }
}

/// A street running along X: the band `low <= y < low + width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StreetBand {
    pub low: f64,
    pub width: f64,
}

impl StreetBand {
    pub fn high(&self) -> f64 {
        self.low + self.width
    }
}

/// Ground user moving along +X at constant speed for one epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserMotion {
    pub start: Point2,
    /// m/s, >= 0
    pub speed: f64,
    /// s, > 0
    pub epoch: f64,
    /// The street the user travels on; `start.y` lies inside it.
    pub street: StreetBand,
}

impl UserMotion {
    /// User on the low edge of a street of width `street_width`.
    pub fn new(start: Point2, speed: f64, epoch: f64, street_width: f64) -> Self {
        Self { start, speed, epoch, street: StreetBand { low: start.y, width: street_width } }
    }

    /// Move the user `offset` meters into the street from its low edge.
    pub fn with_lane_offset(mut self, offset: f64) -> Self {
        self.street.low = self.start.y - offset;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.speed >= 0.0 && self.speed.is_finite()) {
            return Err(Error::InvalidParams(format!("speed must be >= 0, got {}", self.speed)));
        }
        if !(self.epoch > 0.0 && self.epoch.is_finite()) {
            return Err(Error::InvalidParams(format!("epoch must be > 0, got {}", self.epoch)));
        }
        if !(self.street.width > 0.0) {
            return Err(Error::InvalidParams("street width must be > 0".into()));
        }
        let y = self.start.y;
        if y < self.street.low || y > self.street.high() {
            return Err(Error::InvalidParams(format!(
                "user y = {y} is outside its street [{}, {}]",
                self.street.low,
                self.street.high()
            )));
        }
        Ok(())
    }

    pub fn position(&self, t: f64) -> Point2 {
        Point2::new(self.start.x + self.speed * t, self.start.y)
    }

    /// Same street and speed, starting `t0` seconds later for `epoch` seconds.
    pub fn shifted(&self, t0: f64, epoch: f64) -> Self {
        Self { start: self.position(t0), epoch, ..*self }
    }

    /// Distance from the user to the street edge that faces `uav_y`.
    pub fn facing_edge_distance(&self, uav_y: f64) -> f64 {
        if uav_y >= self.start.y {
            self.street.high() - self.start.y
        } else {
            self.start.y - self.street.low
        }
    }
}

/// Wall orientation. `ParallelX` walls are lines `y = const`,
/// `ParallelY` walls are lines `x = const`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    ParallelX,
    ParallelY,
}

/// First building wall crossed by the ground projection of a link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstBlockSide {
    pub point: Point2,
    pub orientation: Orientation,
}

/// Where the projected link from `g` toward `u` leaves the user's street,
/// when `w` is the distance from `g` to the street edge facing the UAV.
///
/// Returns `None` when the UAV hovers over the street itself: the
/// projected link never reaches a facade.
pub fn first_block_side(g: Point2, u: &Uav, w: f64) -> Option<FirstBlockSide> {
    let dy = u.y - g.y;
    if dy.abs() <= w {
        return None;
    }
    let ratio = w / dy.abs();
    Some(FirstBlockSide {
        point: Point2::new(g.x + (u.x - g.x) * ratio, g.y + w * dy.signum()),
        orientation: Orientation::ParallelX,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    Street,
    Building,
}

/// Solid block occupying `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Building {
    pub cell: (usize, usize),
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub height: f64,
}

/// Building interior entered by a projected segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    /// Segment parameter in `[0, 1]` of the entry point.
    pub s: f64,
    pub point: Point2,
    pub orientation: Orientation,
    pub building: Building,
}

/// One realized city.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UrbanGrid {
    pub params: GridParams,
    pub seed: u64,
    /// Sorted, strictly increasing.
    pub x_points: Vec<f64>,
    pub y_points: Vec<f64>,
    /// `block_heights[i][j]` for x cell `i` and y cell `j`.
    pub block_heights: Vec<Vec<f64>>,
}

impl UrbanGrid {
    /// Assemble a grid from explicit parts and check its invariants.
    pub fn from_parts(
        params: GridParams,
        x_points: Vec<f64>,
        y_points: Vec<f64>,
        block_heights: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let grid = Self { params, seed: 0, x_points, y_points, block_heights };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        for (name, pts) in [("x_points", &self.x_points), ("y_points", &self.y_points)] {
            if pts.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::InvalidParams(format!("{name} must be strictly increasing")));
            }
        }
        let (nx, ny) = (self.x_cells(), self.y_cells());
        if self.block_heights.len() != nx || self.block_heights.iter().any(|r| r.len() != ny) {
            return Err(Error::InvalidParams(format!("block_heights must be {nx} x {ny}")));
        }
        if self.block_heights.iter().flatten().any(|h| !(*h >= 0.0)) {
            return Err(Error::InvalidParams("block heights must be >= 0".into()));
        }
        Ok(())
    }

    pub fn street_fraction(&self) -> f64 {
        self.params.street_fraction()
    }

    pub fn x_cells(&self) -> usize {
        self.x_points.len().saturating_sub(1)
    }

    pub fn y_cells(&self) -> usize {
        self.y_points.len().saturating_sub(1)
    }

    /// `(street start, building start, cell end)` of x cell `i`.
    pub fn x_cell(&self, i: usize) -> (f64, f64, f64) {
        cell_bounds(&self.x_points, i, self.street_fraction())
    }

    pub fn y_cell(&self, j: usize) -> (f64, f64, f64) {
        cell_bounds(&self.y_points, j, self.street_fraction())
    }

    pub fn locate_x(&self, x: f64) -> Option<(usize, Band)> {
        locate(&self.x_points, x, self.street_fraction())
    }

    pub fn locate_y(&self, y: f64) -> Option<(usize, Band)> {
        locate(&self.y_points, y, self.street_fraction())
    }

    pub fn building(&self, i: usize, j: usize) -> Building {
        let (_, x0, x1) = self.x_cell(i);
        let (_, y0, y1) = self.y_cell(j);
        Building { cell: (i, j), x0, x1, y0, y1, height: self.block_heights[i][j] }
    }

    /// Building whose footprint contains `p` (boundary included).
    pub fn building_at(&self, p: Point2) -> Option<Building> {
        match (self.locate_x(p.x), self.locate_y(p.y)) {
            (Some((i, Band::Building)), Some((j, Band::Building))) => Some(self.building(i, j)),
            _ => None,
        }
    }

    /// True when `p` is strictly inside some building footprint.
    pub fn is_inside_building(&self, p: Point2) -> bool {
        self.building_at(p)
            .is_some_and(|b| p.x > b.x0 && p.x < b.x1 && p.y > b.y0 && p.y < b.y1)
    }

    /// The X-running street band containing `y`, if any.
    pub fn street_band_at(&self, y: f64) -> Option<StreetBand> {
        match self.locate_y(y)? {
            (j, Band::Street) => {
                let (low, high, _) = self.y_cell(j);
                Some(StreetBand { low, width: high - low })
            }
            _ => None,
        }
    }

    /// Buildings whose footprint meets the closed box.
    pub fn buildings_in(&self, x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Vec<Building> {
        let (nx, ny) = (self.x_cells(), self.y_cells());
        if nx == 0 || ny == 0 {
            return Vec::new();
        }
        let xr = cell_range(&self.x_points, x_lo, x_hi);
        let yr = cell_range(&self.y_points, y_lo, y_hi);
        let mut out = Vec::new();
        for i in xr {
            let (_, bx0, bx1) = self.x_cell(i);
            if bx1 < x_lo || bx0 > x_hi {
                continue;
            }
            for j in yr.clone() {
                let (_, by0, by1) = self.y_cell(j);
                if by1 < y_lo || by0 > y_hi {
                    continue;
                }
                out.push(self.building(i, j));
            }
        }
        out
    }

    /// Building interiors crossed by the segment `a -> b`, in order of
    /// entry. A segment that only touches a wall does not enter.
    pub fn entries(&self, a: Point2, b: Point2) -> Vec<Entry> {
        let mut out: Vec<Entry> = Vec::new();
        if self.x_cells() == 0 || self.y_cells() == 0 {
            return out;
        }
        // Break the segment at every band edge it crosses.
        let mut cuts: Vec<(f64, Orientation)> = vec![(0.0, Orientation::ParallelY)];
        push_cuts(&mut cuts, &self.x_points, self.street_fraction(), a.x, b.x, Orientation::ParallelY);
        push_cuts(&mut cuts, &self.y_points, self.street_fraction(), a.y, b.y, Orientation::ParallelX);
        cuts.push((1.0, Orientation::ParallelY));
        cuts.sort_by(|p, q| p.0.total_cmp(&q.0));

        let at = |s: f64| Point2::new(a.x + (b.x - a.x) * s, a.y + (b.y - a.y) * s);
        let mut inside: Option<(usize, usize)> = None;
        for k in 0..cuts.len() - 1 {
            let (s0, kind) = cuts[k];
            let s1 = cuts[k + 1].0;
            if s1 <= s0 {
                continue;
            }
            let mid = at(0.5 * (s0 + s1));
            let here = self.building_at(mid);
            match here {
                Some(bld) if inside != Some(bld.cell) => {
                    let orientation = if s0 == 0.0 { start_orientation(&bld, a) } else { kind };
                    out.push(Entry { s: s0, point: at(s0), orientation, building: bld });
                    inside = Some(bld.cell);
                }
                Some(_) => {}
                None => inside = None,
            }
        }
        out
    }

    /// First building wall crossed on the way from `g` to the UAV.
    pub fn first_block_side(&self, g: Point2, u: &Uav) -> Option<FirstBlockSide> {
        self.entries(g, u.ground())
            .first()
            .map(|e| FirstBlockSide { point: e.point, orientation: e.orientation })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let grid: Self = serde_json::from_str(s)?;
        grid.validate()?;
        Ok(grid)
    }
}

fn start_orientation(b: &Building, a: Point2) -> Orientation {
    if a.y == b.y0 || a.y == b.y1 {
        Orientation::ParallelX
    } else {
        Orientation::ParallelY
    }
}

fn cell_bounds(points: &[f64], i: usize, street_fraction: f64) -> (f64, f64, f64) {
    let (lo, hi) = (points[i], points[i + 1]);
    (lo, lo + street_fraction * (hi - lo), hi)
}

fn locate(points: &[f64], v: f64, street_fraction: f64) -> Option<(usize, Band)> {
    if points.len() < 2 || v < points[0] || v >= points[points.len() - 1] {
        return None;
    }
    let i = points.partition_point(|p| *p <= v) - 1;
    let (_, split, _) = cell_bounds(points, i, street_fraction);
    Some((i, if v < split { Band::Street } else { Band::Building }))
}

fn cell_range(points: &[f64], lo: f64, hi: f64) -> std::ops::Range<usize> {
    let cells = points.len().saturating_sub(1);
    let first = points.partition_point(|p| *p <= lo).saturating_sub(1);
    let last = points.partition_point(|p| *p < hi).min(cells);
    first.min(last)..last
}

fn push_cuts(
    cuts: &mut Vec<(f64, Orientation)>,
    points: &[f64],
    street_fraction: f64,
    from: f64,
    to: f64,
    kind: Orientation,
) {
    let delta = to - from;
    if delta == 0.0 || points.len() < 2 {
        return;
    }
    let (lo, hi) = if from < to { (from, to) } else { (to, from) };
    for i in cell_range(points, lo, hi) {
        let (s, b, e) = cell_bounds(points, i, street_fraction);
        for edge in [s, b, e] {
            if edge > lo && edge < hi {
                cuts.push(((edge - from) / delta, kind));
            }
        }
    }
}

/// Extra constraints on a sampled grid.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    /// Force an X-running street occupying exactly this band.
    pub street: Option<StreetBand>,
    /// Require this x coordinate to fall inside an x building band, so a
    /// facade stands where the projected link leaves the anchored street.
    pub facade_x: Option<f64>,
}

impl Anchor {
    /// Anchor describing the scenario the expected-time analysis assumes:
    /// the user's street as given and a facade at the first crossing.
    pub fn for_link(motion: &UserMotion, u: &Uav) -> Self {
        let w = motion.facing_edge_distance(u.y);
        let facade_x = first_block_side(motion.start, u, w).map(|c| c.point.x);
        Self { street: Some(motion.street), facade_x }
    }
}

const MAX_CONDITIONING_ATTEMPTS: usize = 10_000;

/// Sample an unconditioned city.
pub fn sample_grid(params: &GridParams, seed: u64) -> Result<UrbanGrid> {
    sample_grid_anchored(params, seed, &Anchor::default())
}

/// Sample a city subject to `anchor`. Deterministic in `(params, seed, anchor)`.
pub fn sample_grid_anchored(params: &GridParams, seed: u64, anchor: &Anchor) -> Result<UrbanGrid> {
    params.validate()?;
    let r = params.region;
    if r.width() <= params.mu_s || r.height() <= params.mu_s {
        return Err(Error::DegenerateGrid { width: r.width(), height: r.height(), street: params.mu_s });
    }
    let fs = params.street_fraction();
    let exp = Exp::new(params.lambda).map_err(|e| Error::InvalidParams(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut attempts = 0;
    let x_points = loop {
        attempts += 1;
        let pts = sample_axis(&mut rng, &exp, r.x_min, r.x_max);
        let Some(fx) = anchor.facade_x else { break pts };
        if locate(&pts, fx, fs).is_some_and(|(i, band)| {
            band == Band::Building && fx > cell_bounds(&pts, i, fs).1
        }) {
            break pts;
        }
        if attempts >= MAX_CONDITIONING_ATTEMPTS {
            return Err(Error::Conditioning {
                attempts,
                reason: format!("no x building band covers x = {fx}"),
            });
        }
    };

    let y_points = match anchor.street {
        None => sample_axis(&mut rng, &exp, r.y_min, r.y_max),
        Some(street) => {
            if !(street.width > 0.0) {
                return Err(Error::InvalidParams("anchored street width must be > 0".into()));
            }
            let top = street.low + street.width / fs;
            let mut below = Vec::new();
            let mut y = street.low;
            loop {
                y -= exp.sample(&mut rng);
                below.push(y);
                if y < r.y_min {
                    break;
                }
            }
            let mut pts: Vec<f64> = below.into_iter().rev().collect();
            pts.push(street.low);
            pts.push(top);
            let mut y = top;
            loop {
                y += exp.sample(&mut rng);
                pts.push(y);
                if y > r.y_max {
                    break;
                }
            }
            pts
        }
    };

    let nx = x_points.len().saturating_sub(1);
    let ny = y_points.len().saturating_sub(1);
    let block_heights = (0..nx)
        .map(|_| (0..ny).map(|_| rayleigh(&mut rng, params.sigma)).collect())
        .collect();
    Ok(UrbanGrid { params: *params, seed, x_points, y_points, block_heights })
}

fn sample_axis<R: Rng>(rng: &mut R, exp: &Exp<f64>, lo: f64, hi: f64) -> Vec<f64> {
    let before = lo - exp.sample(rng);
    let mut pts = vec![before];
    let mut x = lo + exp.sample(rng);
    while x <= hi {
        pts.push(x);
        x += exp.sample(rng);
    }
    if pts.len() == 1 {
        return Vec::new();
    }
    pts.push(x);
    pts
}

/// Rayleigh(sigma) by inversion.
pub fn rayleigh<R: Rng>(rng: &mut R, sigma: f64) -> f64 {
    let u: f64 = rng.random();
    sigma * (-2.0 * (1.0 - u).ln()).sqrt()
}

/// Event plan for a user moving along +X past the x street bands of
/// `grid`: each band `[P, Q]` the projected link's facade crossing sweeps
/// over yields one pair of user event times.
pub fn corner_events(grid: &UrbanGrid, motion: &UserMotion, u: &Uav) -> Result<SegmentPlan> {
    let w = motion.facing_edge_distance(u.y);
    let depth = (u.y - motion.start.y).abs();
    if depth <= w {
        return Err(Error::DegenerateGeometry(format!(
            "UAV at |dy| = {depth} m does not clear the street edge at {w} m"
        )));
    }
    let ratio = w / depth;
    let crossing = |t: f64| {
        let xt = motion.position(t).x;
        xt + (u.x - xt) * ratio
    };
    let (c0, c1) = (crossing(0.0), crossing(motion.epoch));
    let gaps: Vec<(f64, f64)> = cell_range(&grid.x_points, c0, c1)
        .map(|i| {
            let (p, q, _) = grid.x_cell(i);
            (p, q)
        })
        .collect();
    plan_from_gaps(motion, u, &gaps)
}
