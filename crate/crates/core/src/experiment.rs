//! Experiment configuration, sweeps, CSV output and validation suites.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::{p_los_static, p_los_static_generic, HeightModel};
use crate::assoc::{self, AssocScenario};
use crate::env::{first_block_side, sample_grid, GridParams, Point2, Region, Uav, UrbanGrid, UserMotion};
use crate::error::{Error, Result};
use crate::mobility::{self, expected_los_total_with, LayoutMode, TotalOptions};
use crate::oracle::{self, Conditioning};
use crate::quad;

pub const CSV_VERSION: &str = "v1";
pub const CSV_COLUMNS: &str = "sweep,series,value,t_min,analytic,mc_mean,mc_stderr,trials,runtime_ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Suburban,
    Urban,
    DenseUrban,
    Custom,
}

impl Preset {
    /// (mean building height, mean building width, mean street width), m.
    pub fn table(self) -> Option<(f64, f64, f64)> {
        match self {
            Preset::Suburban => Some((10.0, 37.0, 10.0)),
            Preset::Urban => Some((19.0, 45.0, 13.0)),
            Preset::DenseUrban => Some((25.0, 60.0, 20.0)),
            Preset::Custom => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Suburban => "suburban",
            Preset::Urban => "urban",
            Preset::DenseUrban => "dense_urban",
            Preset::Custom => "custom",
        }
    }
}

/// Fixed UAV position, m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UavPlacement {
    pub x: f64,
    pub y: f64,
    pub h: f64,
}

fn default_bearing() -> f64 {
    45.0
}
fn default_speed() -> f64 {
    15.0
}
fn default_street_widths() -> Vec<f64> {
    vec![10.0, 20.0]
}
fn default_users() -> usize {
    4
}
fn default_uavs() -> usize {
    6
}
fn default_assoc_height() -> f64 {
    100.0
}
fn default_spread() -> f64 {
    100.0
}
fn default_capacity() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Sweep {
    /// UAV height at a constant 3D distance from the user's start.
    UavHeight {
        values: Vec<f64>,
        distance_3d: f64,
        #[serde(default = "default_bearing")]
        bearing_deg: f64,
        #[serde(default = "default_speed")]
        speed: f64,
    },
    /// Building-to-street width ratio, one series per street width.
    BuildingRatio {
        values: Vec<f64>,
        #[serde(default = "default_street_widths")]
        street_widths: Vec<f64>,
        uav: UavPlacement,
        #[serde(default = "default_speed")]
        speed: f64,
    },
    /// User speed, m/s.
    Velocity { values: Vec<f64>, uav: UavPlacement },
    /// Policy comparison over user speed, m/s.
    Association {
        values: Vec<f64>,
        #[serde(default = "default_users")]
        users: usize,
        #[serde(default = "default_uavs")]
        uavs: usize,
        #[serde(default = "default_assoc_height")]
        uav_height: f64,
        #[serde(default = "default_spread")]
        spread: f64,
        #[serde(default = "default_capacity")]
        capacity: usize,
    },
}

impl Sweep {
    pub fn name(&self) -> &'static str {
        match self {
            Sweep::UavHeight { .. } => "uav_height",
            Sweep::BuildingRatio { .. } => "building_ratio",
            Sweep::Velocity { .. } => "velocity",
            Sweep::Association { .. } => "association",
        }
    }

    pub fn values(&self) -> &[f64] {
        match self {
            Sweep::UavHeight { values, .. }
            | Sweep::BuildingRatio { values, .. }
            | Sweep::Velocity { values, .. }
            | Sweep::Association { values, .. } => values,
        }
    }
}

fn default_sigma() -> f64 {
    8.0
}
fn default_region() -> f64 {
    400.0
}
fn default_trials() -> usize {
    10_000
}
fn default_epsilon() -> f64 {
    mobility::DEFAULT_EPSILON
}
fn default_epoch() -> f64 {
    10.0
}
fn default_range() -> f64 {
    250.0
}
fn default_layout() -> LayoutMode {
    LayoutMode::Canonical
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub preset: Preset,
    /// Overrides the preset; required for `custom`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_s: Option<f64>,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    /// Side of the square simulation region, m.
    #[serde(default = "default_region")]
    pub region: f64,
    pub sweep: Sweep,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Epoch length T, s.
    #[serde(default = "default_epoch")]
    pub epoch: f64,
    /// Maximum 3D link distance, m.
    #[serde(default = "default_range")]
    pub range: f64,
    #[serde(default = "default_layout")]
    pub layout: LayoutMode,
    /// Fill the runtime column. Off by default so output is reproducible.
    #[serde(default)]
    pub timing: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Widths `(mu_b, mu_s)` after overrides.
    pub fn widths(&self) -> Result<(f64, f64)> {
        let table = self.preset.table();
        let mu_b = self.mu_b.or(table.map(|t| t.1));
        let mu_s = self.mu_s.or(table.map(|t| t.2));
        match (mu_b, mu_s) {
            (Some(b), Some(s)) => Ok((b, s)),
            _ => Err(config_err("preset `custom` needs mu_b and mu_s")),
        }
    }

    pub fn params(&self) -> Result<GridParams> {
        let (mu_b, mu_s) = self.widths()?;
        GridParams::new(mu_b, mu_s, self.sigma, Region::centered(self.region, self.region))
            .map_err(|e| config_err(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(config_err(format!("{name} must be positive, got {v}")))
            }
        };
        positive("epoch", self.epoch)?;
        positive("range", self.range)?;
        positive("region", self.region)?;
        if self.trials == 0 {
            return Err(config_err("trials must be >= 1"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(config_err(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        let values = self.sweep.values();
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(config_err("sweep values must be a non-empty list of finite numbers"));
        }
        match &self.sweep {
            Sweep::UavHeight { values, distance_3d, speed, .. } => {
                positive("distance_3d", *distance_3d)?;
                if *speed < 0.0 {
                    return Err(config_err("speed must be >= 0"));
                }
                for &h in values {
                    if !(h > 0.0 && h < *distance_3d) {
                        return Err(config_err(format!("height {h} must lie in (0, distance_3d)")));
                    }
                }
            }
            Sweep::BuildingRatio { values, street_widths, uav, speed } => {
                if street_widths.is_empty() {
                    return Err(config_err("street_widths must not be empty"));
                }
                for &w in street_widths {
                    positive("street width", w)?;
                }
                for &r in values {
                    positive("building ratio", r)?;
                }
                positive("uav.h", uav.h)?;
                if *speed < 0.0 {
                    return Err(config_err("speed must be >= 0"));
                }
            }
            Sweep::Velocity { values, uav } => {
                positive("uav.h", uav.h)?;
                if values.iter().any(|&v| v < 0.0) {
                    return Err(config_err("velocities must be >= 0"));
                }
            }
            Sweep::Association { values, users, uavs, uav_height, spread, capacity } => {
                if values.iter().any(|&v| v < 0.0) {
                    return Err(config_err("velocities must be >= 0"));
                }
                let s = AssocScenario {
                    users: *users,
                    uavs: *uavs,
                    uav_height: *uav_height,
                    range: self.range,
                    speed: 0.0,
                    epoch: self.epoch,
                    spread: *spread,
                    capacity: *capacity,
                    epsilon: self.epsilon,
                };
                s.validate(&self.params()?).map_err(|e| config_err(e.to_string()))?;
            }
        }
        Ok(())
    }

    /// FNV-1a hash of the canonical JSON form, ignoring the output path.
    pub fn hash(&self) -> u64 {
        let mut c = self.clone();
        c.out = None;
        let json = serde_json::to_string(&c).expect("config serializes");
        json.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub sweep: String,
    pub series: String,
    pub value: f64,
    /// Coverage time, s; absent for association rows.
    pub t_min: Option<f64>,
    pub analytic: Option<f64>,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub trials: usize,
    pub runtime_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    pub csv: String,
    pub summary: String,
}

/// User on the centre line of a street of width `w`, starting at the origin.
fn centre_user(speed: f64, epoch: f64, w: f64) -> UserMotion {
    UserMotion::new(Point2::new(0.0, 0.0), speed, epoch, w).with_lane_offset(0.5 * w)
}

struct PointResult {
    t_min: f64,
    analytic: f64,
    mc: oracle::TrialStats,
}

fn evaluate_point(cfg: &ExperimentConfig, params: &GridParams, motion: &UserMotion, u: &Uav) -> Result<PointResult> {
    let opts = TotalOptions { epsilon: cfg.epsilon, layout: cfg.layout, model: None };
    let a = expected_los_total_with(params, motion, u, &opts)?;
    let mc = oracle::monte_carlo_expected_los(params, motion, u, cfg.trials, cfg.seed)?;
    Ok(PointResult { t_min: a.window.len(), analytic: a.value, mc })
}

/// Horizontal UAV position for the constant-distance height sweep.
pub fn height_sweep_uav(h: f64, distance_3d: f64, bearing_deg: f64, range: f64) -> Uav {
    let r = (distance_3d * distance_3d - h * h).sqrt();
    let b = bearing_deg * PI / 180.0;
    Uav::new(r * b.cos(), r * b.sin(), h, range)
}

/// Run the configured sweep. The output file, when configured, is
/// opened before any computation.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let file = match &cfg.out {
        Some(path) => Some(
            std::fs::File::create(path).map_err(|e| config_err(format!("cannot write {}: {e}", path.display())))?,
        ),
        None => None,
    };
    let params = cfg.params()?;
    let sweep = cfg.sweep.name().to_string();
    let mut rows = Vec::new();
    let mut push = |series: String, value: f64, t_min: Option<f64>, analytic: Option<f64>, mc: oracle::TrialStats, ms: f64| {
        rows.push(ResultRow {
            sweep: sweep.clone(),
            series,
            value,
            t_min,
            analytic,
            mc_mean: mc.mean,
            mc_stderr: mc.stderr,
            trials: mc.trials,
            runtime_ms: cfg.timing.then_some(ms),
        })
    };
    let geometry;
    match &cfg.sweep {
        Sweep::UavHeight { values, distance_3d, bearing_deg, speed } => {
            geometry = format!(
                "constant 3D distance {distance_3d} m at bearing {bearing_deg} deg; user speed {speed} m/s"
            );
            for &h in values {
                let start = Instant::now();
                let u = height_sweep_uav(h, *distance_3d, *bearing_deg, cfg.range);
                let p = evaluate_point(cfg, &params, &centre_user(*speed, cfg.epoch, params.mu_s), &u)?;
                push("main".into(), h, Some(p.t_min), Some(p.analytic), p.mc, ms(start));
            }
        }
        Sweep::BuildingRatio { values, street_widths, uav, speed } => {
            geometry = format!("UAV at ({}, {}, {}); user speed {speed} m/s", uav.x, uav.y, uav.h);
            for &w in street_widths {
                for &ratio in values {
                    let start = Instant::now();
                    let p_w = GridParams::new(ratio * w, w, cfg.sigma, params.region)
                        .map_err(|e| config_err(e.to_string()))?;
                    let u = Uav::new(uav.x, uav.y, uav.h, cfg.range);
                    let p = evaluate_point(cfg, &p_w, &centre_user(*speed, cfg.epoch, w), &u)?;
                    push(format!("street_{w}"), ratio, Some(p.t_min), Some(p.analytic), p.mc, ms(start));
                }
            }
        }
        Sweep::Velocity { values, uav } => {
            geometry = format!("UAV at ({}, {}, {})", uav.x, uav.y, uav.h);
            for &v in values {
                let start = Instant::now();
                let u = Uav::new(uav.x, uav.y, uav.h, cfg.range);
                let p = evaluate_point(cfg, &params, &centre_user(v, cfg.epoch, params.mu_s), &u)?;
                push("main".into(), v, Some(p.t_min), Some(p.analytic), p.mc, ms(start));
            }
        }
        Sweep::Association { values, users, uavs, uav_height, spread, capacity } => {
            geometry = format!(
                "{users} users within {spread} m of the origin, {uavs} UAVs at {uav_height} m, capacity {capacity}"
            );
            for &v in values {
                let start = Instant::now();
                let scenario = AssocScenario {
                    users: *users,
                    uavs: *uavs,
                    uav_height: *uav_height,
                    range: cfg.range,
                    speed: v,
                    epoch: cfg.epoch,
                    spread: *spread,
                    capacity: *capacity,
                    epsilon: cfg.epsilon,
                };
                let e = assoc::evaluate_policies(&params, &scenario, cfg.trials, cfg.seed)?;
                let t = ms(start);
                push("proposed".into(), v, None, None, e.proposed, t);
                push("benchmark".into(), v, None, None, e.benchmark, t);
                push("difference".into(), v, None, None, e.difference, t);
            }
        }
    }

    let csv = render_csv(cfg, &params, &geometry, &rows);
    if let Some(mut f) = file {
        use std::io::Write;
        f.write_all(csv.as_bytes())?;
    }
    let summary = summarize(cfg, &rows);
    Ok(ExperimentOutput { rows, csv, summary })
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn render_csv(cfg: &ExperimentConfig, params: &GridParams, geometry: &str, rows: &[ResultRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# uav-los {CSV_VERSION} config_hash={:016x}", cfg.hash());
    let _ = writeln!(
        s,
        "# preset={} mu_b={} mu_s={} sigma={} region={} epoch={} range={} epsilon={} seed={} layout={:?}",
        cfg.preset.name(),
        params.mu_b,
        params.mu_s,
        params.sigma,
        cfg.region,
        cfg.epoch,
        cfg.range,
        cfg.epsilon,
        cfg.seed,
        cfg.layout
    );
    let _ = writeln!(s, "# geometry: {geometry}");
    let _ = writeln!(s, "{CSV_COLUMNS}");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.sweep,
            r.series,
            r.value,
            opt(r.t_min),
            opt(r.analytic),
            r.mc_mean,
            r.mc_stderr,
            r.trials,
            opt(r.runtime_ms)
        );
    }
    s
}

fn summarize(cfg: &ExperimentConfig, rows: &[ResultRow]) -> String {
    let mut s = format!("{} sweep, preset {}, {} rows\n", cfg.sweep.name(), cfg.preset.name(), rows.len());
    for r in rows {
        let _ = match r.analytic {
            Some(a) => writeln!(
                s,
                "  {:>12} {:>8}: analytic {a:.3} s, monte carlo {:.3} +- {:.3} s",
                r.series, r.value, r.mc_mean, r.mc_stderr
            ),
            None => writeln!(s, "  {:>12} {:>8}: {:.3} +- {:.3} s", r.series, r.value, r.mc_mean, r.mc_stderr),
        };
    }
    s
}

/// Parse rows back from CSV text produced by [`run_experiment`].
pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    if lines.next() != Some(CSV_COLUMNS) {
        return Err(config_err("unexpected CSV header"));
    }
    let num = |s: &str| -> Result<f64> { s.parse().map_err(|_| config_err(format!("bad number `{s}`"))) };
    let optnum = |s: &str| -> Result<Option<f64>> { if s.is_empty() { Ok(None) } else { num(s).map(Some) } };
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 9 {
                return Err(config_err(format!("expected 9 fields, got {}", f.len())));
            }
            Ok(ResultRow {
                sweep: f[0].into(),
                series: f[1].into(),
                value: num(f[2])?,
                t_min: optnum(f[3])?,
                analytic: optnum(f[4])?,
                mc_mean: num(f[5])?,
                mc_stderr: num(f[6])?,
                trials: f[7].parse().map_err(|_| config_err("bad trial count"))?,
                runtime_ms: optnum(f[8])?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Quadrature,
    TwoPath,
    McAgreement,
    Assoc,
    Poisson,
    Oracle,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// One JSON object per check.
    pub fn to_jsonl(&self) -> String {
        self.checks
            .iter()
            .map(|c| serde_json::to_string(c).expect("check serializes") + "\n")
            .collect()
    }
}

fn check(suite: &str, name: &str, passed: bool, detail: String) -> Check {
    Check { suite: suite.into(), name: name.into(), passed, detail }
}

/// Run a validation suite.
pub fn validate(suite: Suite, seed: u64) -> Result<ValidationReport> {
    let suites = match suite {
        Suite::All => vec![
            Suite::Quadrature,
            Suite::TwoPath,
            Suite::Poisson,
            Suite::Oracle,
            Suite::McAgreement,
            Suite::Assoc,
        ],
        s => vec![s],
    };
    let mut checks = Vec::new();
    for s in suites {
        checks.extend(match s {
            Suite::Quadrature => suite_quadrature(seed),
            Suite::TwoPath => suite_two_path(seed),
            Suite::Poisson => suite_poisson(),
            Suite::Oracle => suite_oracle(seed)?,
            Suite::McAgreement => suite_mc_agreement(seed)?,
            Suite::Assoc => suite_assoc(seed)?,
            Suite::All => unreachable!(),
        });
    }
    Ok(ValidationReport { checks })
}

fn suite_quadrature(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let base = rng.random_range(0.01..1.0);
        let a = -rng.random_range(1e-5..0.05);
        let v = rng.random_range(-40.0..40.0);
        let t = rng.random_range(0.01..20.0);
        let closed = mobility::expected_los_x_segment(base, a, v, t);
        let q = quad::integrate(|s| mobility::p_los_x_segment(s, base, a, v), 0.0, t, 1e-14 * t).value;
        worst = worst.max(((closed - q) / q).abs());
    }
    vec![check("quadrature", "facade-closed-form", worst <= 1e-9, format!("max_rel={worst:e} segments=1000"))]
}

fn random_geometry(rng: &mut ChaCha8Rng) -> (Point2, Uav, f64) {
    let g = Point2::new(rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0));
    let h = rng.random_range(10.0..200.0);
    let dy = rng.random_range(15.0..250.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let u = Uav::new(g.x + rng.random_range(-250.0..250.0), g.y + dy, h, 1e4);
    let w = rng.random_range(1.0..14.0);
    (g, u, w)
}

fn suite_two_path(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (g, u, w) = random_geometry(&mut rng);
        let sigma = rng.random_range(3.0..20.0);
        let lambda = 1.0 / rng.random_range(20.0..100.0);
        let c = first_block_side(g, &u, w).expect("UAV clears the street");
        let closed = p_los_static(g, &u, Some(&c), lambda, &HeightModel::rayleigh(sigma));
        let generic = p_los_static_generic(g, &u, &c, lambda, &HeightModel::rayleigh_as_cdf(sigma));
        if closed > 1e-300 {
            worst = worst.max(((closed - generic) / closed).abs());
        }
    }
    vec![check("two-path", "closed-vs-generic-cdf", worst <= 1e-8, format!("max_rel={worst:e} geometries=1000"))]
}

fn suite_poisson() -> Vec<Check> {
    let mut failures = 0;
    let mut cases = 0;
    for &lambda in &[1.0 / 47.0, 1.0 / 58.0, 1.0 / 80.0, 0.1, 1.0] {
        for &v in &[0.0, 0.5, 2.0, 15.0, 40.0] {
            for &t in &[1.0, 10.0, 60.0] {
                for &eps in &[1e-1, 1e-2, 1e-3, 1e-6] {
                    cases += 1;
                    let n = mobility::poisson_truncation_n(lambda, v, t, eps);
                    let mu = lambda * v * t;
                    let cdf = |k: usize| mobility::poisson_weights(mu, k).iter().sum::<f64>();
                    let minimal = n == 0 || cdf(n - 1) < 1.0 - eps;
                    if !(cdf(n) >= 1.0 - eps && minimal) {
                        failures += 1;
                    }
                }
            }
        }
    }
    vec![check("poisson", "truncation-minimal", failures == 0, format!("cases={cases} failures={failures}"))]
}

fn suite_oracle(seed: u64) -> Result<Vec<Check>> {
    let params = GridParams::new(45.0, 13.0, 8.0, Region::centered(400.0, 400.0))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_excess = f64::NEG_INFINITY;
    for i in 0..100u64 {
        let (grid, motion, u) = random_oracle_case(&params, &mut rng, oracle::trial_seed(seed, i))?;
        let set = oracle::los_time(&grid, &motion, &u)?;
        let sampled = oracle::los_time_sampled(&grid, &motion, &u, 1e-3)?;
        let transitions = transitions(&set);
        let allowed = 2e-3 * transitions.max(1) as f64;
        worst_excess = worst_excess.max((set.total() - sampled).abs() - allowed);
    }
    Ok(vec![check(
        "oracle",
        "interval-vs-dense-sampling",
        worst_excess <= 0.0,
        format!("worst_excess_s={worst_excess:e} trials=100"),
    )])
}

/// Number of LoS/blocked switches inside the coverage window.
pub fn transitions(set: &oracle::LosIntervalSet) -> usize {
    let (a, b) = (set.window.start, set.window.end);
    set.intervals.iter().map(|&(s, e)| usize::from(s > a) + usize::from(e < b)).sum()
}

/// A sampled city with a user on one of its streets and a random UAV.
pub fn random_oracle_case(
    params: &GridParams,
    rng: &mut ChaCha8Rng,
    grid_seed: u64,
) -> Result<(UrbanGrid, UserMotion, Uav)> {
    let grid = sample_grid(params, grid_seed)?;
    let scenario = AssocScenario {
        users: 1,
        uavs: 1,
        uav_height: rng.random_range(30.0..150.0),
        range: 1e4,
        speed: rng.random_range(1.0..30.0),
        epoch: 10.0,
        spread: 100.0,
        capacity: 1,
        epsilon: 1e-3,
    };
    let (users, uavs) = scenario.realize(&grid, rng.random())?;
    Ok((grid, users[0], uavs[0]))
}

fn suite_mc_agreement(seed: u64) -> Result<Vec<Check>> {
    let params = GridParams::new(1e9 - 10.0, 10.0, 8.0, Region::centered(400.0, 400.0))?;
    let u = Uav::new(80.0, 60.0, 100.0, 250.0);
    let m = centre_user(15.0, 10.0, 10.0);
    let mc = oracle::monte_carlo_expected_los_with(&params, &m, &u, 200, seed, Conditioning::None)?;
    let t_min = oracle::coverage_time(&m, &u);
    // UAV above the user's own street: the link never leaves it.
    let urban = GridParams::new(45.0, 13.0, 8.0, Region::centered(400.0, 400.0))?;
    let m13 = centre_user(15.0, 10.0, 13.0);
    let over = Uav::new(60.0, 3.0, 100.0, 250.0);
    let analytic = mobility::expected_los_total(&urban, &m13, &over, 1e-3)?.value;
    let street_mc = oracle::monte_carlo_expected_los(&urban, &m13, &over, 200, seed)?;
    let t_over = oracle::coverage_time(&m13, &over);
    Ok(vec![
        check("mc-agreement", "empty-city", mc.mean == t_min && mc.stderr == 0.0, format!("mean={} t_min={t_min}", mc.mean)),
        check(
            "mc-agreement",
            "uav-over-street",
            analytic == t_over && street_mc.mean == t_over && street_mc.stderr == 0.0,
            format!("analytic={analytic} mc={} t_min={t_over}", street_mc.mean),
        ),
    ])
}

fn suite_assoc(seed: u64) -> Result<Vec<Check>> {
    let params = GridParams::new(45.0, 13.0, 8.0, Region::centered(400.0, 400.0))?;
    let mut mismatches = 0;
    for i in 0..200u64 {
        let s = oracle::trial_seed(seed, i);
        let grid = sample_grid(&params, s)?;
        let scenario = AssocScenario {
            users: 1,
            uavs: 1,
            uav_height: 100.0,
            range: 250.0,
            speed: 15.0,
            epoch: 10.0,
            spread: 100.0,
            capacity: 1,
            epsilon: 1e-3,
        };
        let (users, uavs) = scenario.realize(&grid, s)?;
        let p = assoc::assign_proposed_on_grid(&users, &uavs, &params, 1e-3, 1, &grid)?;
        let b = assoc::assign_benchmark(&users, &uavs, &grid, 1)?;
        if p.pairs != b.pairs {
            mismatches += 1;
        }
    }
    Ok(vec![check("assoc", "single-pair-policies-agree", mismatches == 0, format!("instances=200 mismatches={mismatches}"))])
}
