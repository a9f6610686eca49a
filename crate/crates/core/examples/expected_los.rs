//! Expected LoS time of a moving user, with the per-crossing breakdown.

use uav_los::env::{GridParams, Point2, Region, Uav, UserMotion};
use uav_los::mobility::{expected_los_total, expected_los_total_with, LayoutMode, TotalOptions};

fn main() -> uav_los::Result<()> {
    let params = GridParams::new(45.0, 13.0, 8.0, Region::centered(400.0, 400.0))?;
    let user = UserMotion::new(Point2::new(0.0, 0.0), 15.0, 10.0, 13.0).with_lane_offset(6.5);
    let uav = Uav::new(60.0, 80.0, 100.0, 250.0);

    let r = expected_los_total(&params, &user, &uav, 1e-3)?;
    println!("coverage window [{:.2}, {:.2}] s", r.window.start, r.window.end);
    println!("E[T_LoS] = {:.3} s with N = {} (weight mass {:.5})", r.value, r.n, r.weight_mass);
    for e in &r.per_ell {
        println!("  l = {}: E = {:.3} s, w = {:.4}", e.ell, e.expected, e.weight);
    }

    let opts = TotalOptions { layout: LayoutMode::Sampled { layouts: 200, seed: 1 }, ..Default::default() };
    let sampled = expected_los_total_with(&params, &user, &uav, &opts)?;
    println!("sampled layouts: {:.3} s", sampled.value);
    Ok(())
}
