//! Realized LoS time on sampled cities next to the analytic estimate.

use uav_los::env::{sample_grid_anchored, Anchor, GridParams, Point2, Region, Uav, UserMotion};
use uav_los::mobility::expected_los_total;
use uav_los::oracle::{los_time, monte_carlo_expected_los};

fn main() -> uav_los::Result<()> {
    let params = GridParams::new(45.0, 13.0, 8.0, Region::centered(400.0, 400.0))?;
    let user = UserMotion::new(Point2::new(0.0, 0.0), 15.0, 10.0, 13.0).with_lane_offset(6.5);
    let uav = Uav::new(60.0, 80.0, 100.0, 250.0);

    // keep the user's street open and a facade at the first crossing
    let grid = sample_grid_anchored(&params, 3, &Anchor::for_link(&user, &uav))?;
    let set = los_time(&grid, &user, &uav)?;
    println!("one city: LoS intervals {:?}, total {:.3} s", set.intervals, set.total());

    let mc = monte_carlo_expected_los(&params, &user, &uav, 2000, 1)?;
    let a = expected_los_total(&params, &user, &uav, 1e-3)?.value;
    println!("Monte Carlo {:.3} +- {:.3} s over {} cities, analytic {a:.3} s", mc.mean, mc.stderr, mc.trials);
    Ok(())
}
