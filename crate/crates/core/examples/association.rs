//! Mobility-aware association against nearest-UAV association.

use uav_los::assoc::{assign_benchmark, assign_proposed_on_grid, evaluate_policies, realized_total, AssocScenario};
use uav_los::env::{sample_grid, GridParams, Region};

fn main() -> uav_los::Result<()> {
    let params = GridParams::new(45.0, 13.0, 8.0, Region::centered(400.0, 400.0))?;
    let scenario = AssocScenario {
        users: 4,
        uavs: 6,
        uav_height: 100.0,
        range: 250.0,
        speed: 20.0,
        epoch: 10.0,
        spread: 100.0,
        capacity: 1,
        epsilon: 1e-3,
    };

    let grid = sample_grid(&params, 11)?;
    let (users, uavs) = scenario.realize(&grid, 11)?;
    let proposed = assign_proposed_on_grid(&users, &uavs, &params, 1e-3, 1, &grid)?;
    let benchmark = assign_benchmark(&users, &uavs, &grid, 1)?;
    println!("proposed  {:?} -> {:.2} s", proposed.pairs, realized_total(&proposed, &grid, &users, &uavs)?);
    println!("benchmark {:?} -> {:.2} s", benchmark.pairs, realized_total(&benchmark, &grid, &users, &uavs)?);

    let e = evaluate_policies(&params, &scenario, 300, 1)?;
    println!(
        "300 cities: proposed {:.2} s, benchmark {:.2} s, difference {:.2} s, 95% CI ({:.2}, {:.2})",
        e.proposed.mean, e.benchmark.mean, e.difference.mean, e.ci95.0, e.ci95.1
    );
    Ok(())
}
