//! Static LoS probability against UAV height for the three city presets.

use uav_los::analytic::{p_los_static, HeightModel};
use uav_los::env::{first_block_side, Point2, Uav};

fn main() {
    let g = Point2::new(0.0, 0.0);
    for (name, mu_b, mu_s) in [("suburban", 37.0, 10.0), ("urban", 45.0, 13.0), ("dense_urban", 60.0, 20.0)] {
        let lambda = 1.0 / (mu_b + mu_s);
        print!("{name:<12}");
        for h in [40.0, 60.0, 100.0, 140.0] {
            let u = Uav::new(60.0, 80.0, h, 250.0);
            // user on the centre line of its street
            let c = first_block_side(g, &u, 0.5 * mu_s);
            let p = p_los_static(g, &u, c.as_ref(), lambda, &HeightModel::rayleigh(8.0));
            print!("  h={h:>3}: {p:.3}");
        }
        println!();
    }
}
