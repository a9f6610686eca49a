//! Sample an urban city and print a summary of its layout.

use uav_los::env::{sample_grid, GridParams, Region};

fn main() -> uav_los::Result<()> {
    let params = GridParams::new(45.0, 13.0, 8.0, Region::centered(400.0, 400.0))?;
    let grid = sample_grid(&params, 7)?;
    println!("lambda = {:.4} /m, street fraction = {:.3}", params.lambda, params.street_fraction());
    println!("{} x cells, {} y cells", grid.x_cells(), grid.y_cells());
    for i in 0..grid.x_cells().min(4) {
        let (low, split, end) = grid.x_cell(i);
        println!("x cell {i}: street [{low:.1}, {split:.1}), buildings [{split:.1}, {end:.1})");
    }
    let heights: Vec<f64> = grid.block_heights.iter().flatten().copied().collect();
    let mean = heights.iter().sum::<f64>() / heights.len() as f64;
    println!("{} blocks, mean height {mean:.2} m", heights.len());
    Ok(())
}
