use uav_los::env::{sample_grid, GridParams, Region};

fn wide_urban() -> GridParams {
    GridParams::new(45.0, 13.0, 8.0, Region::centered(20_000.0, 20_000.0)).unwrap()
}

/// Inner gaps only: the first and last gaps straddle the region edge.
fn inner_gaps(points: &[f64]) -> impl Iterator<Item = f64> + '_ {
    let n = points.len();
    points.windows(2).enumerate().filter(move |(i, _)| *i > 0 && *i + 2 < n).map(|(_, w)| w[1] - w[0])
}

#[test]
fn street_spacing_is_exponential() {
    let p = wide_urban();
    let mut gaps = Vec::new();
    let mut seed = 0;
    while gaps.len() < 100_000 {
        let g = sample_grid(&p, seed).unwrap();
        gaps.extend(inner_gaps(&g.x_points));
        gaps.extend(inner_gaps(&g.y_points));
        seed += 1;
    }
    gaps.sort_by(f64::total_cmp);
    let n = gaps.len() as f64;
    let d = gaps
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = 1.0 - (-p.lambda * x).exp();
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    // Kolmogorov-Smirnov critical value at alpha = 0.01
    let critical = 1.628 / n.sqrt();
    assert!(d < critical, "D = {d}, critical = {critical}, n = {n}");
    let mean = gaps.iter().sum::<f64>() / n;
    assert!((mean * p.lambda - 1.0).abs() < 0.01, "mean gap {mean}");
}

#[test]
fn block_heights_are_rayleigh() {
    let p = GridParams::new(45.0, 13.0, 8.0, Region::centered(4000.0, 4000.0)).unwrap();
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut seed = 0;
    while count < 1_000_000 {
        let g = sample_grid(&p, seed).unwrap();
        for h in g.block_heights.iter().flatten() {
            sum += h;
            count += 1;
        }
        seed += 1;
    }
    let expected = 8.0 * (std::f64::consts::PI / 2.0).sqrt();
    let mean = sum / count as f64;
    assert!((mean / expected - 1.0).abs() < 0.01, "mean {mean} expected {expected}");
}

#[test]
fn sampling_is_deterministic() {
    let p = GridParams::new(45.0, 13.0, 8.0, Region::centered(400.0, 400.0)).unwrap();
    let a = sample_grid(&p, 42).unwrap();
    let b = sample_grid(&p, 42).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, sample_grid(&p, 43).unwrap());
    let back = uav_los::UrbanGrid::from_json(&a.to_json().unwrap()).unwrap();
    assert_eq!(a, back);
}

#[test]
fn street_fraction_matches_parameters() {
    let p = wide_urban();
    let g = sample_grid(&p, 9).unwrap();
    assert!((g.street_fraction() - 13.0 / 58.0).abs() < 1e-12);
    for i in 1..g.x_cells() - 1 {
        let (low, split, end) = g.x_cell(i);
        assert!(low < split && split < end);
        assert!(((split - low) / (end - low) - 13.0 / 58.0).abs() < 1e-9);
    }
}
