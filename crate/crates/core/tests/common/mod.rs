#![allow(dead_code)]

use nlskdv::{Field, RadialGrid, StatePair};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Sum of a few Gaussian bumps with random signs, centres and widths.
pub fn random_bumps(grid: &RadialGrid, rng: &mut ChaCha8Rng, signed: bool) -> Field {
    let r = grid.radius();
    let count = rng.gen_range(1..=4);
    let bumps: Vec<(f64, f64, f64)> = (0..count)
        .map(|_| {
            let amp = rng.gen_range(0.2..2.0) * if signed && rng.gen_bool(0.3) { -1.0 } else { 1.0 };
            let lo = if grid.dimension() == 1 { -0.3 * r } else { 0.0 };
            let centre = rng.gen_range(lo..0.3 * r);
            let width = rng.gen_range(0.5..0.1 * r);
            (amp, centre, width)
        })
        .collect();
    grid.sample_dirichlet(|x| {
        bumps
            .iter()
            .map(|(a, c, w)| a * (-((x - c) / w).powi(2)).exp())
            .sum()
    })
}

pub fn random_pair(grid: &RadialGrid, rng: &mut ChaCha8Rng, signed: bool) -> StatePair {
    StatePair::new(random_bumps(grid, rng, signed), random_bumps(grid, rng, signed))
}

/// Independent uniform values on the interior, zero on the boundary.
pub fn random_non_negative(grid: &RadialGrid, rng: &mut ChaCha8Rng) -> Field {
    let mut f = Field::zeros(grid);
    for i in grid.interior() {
        f[i] = rng.gen_range(0.0..1.0);
    }
    f
}

/// `log₂(a / b)`.
pub fn order(a: f64, b: f64) -> f64 {
    (a / b).log2()
}
