//! Shared inputs for the benchmarks.

use conflen::hyperbolic::random_convex_polygon;
use conflen::HyperbolicPolygon;
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn polygons(count: usize, points: usize, seed: u64) -> Vec<HyperbolicPolygon> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_convex_polygon(&mut rng, points)).collect()
}

pub fn disc_pairs(count: usize, seed: u64) -> Vec<(C, C)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = move || C::from_polar(rng.gen::<f64>().sqrt() * 0.99, rng.gen_range(0.0..std::f64::consts::TAU));
    (0..count).map(|_| (point(), point())).collect()
}
