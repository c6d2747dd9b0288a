//! Quasi-uniform point sets on unit spheres `S^{n-1} ⊂ R^n`.

use std::f64::consts::PI;

use crate::rng::{self, Domain};

const GOLDEN: f64 = 1.618_033_988_749_895;

/// `count` quasi-uniform unit vectors in `R^n`.
///
/// `n = 1` yields the two points of `S^0` regardless of `count`; `n = 2`
/// equally spaced angles; `n = 3` a spherical Fibonacci lattice; larger `n`
/// seeded Gaussian draws. `offset` in `[0, 1)` rotates the lattices.
pub fn quasi_uniform(n: usize, count: usize, offset: f64, seed: u64) -> Vec<Vec<f64>> {
    match n {
        0 => Vec::new(),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|i| {
                let t = 2.0 * PI * (i as f64 + offset) / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => fibonacci_sphere(count, offset),
        _ => (0..count as u64)
            .map(|i| rng::unit_vector(&mut rng::stream(seed, Domain::OraclePoints, i), n))
            .collect(),
    }
}

/// Roughly the spacing of `count` well-spread points on the unit sphere of `R^d`.
pub(crate) fn typical_spacing(d: usize, count: usize) -> f64 {
    let area = match d {
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => 2.0 * PI * PI,
    };
    (area / count.max(1) as f64).powf(1.0 / (d.max(2) as f64 - 1.0))
}

/// Spherical Fibonacci lattice with `count` points, azimuth shifted by `offset` turns.
pub fn fibonacci_sphere(count: usize, offset: f64) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = 2.0 * PI * ((i as f64 / GOLDEN) + offset).fract();
            vec![r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}
