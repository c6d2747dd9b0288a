//! Counter-based random streams.
//!
//! Every random object (a candidate frame, a search direction, a sample) is
//! drawn from its own ChaCha stream addressed by `(seed, domain, index)`, so
//! results never depend on evaluation order or on the number of worker
//! threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Separates independent uses of the same user seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Domain {
    Subspace = 1,
    NetStream = 2,
    VoronoiSamples = 3,
    SearchDirections = 4,
    ShellDirections = 5,
    Translations = 6,
    SphereRotation = 7,
    OraclePoints = 8,
    MetricPairs = 9,
}

/// Rng for the `index`-th item of `domain` under `seed`.
pub fn stream(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let mixed = splitmix64(seed ^ splitmix64(domain as u64));
    let mut rng = ChaCha8Rng::seed_from_u64(mixed);
    rng.set_stream(index);
    rng
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn gaussian_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

/// Uniform point on the unit sphere of `R^dim`.
pub(crate) fn unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let mut v = gaussian_vec(rng, dim);
        let n = crate::linalg::norm(&v);
        if n > 1e-12 {
            v.iter_mut().for_each(|x| *x /= n);
            return v;
        }
    }
}
