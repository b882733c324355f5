#![allow(dead_code)]

use levelset_spectral::PointSet;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// A point set together with the graph scale it should be clustered at.
pub struct Instance {
    pub points: PointSet,
    pub h: f64,
}

fn unit_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Random groups grown as trees with hops of at most `h / 2`, laid out along
/// the first axis with gaps of more than `h` between them.
///
/// Hops are capped well inside the kernel support so every edge keeps a
/// weight of at least `exp(-4)`; longer edges carry weights that are
/// indistinguishable from zero at eigenvalue tolerance `1e-8`.
pub fn clustered_instance(rng: &mut ChaCha8Rng) -> Instance {
    let n = rng.random_range(5..=200);
    let dim = rng.random_range(1..=3);
    let h = 0.1 * 20f64.powf(rng.random::<f64>());
    let groups = rng.random_range(1..=n.min(6));

    let mut cuts: Vec<usize> = Vec::new();
    while cuts.len() < groups - 1 {
        let c = rng.random_range(1..n);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.sort_unstable();
    cuts.insert(0, 0);
    cuts.push(n);

    let mut coords: Vec<f64> = Vec::with_capacity(n * dim);
    let mut frontier = 0.0;
    for (g, w) in cuts.windows(2).enumerate() {
        let size = w[1] - w[0];
        let mut group: Vec<Vec<f64>> = vec![vec![0.0; dim]];
        while group.len() < size {
            let parent = group[rng.random_range(0..group.len())].clone();
            let step = 0.5 * h * rng.random::<f64>();
            let dir = unit_direction(rng, dim);
            group.push(parent.iter().zip(&dir).map(|(p, u)| p + step * u).collect());
        }
        let lo = group.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let hi = group.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        let gap = if g == 0 { 0.0 } else { h * (1.05 + 2.0 * rng.random::<f64>()) };
        let shift = frontier + gap - lo;
        for mut p in group {
            p[0] += shift;
            coords.extend(p);
        }
        frontier += gap + (hi - lo);
    }
    Instance {
        points: PointSet::new(coords, dim, None).expect("valid instance"),
        h,
    }
}

/// Uniform points in the unit cube with a random scale.
pub fn uniform_instance(rng: &mut ChaCha8Rng, n_range: std::ops::RangeInclusive<usize>) -> Instance {
    let n = rng.random_range(n_range);
    let dim = rng.random_range(1..=3);
    let coords = (0..n * dim).map(|_| rng.random::<f64>()).collect();
    Instance {
        points: PointSet::new(coords, dim, None).expect("valid instance"),
        h: 0.1 + 0.9 * rng.random::<f64>(),
    }
}

/// Squared Euclidean distance.
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Adjusted Rand index from the four pair counts.
pub fn pair_counting_ari(a: &[usize], b: &[usize]) -> f64 {
    let (mut both, mut only_a, mut only_b, mut neither) = (0f64, 0f64, 0f64, 0f64);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            match (a[i] == a[j], b[i] == b[j]) {
                (true, true) => both += 1.0,
                (true, false) => only_a += 1.0,
                (false, true) => only_b += 1.0,
                (false, false) => neither += 1.0,
            }
        }
    }
    let den = (both + only_a) * (only_a + neither) + (both + only_b) * (only_b + neither);
    if den == 0.0 {
        return 1.0;
    }
    2.0 * (both * neither - only_a * only_b) / den
}
