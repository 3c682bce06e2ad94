#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rwot::{build_cost_matrix, Distribution};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Between 1 and `max_points` points in `[0, scale)^dim` with random positive masses.
pub fn random_distribution(rng: &mut ChaCha8Rng, max_points: usize, dim: usize, scale: f64) -> Distribution {
    let m = rng.random_range(1..=max_points);
    let points = (0..m).map(|_| (0..dim).map(|_| rng.random::<f64>() * scale).collect()).collect();
    let masses = (0..m).map(|_| 0.1 + rng.random::<f64>()).collect();
    Distribution::new(points, masses).unwrap()
}

pub fn uniform_distribution(rng: &mut ChaCha8Rng, m: usize, dim: usize, scale: f64) -> Distribution {
    let points = (0..m).map(|_| (0..dim).map(|_| rng.random::<f64>() * scale).collect()).collect();
    Distribution::uniform(points).unwrap()
}

/// All permutations of `0..n` (Heap's algorithm).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, a, out);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            a.swap(j, k - 1);
        }
    }
    let mut a: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    heap(n, &mut a, &mut out);
    out
}

/// Exact OT for equal uniform masses with `m1 = m2 = n`: by Birkhoff's
/// theorem the optimum is a permutation coupling, so enumerate them all.
pub fn brute_force_uniform(cost: &[f64], n: usize) -> f64 {
    permutations(n)
        .iter()
        .map(|p| p.iter().enumerate().map(|(i, &j)| cost[i * n + j]).sum::<f64>() / n as f64)
        .fold(f64::INFINITY, f64::min)
}

/// Brute-force OT value between two uniform `n`-point distributions at `shift`.
pub fn brute_force_shifted(src: &Distribution, dst: &Distribution, p: f64, shift: &[f64]) -> f64 {
    let c = build_cost_matrix(src, dst, p, shift).unwrap();
    brute_force_uniform(c.entries(), src.len())
}
