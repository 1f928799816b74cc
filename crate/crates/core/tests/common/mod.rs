#![allow(dead_code)]

use hypersre::Hypergraph3;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random hypergraph on `n` qubits; each triple is present with probability
/// `p3`. CZ and Z edges are added when `clifford` is set.
pub fn random_hypergraph(rng: &mut ChaCha8Rng, n: usize, p3: f64, clifford: bool) -> Hypergraph3 {
    let mut h = Hypergraph3::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if rng.random_bool(p3) {
                    h.add_edge3([i, j, k]).unwrap();
                }
            }
            if clifford && rng.random_bool(0.3) {
                h.add_edge2(i, j).unwrap();
            }
        }
        if clifford && rng.random_bool(0.3) {
            h.add_edge1(i).unwrap();
        }
    }
    h
}

/// Corpus of `count` random hypergraphs with `n` drawn from `sizes`.
pub fn corpus(seed: u64, count: usize, sizes: &[usize]) -> Vec<Hypergraph3> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let n = *sizes.choose(&mut r).unwrap();
            let p = [0.1, 0.25, 0.5][r.random_range(0..3)];
            random_hypergraph(&mut r, n, p, false)
        })
        .collect()
}
