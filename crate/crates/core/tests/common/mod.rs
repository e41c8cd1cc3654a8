#![allow(dead_code)]

use ellcycle::hypergraph::{sample_random, KUniformHypergraph, Vertex};

/// Visits every permutation of `0..n`.
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[Vertex]) -> bool) -> bool {
    fn go(seq: &mut Vec<Vertex>, used: &mut [bool], f: &mut dyn FnMut(&[Vertex]) -> bool) -> bool {
        if seq.len() == used.len() {
            return f(seq);
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                seq.push(v as Vertex);
                if go(seq, used, f) {
                    return true;
                }
                seq.pop();
                used[v] = false;
            }
        }
        false
    }
    go(&mut Vec::with_capacity(n), &mut vec![false; n], &mut f)
}

/// Whether the cyclic order `seq` is a Hamilton ℓ-cycle of `h`, window by window.
pub fn cyclic_order_works(h: &KUniformHypergraph, seq: &[Vertex], ell: usize) -> bool {
    let (n, k) = (seq.len(), h.k());
    let d = k - ell;
    (0..n / d).all(|r| {
        let mut w: Vec<Vertex> = (0..k).map(|i| seq[(r * d + i) % n]).collect();
        w.sort_unstable();
        h.edges().binary_search(&w).is_ok()
    })
}

/// Brute force over all cyclic vertex orders.
pub fn brute_force_hamiltonian(h: &KUniformHypergraph, ell: usize) -> bool {
    let (n, k) = (h.n(), h.k());
    let d = k - ell;
    if n % d != 0 || n < k + d {
        return false;
    }
    for_each_permutation(n, |seq| cyclic_order_works(h, seq, ell))
}

pub fn random_graph(n: usize, k: usize, density: f64, seed: u64) -> KUniformHypergraph {
    sample_random(n, k, density, seed).expect("valid parameters")
}
