use rand::seq::SliceRandom;
use rand::Rng as _;

use super::fill::{fill, linear_windows, FillSpec};
use super::{SearchLimits, SearchOutcome};
use crate::error::{Error, Result};
use crate::hypergraph::{KUniformHypergraph, Vertex, VertexSet};
use crate::paths::{path_vertex_count, EllPath};
use crate::rng::rng_from_seed;

/// Vertex-disjoint ℓ-paths of a fixed length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tiling {
    pub paths: Vec<EllPath>,
    /// Vertices on some path.
    pub covered: usize,
    /// Vertices that were available for tiling.
    pub available: usize,
    /// Attempts made before stopping.
    pub attempts: usize,
    pub nodes: u64,
}

impl Tiling {
    pub fn covered_fraction(&self) -> f64 {
        if self.available == 0 {
            1.0
        } else {
            self.covered as f64 / self.available as f64
        }
    }

    pub fn covered_set(&self) -> VertexSet {
        VertexSet::collect_from(self.paths.iter().flat_map(|p| p.seq().iter().copied()))
    }
}

/// Greedily packs disjoint ℓ-paths of length `m` avoiding `forbidden`.
///
/// Each attempt walks the available vertices in a fresh random order and tries
/// to start a path at every still-unused vertex, then swaps single paths for
/// pairs while that covers more vertices. The best of `retries`
/// attempts is kept; a complete cover stops early. `limits.nodes` bounds each
/// single path search.
pub fn greedy_path_tiling(
    host: &KUniformHypergraph,
    ell: usize,
    m: usize,
    forbidden: &VertexSet,
    seed: u64,
    retries: usize,
    limits: &SearchLimits,
) -> Result<Tiling> {
    limits.validate()?;
    let (n, k) = (host.n(), host.k());
    let b = path_vertex_count(k, ell, m)?;
    if retries == 0 {
        return Err(Error::InvalidParameter("retries must be at least 1".into()));
    }
    let d = k - ell;
    let windows = linear_windows(b, k, d);
    let pool: Vec<Vertex> = (0..n as Vertex).filter(|&v| !forbidden.contains(v)).collect();
    let mut rng = rng_from_seed(seed);
    let mut best: Option<Tiling> = None;
    let mut nodes = 0u64;

    for attempt in 0..retries {
        let mut order = pool.clone();
        order.shuffle(&mut rng);
        let mut free = vec![false; n];
        for &v in &pool {
            free[v as usize] = true;
        }
        let mut left = pool.len();
        let mut paths = Vec::new();
        for &start in &order {
            if !free[start as usize] || left < b {
                continue;
            }
            let mut fixed = vec![None; b];
            fixed[0] = Some(start);
            let spec = FillSpec {
                host,
                len: b,
                windows: windows.clone(),
                fixed,
                order: (1..b).collect(),
                allowed: free.clone(),
                less_than: Vec::new(),
                fail_first: false,
                shuffle: Some(rng.gen()),
                low_degree_first: false,
            };
            let (outcome, used) = fill(&spec, limits);
            nodes += used;
            if let SearchOutcome::Found(seq) = outcome {
                for &v in &seq {
                    free[v as usize] = false;
                }
                left -= b;
                paths.push(EllPath::new(seq, k, ell)?);
            }
        }
        nodes += augment(host, &mut paths, &mut free, &windows, b, limits, &mut rng)?;
        let covered = paths.len() * b;
        let better = best.as_ref().map_or(true, |t| covered > t.covered);
        if better {
            best = Some(Tiling { paths, covered, available: pool.len(), attempts: attempt + 1, nodes: 0 });
        }
        if best.as_ref().is_some_and(|t| t.available - t.covered < b) {
            break;
        }
    }
    let mut t = best.expect("at least one attempt");
    t.nodes = nodes;
    Ok(t)
}

/// Local improvement: repeatedly swaps one path for two paths drawn from its
/// vertices and the free ones, until no swap succeeds.
fn augment(
    host: &KUniformHypergraph,
    paths: &mut Vec<EllPath>,
    free: &mut [bool],
    windows: &[Vec<usize>],
    b: usize,
    limits: &SearchLimits,
    rng: &mut crate::rng::Rng,
) -> Result<u64> {
    let (k, mut nodes) = (host.k(), 0u64);
    let pair_windows: Vec<Vec<usize>> =
        windows.iter().cloned().chain(windows.iter().map(|w| w.iter().map(|&i| i + b).collect())).collect();
    loop {
        let left = free.iter().filter(|&&f| f).count();
        if left < b {
            return Ok(nodes);
        }
        let mut swapped = false;
        for i in 0..paths.len() {
            let mut pool = free.to_vec();
            for &v in paths[i].seq() {
                pool[v as usize] = true;
            }
            let spec = FillSpec {
                host,
                len: 2 * b,
                windows: pair_windows.clone(),
                fixed: vec![None; 2 * b],
                order: (0..2 * b).collect(),
                allowed: pool,
                less_than: Vec::new(),
                fail_first: true,
                shuffle: Some(rng.gen()),
                low_degree_first: false,
            };
            let (outcome, used) = fill(&spec, limits);
            nodes += used;
            if let SearchOutcome::Found(seq) = outcome {
                let ell = paths[i].ell();
                for &v in paths[i].seq() {
                    free[v as usize] = true;
                }
                for &v in &seq {
                    free[v as usize] = false;
                }
                paths[i] = EllPath::new(seq[..b].to_vec(), k, ell)?;
                paths.push(EllPath::new(seq[b..].to_vec(), k, ell)?);
                swapped = true;
                break;
            }
        }
        if !swapped {
            return Ok(nodes);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_host_is_covered() {
        let k = KUniformHypergraph::complete(12, 3).unwrap();
        let t = greedy_path_tiling(&k, 2, 2, &VertexSet::default(), 1, 3, &SearchLimits::default()).unwrap();
        assert_eq!(t.paths.len(), 3);
        assert_eq!(t.covered, 12);
        for p in &t.paths {
            p.validate_in(&k).unwrap();
        }
    }

    #[test]
    fn empty_host_gives_nothing() {
        let e = KUniformHypergraph::empty(12, 3).unwrap();
        let t = greedy_path_tiling(&e, 2, 2, &VertexSet::default(), 1, 2, &SearchLimits::default()).unwrap();
        assert!(t.paths.is_empty());
        assert_eq!(t.covered_fraction(), 0.0);
    }

    #[test]
    fn forbidden_vertices_are_avoided() {
        let k = KUniformHypergraph::complete(10, 3).unwrap();
        let forbidden = VertexSet::new([0, 5]).unwrap();
        let t = greedy_path_tiling(&k, 2, 2, &forbidden, 4, 2, &SearchLimits::default()).unwrap();
        assert_eq!(t.covered, 8);
        assert!(t.covered_set().is_disjoint(&forbidden));
    }
}
