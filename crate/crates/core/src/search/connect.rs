use rand::seq::SliceRandom;
use rand::Rng as _;

use super::fill::{fill, linear_windows, FillSpec};
use super::{SearchLimits, SearchOutcome};
use crate::error::{Error, Result};
use crate::gadgets::rand_path_length;
use crate::hypergraph::{KUniformHypergraph, Vertex, VertexSet};
use crate::paths::{EllCycle, EllPath, OrderedTuple};
use crate::rng::rng_from_seed;

/// Interior sizes `j(k − ℓ) − ℓ ≥ 0` of ℓ-paths joining two disjoint ℓ-tuples,
/// in increasing order, up to `max`.
pub fn connector_interior_sizes(k: usize, ell: usize, max: usize) -> Vec<usize> {
    let d = k - ell;
    (ell.div_ceil(d)..)
        .map(|j| j * d - ell)
        .take_while(|&q| q <= max)
        .collect()
}

/// Interior size of the standard connector, `3(k − ℓ)t + k − 2ℓ`.
pub(crate) fn standard_interior(k: usize, ell: usize) -> usize {
    let d = k - ell;
    3 * d * rand_path_length(k, ell) + k - 2 * ell
}

fn check_ends(k: usize, a: &[Vertex], b: &[Vertex]) -> Result<usize> {
    let ell = a.len();
    if ell == 0 || ell >= k || b.len() != ell {
        return Err(Error::InvalidParameter(format!(
            "ends of sizes {} and {} do not fit a {k}-graph",
            a.len(),
            b.len()
        )));
    }
    if let Some(v) = a.iter().find(|v| b.contains(v)) {
        return Err(Error::Precondition(format!("ends share vertex {v}")));
    }
    Ok(ell)
}

/// Search for an ℓ-path `a, interior…, b` with `interior` inner vertices.
pub(crate) fn connector_search(
    host: &KUniformHypergraph,
    a: &[Vertex],
    b: &[Vertex],
    interior: usize,
    allowed: &[bool],
    limits: &SearchLimits,
    shuffle: Option<u64>,
) -> Result<(SearchOutcome<EllPath>, u64)> {
    let k = host.k();
    let ell = check_ends(k, a, b)?;
    let d = k - ell;
    let len = interior + 2 * ell;
    if (len - ell) % d != 0 || len < k {
        return Err(Error::InvalidParameter(format!("no {ell}-path has {interior} interior vertices")));
    }
    let mut fixed = vec![None; len];
    for (i, &v) in a.iter().enumerate() {
        fixed[i] = Some(v);
    }
    for (i, &v) in b.iter().enumerate() {
        fixed[len - ell + i] = Some(v);
    }
    let mut mask = allowed.to_vec();
    for &v in a.iter().chain(b) {
        mask[v as usize] = false;
    }
    let order = if interior == standard_interior(k, ell) {
        // grow both stubs of the bottom grade, then fill the gap
        let t = rand_path_length(k, ell);
        let left_end = t * d + k;
        let right_start = (2 * t + 1) * d;
        let mut o: Vec<usize> = (ell..left_end).collect();
        o.extend((right_start..len - ell).rev());
        o.extend(left_end..right_start);
        o
    } else {
        let mid = len / 2;
        let mut o: Vec<usize> = (ell..mid.max(ell)).collect();
        o.extend((mid.max(ell)..len - ell).rev());
        o
    };
    let spec = FillSpec {
        host,
        len,
        windows: linear_windows(len, k, d),
        fixed,
        order,
        allowed: mask,
        less_than: Vec::new(),
        fail_first: false,
        shuffle,
        low_degree_first: false,
    };
    let (outcome, nodes) = fill(&spec, limits);
    let outcome = match outcome {
        SearchOutcome::Found(seq) => SearchOutcome::Found(EllPath::new(seq, k, ell)?),
        SearchOutcome::Exhausted => SearchOutcome::Exhausted,
        SearchOutcome::BudgetExceeded => SearchOutcome::BudgetExceeded,
    };
    Ok((outcome, nodes))
}

/// A connecting path of the standard length `3t + 1` (`b = 3(k − ℓ)t + k`
/// vertices) from `a` to `b` whose interior lies in `X ∖ Z`.
pub fn find_connecting_path(
    host: &KUniformHypergraph,
    a: &OrderedTuple,
    b: &OrderedTuple,
    x: &VertexSet,
    z: &VertexSet,
    limits: &SearchLimits,
) -> Result<SearchOutcome<EllPath>> {
    limits.validate()?;
    let k = host.k();
    let ell = check_ends(k, a.as_slice(), b.as_slice())?;
    if z.iter().any(|v| !x.contains(v)) {
        return Err(Error::Precondition("Z is not contained in X".into()));
    }
    let mut allowed = vec![false; host.n()];
    for v in x.iter().filter(|&v| !z.contains(v) && (v as usize) < host.n()) {
        allowed[v as usize] = true;
    }
    let interior = standard_interior(k, ell);
    Ok(connector_search(host, a.as_slice(), b.as_slice(), interior, &allowed, limits, None)?.0)
}

/// A connecting path from `a` to `b` with exactly `interior` inner vertices
/// drawn from `allowed`.
pub fn find_connector(
    host: &KUniformHypergraph,
    a: &OrderedTuple,
    b: &OrderedTuple,
    interior: usize,
    allowed: &VertexSet,
    limits: &SearchLimits,
    seed: Option<u64>,
) -> Result<SearchOutcome<EllPath>> {
    limits.validate()?;
    let mut mask = vec![false; host.n()];
    for v in allowed.iter().filter(|&v| (v as usize) < host.n()) {
        mask[v as usize] = true;
    }
    Ok(connector_search(host, a.as_slice(), b.as_slice(), interior, &mask, limits, seed)?.0)
}

/// A chain of paths joined by connectors, optionally closed into a cycle.
pub(crate) struct Chain {
    pub seq: Vec<Vertex>,
    /// Connector interior vertices, in the order they were used.
    pub interior: Vec<Vertex>,
    pub nodes: u64,
}

/// Picks candidate interior sizes for one connection, given how many
/// connections are still to be made (this one included) and how many interior
/// vertices are available.
pub(crate) type SizePolicy<'a> = dyn FnMut(usize, usize) -> Vec<usize> + 'a;

/// Joins `paths` greedily: the chain grows from `paths[0]`; at each step the
/// remaining paths are tried in a seeded order, each forwards and reversed.
#[allow(clippy::too_many_arguments)]
pub(crate) fn build_chain(
    host: &KUniformHypergraph,
    paths: &[EllPath],
    allowed: &[bool],
    limits: &SearchLimits,
    seed: u64,
    sizes: &mut SizePolicy<'_>,
    close: bool,
) -> Result<Chain> {
    let Some(first) = paths.first() else {
        return Err(Error::NothingToConnect);
    };
    let (k, ell) = (first.k(), first.ell());
    if host.k() != k {
        return Err(Error::UniformityMismatch { expected: host.k(), found: k });
    }
    let mut avail = allowed.to_vec();
    avail.resize(host.n(), false);
    let mut on_path = vec![false; host.n()];
    for p in paths {
        if p.k() != k || p.ell() != ell {
            return Err(Error::InvalidParameter("paths have different parameters".into()));
        }
        for &v in p.seq() {
            if v as usize >= host.n() || on_path[v as usize] {
                return Err(Error::Precondition(format!("vertex {v} is repeated across paths or out of range")));
            }
            on_path[v as usize] = true;
            avail[v as usize] = false;
        }
    }
    let mut rng = rng_from_seed(seed);
    let mut chain = first.seq().to_vec();
    let mut interior = Vec::new();
    let mut nodes = 0u64;
    let mut last = 0usize;
    let mut remaining: Vec<usize> = (1..paths.len()).collect();

    while !remaining.is_empty() {
        let left = remaining.len() + usize::from(close);
        let count = avail.iter().filter(|&&a| a).count();
        let mut order = remaining.clone();
        order.shuffle(&mut rng);
        let mut exhausted = true;
        let mut found = None;
        'sizes: for q in sizes(left, count) {
            for &i in &order {
                for rev in [false, true] {
                    let p = if rev { paths[i].reversed() } else { paths[i].clone() };
                    let a = &chain[chain.len() - ell..];
                    let (outcome, used) = connector_search(host, a, &p.seq()[..ell], q, &avail, limits, Some(rng.gen()))?;
                    nodes += used;
                    match outcome {
                        SearchOutcome::Found(c) => {
                            found = Some((i, p, c));
                            break 'sizes;
                        }
                        SearchOutcome::BudgetExceeded => exhausted = false,
                        SearchOutcome::Exhausted => {}
                    }
                }
            }
        }
        let Some((i, p, c)) = found else {
            let to = *remaining.iter().min().expect("nonempty");
            return Err(Error::Unconnectable { from: last, to, exhausted });
        };
        let inner = &c.seq()[ell..c.seq().len() - ell];
        for &v in inner {
            avail[v as usize] = false;
        }
        interior.extend_from_slice(inner);
        chain.extend_from_slice(inner);
        chain.extend_from_slice(p.seq());
        remaining.retain(|&j| j != i);
        last = i;
    }

    if close {
        if chain.len() < 2 * ell {
            return Err(Error::Precondition("path too short to close into a cycle".into()));
        }
        let count = avail.iter().filter(|&&a| a).count();
        let a = chain[chain.len() - ell..].to_vec();
        let b = chain[..ell].to_vec();
        let mut exhausted = true;
        let mut closing = None;
        for q in sizes(1, count) {
            if chain.len() + q < k + (k - ell) {
                continue;
            }
            let (outcome, used) = connector_search(host, &a, &b, q, &avail, limits, Some(rng.gen()))?;
            nodes += used;
            match outcome {
                SearchOutcome::Found(c) => {
                    closing = Some(c);
                    break;
                }
                SearchOutcome::BudgetExceeded => exhausted = false,
                SearchOutcome::Exhausted => {}
            }
        }
        let Some(c) = closing else {
            return Err(Error::Unconnectable { from: last, to: 0, exhausted });
        };
        let inner = &c.seq()[ell..c.seq().len() - ell];
        interior.extend_from_slice(inner);
        chain.extend_from_slice(inner);
    }
    Ok(Chain { seq: chain, interior, nodes })
}

fn standard_first(k: usize, ell: usize) -> impl FnMut(usize, usize) -> Vec<usize> {
    let std = standard_interior(k, ell);
    move |_, available| {
        let mut v = vec![std];
        v.extend(connector_interior_sizes(k, ell, std).into_iter().filter(|&q| q != std));
        v.retain(|&q| q <= available);
        v
    }
}

fn mask_of(host: &KUniformHypergraph, x: &VertexSet, paths: &[EllPath]) -> Result<Vec<bool>> {
    let mut mask = vec![false; host.n()];
    for v in x.iter().filter(|&v| (v as usize) < host.n()) {
        mask[v as usize] = true;
    }
    for p in paths {
        if let Some(&v) = p.seq().iter().find(|&&v| x.contains(v)) {
            return Err(Error::Precondition(format!("vertex {v} lies on a path and in X")));
        }
    }
    Ok(mask)
}

/// Joins vertex-disjoint paths into one ℓ-cycle containing each of them as a
/// path segment. Connector interiors come from `x`; each connector has the
/// standard length or, failing that, a shorter admissible length.
pub fn connect_paths_into_cycle(
    host: &KUniformHypergraph,
    paths: &[EllPath],
    x: &VertexSet,
    limits: &SearchLimits,
    seed: u64,
) -> Result<EllCycle> {
    limits.validate()?;
    let first = paths.first().ok_or(Error::NothingToConnect)?;
    let mask = mask_of(host, x, paths)?;
    let mut policy = standard_first(first.k(), first.ell());
    let chain = build_chain(host, paths, &mask, limits, seed, &mut policy, true)?;
    EllCycle::new(chain.seq, first.k(), first.ell())
}

/// Joins vertex-disjoint paths into one ℓ-path, as [`connect_paths_into_cycle`]
/// without the closing connector.
pub fn connect_paths_into_path(
    host: &KUniformHypergraph,
    paths: &[EllPath],
    x: &VertexSet,
    limits: &SearchLimits,
    seed: u64,
) -> Result<EllPath> {
    limits.validate()?;
    let first = paths.first().ok_or(Error::NothingToConnect)?;
    let mask = mask_of(host, x, paths)?;
    let mut policy = standard_first(first.k(), first.ell());
    let chain = build_chain(host, paths, &mask, limits, seed, &mut policy, false)?;
    EllPath::new(chain.seq, first.k(), first.ell())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::is_hamilton_ell_cycle;

    fn tuple(v: &[Vertex]) -> OrderedTuple {
        OrderedTuple::new(v.to_vec()).unwrap()
    }

    #[test]
    fn sizes() {
        assert_eq!(connector_interior_sizes(3, 2, 5), vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(connector_interior_sizes(4, 2, 6), vec![0, 2, 4, 6]);
        assert_eq!(connector_interior_sizes(5, 2, 10), vec![1, 4, 7, 10]);
        assert_eq!(standard_interior(3, 2), 5);
    }

    #[test]
    fn connecting_path_in_complete_host() {
        let k = KUniformHypergraph::complete(20, 3).unwrap();
        let x = VertexSet::new(4..20).unwrap();
        let p = find_connecting_path(&k, &tuple(&[0, 1]), &tuple(&[2, 3]), &x, &VertexSet::default(), &SearchLimits::default())
            .unwrap()
            .found()
            .unwrap();
        assert_eq!(p.vertex_count(), 9);
        assert_eq!(p.beg(), tuple(&[0, 1]));
        assert_eq!(p.end(), tuple(&[2, 3]));
        p.validate_in(&k).unwrap();
        assert!(p.interior().iter().all(|v| x.contains(v)));
    }

    #[test]
    fn connecting_path_negative() {
        let e = KUniformHypergraph::empty(20, 3).unwrap();
        let x = VertexSet::new(4..20).unwrap();
        let lim = SearchLimits::default();
        let none = VertexSet::default();
        assert_eq!(find_connecting_path(&e, &tuple(&[0, 1]), &tuple(&[2, 3]), &x, &none, &lim).unwrap(), SearchOutcome::Exhausted);
        let k = KUniformHypergraph::complete(20, 3).unwrap();
        assert_eq!(find_connecting_path(&k, &tuple(&[0, 1]), &tuple(&[2, 3]), &x, &x, &lim).unwrap(), SearchOutcome::Exhausted);
    }

    #[test]
    fn cycles_from_paths() {
        let k = KUniformHypergraph::complete(20, 3).unwrap();
        let p = EllPath::new(vec![0, 1, 2, 3], 3, 2).unwrap();
        let q = EllPath::new(vec![4, 5, 6, 7, 8], 3, 2).unwrap();
        let x = VertexSet::new(9..20).unwrap();
        let c = connect_paths_into_cycle(&k, &[p.clone(), q.clone()], &x, &SearchLimits::default(), 0).unwrap();
        assert!(c.contains_segment(&p) && c.contains_segment(&q));
        assert!(c.windows().all(|w| k.contains_edge(&w)));
        let single = connect_paths_into_cycle(&k, &[p.clone()], &x, &SearchLimits::default(), 0).unwrap();
        assert!(single.contains_segment(&p));
        assert!(matches!(connect_paths_into_cycle(&k, &[], &x, &SearchLimits::default(), 0), Err(Error::NothingToConnect)));
    }

    #[test]
    fn hamilton_when_interiors_fill_the_rest() {
        let k = KUniformHypergraph::complete(9, 3).unwrap();
        let p = EllPath::new(vec![0, 1, 2, 3], 3, 2).unwrap();
        let x = VertexSet::new(4..9).unwrap();
        let c = connect_paths_into_cycle(&k, &[p], &x, &SearchLimits::default(), 0).unwrap();
        assert!(is_hamilton_ell_cycle(&k, &c).unwrap());
    }
}
