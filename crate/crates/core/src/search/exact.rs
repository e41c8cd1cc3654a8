use std::collections::BTreeMap;

use super::fill::{cyclic_windows, fill, FillSpec};
use super::{SearchLimits, SearchOutcome};
use crate::error::{Error, Result};
use crate::hypergraph::KUniformHypergraph;
use crate::paths::{is_hamilton_ell_cycle, EllCycle};

/// Decides whether `host` has a Hamilton ℓ-cycle by exhaustive backtracking.
///
/// With symmetry breaking on, vertex 0 sits at a position in `0..k−ℓ` that
/// starts its block (positions lying in exactly the same windows), vertices
/// increase within every block, and for `k − ℓ = 1` the cycle is oriented by
/// `seq[1] < seq[n−1]`. Every Hamilton ℓ-cycle has a representative of this
/// form under edge rotations, block permutations and reversal.
pub fn exact_hamilton_search(
    host: &KUniformHypergraph,
    ell: usize,
    limits: &SearchLimits,
) -> Result<SearchOutcome<EllCycle>> {
    limits.validate()?;
    let (n, k) = (host.n(), host.k());
    if ell == 0 || ell >= k {
        return Err(Error::InvalidParameter(format!("need 1 <= l < k, got k = {k}, l = {ell}")));
    }
    let d = k - ell;
    if n % d != 0 || n < k + d {
        return Ok(SearchOutcome::Exhausted);
    }
    let windows = cyclic_windows(n, k, d);

    let mut runs: Vec<(Vec<Option<u32>>, Vec<usize>, Vec<(usize, usize)>)> = Vec::new();
    if limits.symmetry {
        let mut blocks: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for pos in 0..n {
            let mut sig: Vec<usize> = (0..windows.len()).filter(|&w| windows[w].contains(&pos)).collect();
            sig.sort_unstable();
            blocks.entry(sig).or_default().push(pos);
        }
        let mut less = Vec::new();
        let mut block_min = vec![0; n];
        for ps in blocks.values() {
            for w in ps.windows(2) {
                less.push((w[0], w[1]));
            }
            for &p in ps {
                block_min[p] = ps[0];
            }
        }
        if d == 1 && n >= 3 {
            less.push((1, n - 1));
        }
        for p in (0..d).filter(|&p| block_min[p] == p) {
            let mut fixed = vec![None; n];
            fixed[p] = Some(0);
            let order = (1..n).map(|i| (p + i) % n).collect();
            runs.push((fixed, order, less.clone()));
        }
    } else {
        runs.push((vec![None; n], (0..n).collect(), Vec::new()));
    }

    let mut spent = 0u64;
    for (fixed, order, less_than) in runs {
        let remaining = limits.nodes.saturating_sub(spent);
        if remaining == 0 {
            return Ok(SearchOutcome::BudgetExceeded);
        }
        let spec = FillSpec {
            host,
            len: n,
            windows: windows.clone(),
            fixed,
            order,
            allowed: vec![true; n],
            less_than,
            fail_first: true,
            shuffle: None,
            low_degree_first: true,
        };
        let (outcome, nodes) = fill(&spec, &SearchLimits { nodes: remaining, ..*limits });
        spent += nodes;
        match outcome {
            SearchOutcome::Found(seq) => {
                let cyc = EllCycle::new(seq, k, ell)?;
                debug_assert!(is_hamilton_ell_cycle(host, &cyc).unwrap_or(false));
                return Ok(SearchOutcome::Found(cyc));
            }
            SearchOutcome::BudgetExceeded => return Ok(SearchOutcome::BudgetExceeded),
            SearchOutcome::Exhausted => {}
        }
    }
    Ok(SearchOutcome::Exhausted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::extremal_construction;

    #[test]
    fn small_examples() {
        let lim = SearchLimits::default();
        let k6 = KUniformHypergraph::complete(6, 3).unwrap();
        let c = exact_hamilton_search(&k6, 2, &lim).unwrap().found().unwrap();
        assert!(is_hamilton_ell_cycle(&k6, &c).unwrap());
        let e6 = KUniformHypergraph::empty(6, 3).unwrap();
        assert_eq!(exact_hamilton_search(&e6, 2, &lim).unwrap(), SearchOutcome::Exhausted);
        let ext = extremal_construction(9, 3, 1.0 / 9.0).unwrap();
        assert_eq!(exact_hamilton_search(&ext, 2, &lim).unwrap(), SearchOutcome::Exhausted);
    }

    #[test]
    fn loose_and_wide_steps() {
        let lim = SearchLimits::default();
        for (n, k, ell) in [(8, 4, 2), (9, 4, 1), (8, 3, 1), (10, 5, 3)] {
            let g = KUniformHypergraph::complete(n, k).unwrap();
            let c = exact_hamilton_search(&g, ell, &lim).unwrap().found().unwrap();
            assert!(is_hamilton_ell_cycle(&g, &c).unwrap(), "({n},{k},{ell})");
        }
        let g = KUniformHypergraph::complete(7, 4).unwrap();
        assert_eq!(exact_hamilton_search(&g, 2, &lim).unwrap(), SearchOutcome::Exhausted);
    }

    #[test]
    fn tiny_budget_is_inconclusive() {
        let k = KUniformHypergraph::complete(9, 3).unwrap();
        let lim = SearchLimits::with_nodes(2);
        assert_eq!(exact_hamilton_search(&k, 2, &lim).unwrap(), SearchOutcome::BudgetExceeded);
    }
}
