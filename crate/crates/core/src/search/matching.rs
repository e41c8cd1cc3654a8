use super::SearchLimits;
use crate::error::Result;
use crate::hypergraph::{KUniformHypergraph, Vertex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Matching {
    /// Edges covering every vertex exactly once, sorted.
    Perfect(Vec<Vec<Vertex>>),
    /// No perfect matching exists; the reason says why.
    Impossible(String),
    BudgetExceeded,
}

/// Finds a perfect matching by backtracking on the lowest unmatched vertex.
pub fn perfect_matching(g: &KUniformHypergraph, limits: &SearchLimits) -> Result<Matching> {
    limits.validate()?;
    let (n, k) = (g.n(), g.k());
    if n % k != 0 {
        return Ok(Matching::Impossible(format!("{k} does not divide {n}")));
    }
    let mut matched = vec![false; n];
    let mut chosen = Vec::with_capacity(n / k);
    let mut nodes = 0u64;
    match go(g, &mut matched, &mut chosen, &mut nodes, limits.nodes) {
        Some(true) => {
            let mut edges: Vec<Vec<Vertex>> = chosen.iter().map(|&id| g.edges()[id as usize].clone()).collect();
            edges.sort();
            Ok(Matching::Perfect(edges))
        }
        Some(false) => Ok(Matching::Impossible("search exhausted".into())),
        None => Ok(Matching::BudgetExceeded),
    }
}

fn go(g: &KUniformHypergraph, matched: &mut [bool], chosen: &mut Vec<u32>, nodes: &mut u64, budget: u64) -> Option<bool> {
    *nodes += 1;
    if *nodes > budget {
        return None;
    }
    let Some(v) = matched.iter().position(|&m| !m) else {
        return Some(true);
    };
    for &id in g.incident(v as Vertex) {
        let e = &g.edges()[id as usize];
        if e.iter().any(|&u| matched[u as usize]) {
            continue;
        }
        for &u in e {
            matched[u as usize] = true;
        }
        chosen.push(id);
        match go(g, matched, chosen, nodes, budget) {
            Some(true) => return Some(true),
            None => return None,
            Some(false) => {}
        }
        chosen.pop();
        for &u in e {
            matched[u as usize] = false;
        }
    }
    Some(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let lim = SearchLimits::default();
        let k4 = KUniformHypergraph::complete(4, 2).unwrap();
        match perfect_matching(&k4, &lim).unwrap() {
            Matching::Perfect(m) => assert_eq!(m.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
        let path = KUniformHypergraph::new(4, 2, vec![vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap();
        assert_eq!(perfect_matching(&path, &lim).unwrap(), Matching::Perfect(vec![vec![0, 1], vec![2, 3]]));
        let k5 = KUniformHypergraph::complete(5, 2).unwrap();
        assert!(matches!(perfect_matching(&k5, &lim).unwrap(), Matching::Impossible(_)));
        let star = KUniformHypergraph::new(4, 2, vec![vec![0, 1], vec![0, 2], vec![0, 3]]).unwrap();
        assert!(matches!(perfect_matching(&star, &lim).unwrap(), Matching::Impossible(_)));
    }

    #[test]
    fn uniformity_one() {
        let g = KUniformHypergraph::complete(3, 1).unwrap();
        assert_eq!(
            perfect_matching(&g, &SearchLimits::default()).unwrap(),
            Matching::Perfect(vec![vec![0], vec![1], vec![2]])
        );
    }
}
