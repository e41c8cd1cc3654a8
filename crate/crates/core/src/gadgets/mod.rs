//! The absorbing gadget, the graded connector family, and pinned embeddings of
//! gadgets into host graphs.
//!
//! Gadget vertices are 1-based labels. When a gadget is exported as a graph,
//! label `x` becomes vertex `x − 1`.

mod absorber;
mod connector;
mod embedding;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use absorber::{absorb, build_absorber, can_absorb, verify_absorber, Absorber};
pub use connector::{build_connector_family, reverse_tuple, verify_connector_family, ConnectorFamily};
pub use embedding::{
    count_pinned_embeddings, count_problem, find_embedding, EmbeddingCount, EmbeddingProblem, PinnedEmbedding,
};

use crate::hypergraph::Vertex;

/// Gadget vertex label, starting at 1.
pub type Label = u32;

/// One named pass/fail entry of a certification report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.to_string(), passed, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Graph export of a gadget: the interchange fields plus a label map and the
/// distinguished sequences, all as 0-based vertex indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetJson {
    pub n: usize,
    pub k: usize,
    pub edges: Vec<Vec<Vertex>>,
    pub labels: BTreeMap<String, Vertex>,
    #[serde(flatten)]
    pub parts: BTreeMap<String, serde_json::Value>,
}

/// Sorts an edge given as labels.
pub(crate) fn sorted_edge(e: impl IntoIterator<Item = Label>) -> Vec<Label> {
    let mut v: Vec<Label> = e.into_iter().collect();
    v.sort_unstable();
    v
}

/// Windows `seq[r·d .. r·d + k]` of a label sequence, each sorted.
pub(crate) fn path_windows(seq: &[Label], k: usize, ell: usize) -> Vec<Vec<Label>> {
    let d = k - ell;
    if seq.len() < k {
        return Vec::new();
    }
    (0..=(seq.len() - k) / d)
        .map(|r| sorted_edge(seq[r * d..r * d + k].iter().copied()))
        .collect()
}

/// Finds a vertex sequence whose ℓ-path windows are exactly `edges`, if one
/// exists. Tries edge orders in which consecutive edges share `ℓ` vertices and
/// accepts one once every vertex's window membership matches a position's.
pub fn recognize_ell_path(edges: &[Vec<Vertex>], k: usize, ell: usize) -> Option<Vec<Vertex>> {
    let m = edges.len();
    if m == 0 || ell == 0 || ell >= k || edges.iter().any(|e| e.len() != k) {
        return None;
    }
    let d = k - ell;
    let b = m * d + ell;
    let mut vertices: Vec<Vertex> = edges.iter().flatten().copied().collect();
    vertices.sort_unstable();
    vertices.dedup();
    if vertices.len() != b {
        return None;
    }
    let position_sigs: Vec<Vec<usize>> = (0..b)
        .map(|i| (0..m).filter(|&r| r * d <= i && i < r * d + k).collect())
        .collect();
    let mut sorted_pos = position_sigs.clone();
    sorted_pos.sort();

    let shared = |a: &[Vertex], b: &[Vertex]| a.iter().filter(|v| b.contains(v)).count();
    let mut order = Vec::with_capacity(m);
    let mut used = vec![false; m];

    fn extend(
        edges: &[Vec<Vertex>],
        ell: usize,
        order: &mut Vec<usize>,
        used: &mut [bool],
        accept: &mut dyn FnMut(&[usize]) -> bool,
        shared: &dyn Fn(&[Vertex], &[Vertex]) -> usize,
    ) -> bool {
        if order.len() == edges.len() {
            return accept(order);
        }
        for i in 0..edges.len() {
            if used[i] {
                continue;
            }
            if let Some(&last) = order.last() {
                if shared(&edges[last], &edges[i]) != ell {
                    continue;
                }
            }
            used[i] = true;
            order.push(i);
            if extend(edges, ell, order, used, accept, shared) {
                return true;
            }
            order.pop();
            used[i] = false;
        }
        false
    }

    let mut found = None;
    let mut accept = |order: &[usize]| -> bool {
        let mut sigs: Vec<(Vec<usize>, Vertex)> = vertices
            .iter()
            .map(|&v| {
                let sig = order
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| edges[e].contains(&v))
                    .map(|(r, _)| r)
                    .collect();
                (sig, v)
            })
            .collect();
        sigs.sort();
        if sigs.iter().map(|(s, _)| s).ne(sorted_pos.iter()) {
            return false;
        }
        // hand out vertices to positions with matching membership
        let mut pool: BTreeMap<Vec<usize>, Vec<Vertex>> = BTreeMap::new();
        for (s, v) in sigs {
            pool.entry(s).or_default().push(v);
        }
        let seq = position_sigs
            .iter()
            .map(|s| pool.get_mut(s).and_then(|vs| vs.pop()).expect("signature multisets agree"))
            .collect();
        found = Some(seq);
        true
    };
    extend(edges, ell, &mut order, &mut used, &mut accept, &shared);
    found
}

/// Splits an edge list into connected components (by shared vertices).
pub(crate) fn components(edges: &[Vec<Vertex>]) -> Vec<Vec<Vec<Vertex>>> {
    let mut comp: Vec<usize> = (0..edges.len()).collect();
    fn find(c: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while c[r] != r {
            r = c[r];
        }
        c[i] = r;
        r
    }
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            if edges[i].iter().any(|v| edges[j].contains(v)) {
                let (a, b) = (find(&mut comp, i), find(&mut comp, j));
                comp[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<Vec<Vertex>>> = BTreeMap::new();
    for i in 0..edges.len() {
        let root = find(&mut comp, i);
        groups.entry(root).or_default().push(edges[i].clone());
    }
    groups.into_values().collect()
}

/// `⌈k / (k − ℓ)⌉ − 1`.
pub fn rand_path_length(k: usize, ell: usize) -> usize {
    k.div_ceil(k - ell) - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recognizes_paths() {
        let edges = vec![vec![0, 1, 2], vec![1, 2, 3], vec![2, 3, 4]];
        let seq = recognize_ell_path(&edges, 3, 2).unwrap();
        assert!(seq == vec![0, 1, 2, 3, 4] || seq == vec![4, 3, 2, 1, 0]);
        // a loose 3-path with a shared vertex is not a 2-path
        let loose = vec![vec![0, 1, 2], vec![2, 3, 4]];
        assert!(recognize_ell_path(&loose, 3, 2).is_none());
        assert!(recognize_ell_path(&loose, 3, 1).is_some());
        // three edges through one vertex
        let star = vec![vec![0, 1, 2], vec![0, 3, 4], vec![0, 5, 6]];
        assert!(recognize_ell_path(&star, 3, 1).is_none());
    }

    #[test]
    fn recognized_sequence_reproduces_edges() {
        let edges = vec![vec![0, 1, 2, 3], vec![2, 3, 4, 5], vec![4, 5, 6, 7]];
        let seq = recognize_ell_path(&edges, 4, 2).unwrap();
        let mut windows = path_windows(&seq, 4, 2);
        windows.sort();
        assert_eq!(windows, edges);
    }

    #[test]
    fn component_split() {
        let edges = vec![vec![0, 1], vec![1, 2], vec![5, 6]];
        assert_eq!(components(&edges).len(), 2);
    }
}
