//! ℓ-paths and ℓ-cycles in k-graphs.
//!
//! With `d = k − ℓ`, an ℓ-path of length `m` is a sequence of `b = m·d + ℓ`
//! distinct vertices whose edges are the windows `seq[r·d .. r·d + k]`. An
//! ℓ-cycle on `n` vertices (`d | n`) has the cyclic windows starting at
//! `0, d, 2d, …`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{KUniformHypergraph, Vertex, VertexSet};

fn check_ell(k: usize, ell: usize) -> Result<()> {
    if ell == 0 || ell >= k {
        return Err(Error::InvalidParameter(format!("need 1 <= l < k, got k = {k}, l = {ell}")));
    }
    Ok(())
}

fn first_repeat(seq: &[Vertex]) -> Option<Vertex> {
    let mut seen = HashSet::with_capacity(seq.len());
    seq.iter().copied().find(|v| !seen.insert(*v))
}

fn sorted(window: impl IntoIterator<Item = Vertex>) -> Vec<Vertex> {
    let mut e: Vec<Vertex> = window.into_iter().collect();
    e.sort_unstable();
    e
}

/// `b = m(k − ℓ) + ℓ`, the number of vertices of an ℓ-path of length `m`.
pub fn path_vertex_count(k: usize, ell: usize, m: usize) -> Result<usize> {
    check_ell(k, ell)?;
    if m == 0 {
        return Err(Error::InvalidParameter("path length must be at least 1".into()));
    }
    Ok(m * (k - ell) + ell)
}

/// An ordered tuple of distinct vertices, used for path ends.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vertex>", into = "Vec<Vertex>")]
pub struct OrderedTuple(Vec<Vertex>);

impl OrderedTuple {
    pub fn new(entries: Vec<Vertex>) -> Result<Self> {
        if let Some(v) = first_repeat(&entries) {
            return Err(Error::InvalidQuery(format!("vertex {v} repeated in tuple")));
        }
        Ok(OrderedTuple(entries))
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> OrderedTuple {
        OrderedTuple(self.0.iter().rev().copied().collect())
    }

    pub fn to_set(&self) -> VertexSet {
        VertexSet::collect_from(self.0.iter().copied())
    }
}

impl TryFrom<Vec<Vertex>> for OrderedTuple {
    type Error = Error;

    fn try_from(v: Vec<Vertex>) -> Result<Self> {
        OrderedTuple::new(v)
    }
}

impl From<OrderedTuple> for Vec<Vertex> {
    fn from(t: OrderedTuple) -> Self {
        t.0
    }
}

/// An ℓ-path, stored by one chosen vertex sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EllPath {
    k: usize,
    ell: usize,
    seq: Vec<Vertex>,
}

impl EllPath {
    /// Checks the shape of `seq` (distinct vertices, admissible length) but not
    /// the presence of its edges in any host.
    pub fn new(seq: Vec<Vertex>, k: usize, ell: usize) -> Result<Self> {
        check_ell(k, ell)?;
        let d = k - ell;
        if seq.len() < k || (seq.len() - ell) % d != 0 {
            return Err(Error::Arity { len: seq.len(), k, ell });
        }
        if let Some(v) = first_repeat(&seq) {
            return Err(Error::InvalidQuery(format!("vertex {v} repeated in sequence")));
        }
        Ok(EllPath { k, ell, seq })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn seq(&self) -> &[Vertex] {
        &self.seq
    }

    pub fn into_seq(self) -> Vec<Vertex> {
        self.seq
    }

    /// Number of edges `m`.
    pub fn length(&self) -> usize {
        (self.seq.len() - self.ell) / (self.k - self.ell)
    }

    pub fn vertex_count(&self) -> usize {
        self.seq.len()
    }

    /// The edge windows in path order, each in sequence order.
    pub fn windows(&self) -> impl Iterator<Item = &[Vertex]> + '_ {
        let d = self.k - self.ell;
        (0..self.length()).map(move |r| &self.seq[r * d..r * d + self.k])
    }

    /// The edges as sorted vertex lists, in path order.
    pub fn edges(&self) -> Vec<Vec<Vertex>> {
        self.windows().map(|w| sorted(w.iter().copied())).collect()
    }

    pub fn vertex_set(&self) -> VertexSet {
        VertexSet::collect_from(self.seq.iter().copied())
    }

    /// Errors with the first window whose edge is missing from `host`.
    pub fn validate_in(&self, host: &KUniformHypergraph) -> Result<()> {
        if host.k() != self.k {
            return Err(Error::UniformityMismatch { expected: host.k(), found: self.k });
        }
        for (r, w) in self.windows().enumerate() {
            let e = sorted(w.iter().copied());
            if !host.contains_sorted(&e) {
                return Err(Error::NotAPathInHost { window: r, edge: e });
            }
        }
        Ok(())
    }

    pub fn beg(&self) -> OrderedTuple {
        OrderedTuple(self.seq[..self.ell].to_vec())
    }

    pub fn end(&self) -> OrderedTuple {
        OrderedTuple(self.seq[self.seq.len() - self.ell..].to_vec())
    }

    /// Vertices outside both ends.
    pub fn interior(&self) -> VertexSet {
        let b = self.seq.len();
        let ends: HashSet<Vertex> = self.seq[..self.ell]
            .iter()
            .chain(&self.seq[b - self.ell..])
            .copied()
            .collect();
        VertexSet::collect_from(self.seq.iter().copied().filter(|v| !ends.contains(v)))
    }

    pub fn ends_and_interior(&self) -> (OrderedTuple, OrderedTuple, VertexSet) {
        (self.beg(), self.end(), self.interior())
    }

    /// `PQ`: requires `P^end = Q^beg` and no other shared vertex.
    pub fn concat(&self, other: &EllPath) -> Result<EllPath> {
        if self.k != other.k || self.ell != other.ell {
            return Err(Error::InvalidParameter(format!(
                "cannot join a ({}, {}) path with a ({}, {}) path",
                self.k, self.ell, other.k, other.ell
            )));
        }
        let (end, beg) = (self.end(), other.beg());
        if end != beg {
            return Err(Error::EndMismatch { left: end.0, right: beg.0 });
        }
        let mine: HashSet<Vertex> = self.seq.iter().copied().collect();
        if let Some(&v) = other.seq[self.ell..].iter().find(|v| mine.contains(v)) {
            return Err(Error::VertexOverlap(v));
        }
        let mut seq = self.seq.clone();
        seq.extend_from_slice(&other.seq[self.ell..]);
        Ok(EllPath { k: self.k, ell: self.ell, seq })
    }

    /// The same path traversed backwards; ends swap and reverse.
    pub fn reversed(&self) -> EllPath {
        EllPath {
            k: self.k,
            ell: self.ell,
            seq: self.seq.iter().rev().copied().collect(),
        }
    }

    /// Drops the last `k − ℓ` vertices, giving the path of length `m − 1`.
    pub fn truncated(&self) -> Option<EllPath> {
        if self.length() < 2 {
            return None;
        }
        let d = self.k - self.ell;
        Some(EllPath {
            k: self.k,
            ell: self.ell,
            seq: self.seq[..self.seq.len() - d].to_vec(),
        })
    }

    pub fn to_json(&self) -> SequenceJson {
        SequenceJson { k: self.k, l: self.ell, seq: self.seq.clone(), cyclic: false }
    }
}

/// Builds the path on `seq` and checks every edge window against `host`.
pub fn path_from_sequence(seq: Vec<Vertex>, k: usize, ell: usize, host: &KUniformHypergraph) -> Result<EllPath> {
    let path = EllPath::new(seq, k, ell)?;
    path.validate_in(host)?;
    Ok(path)
}

/// An ℓ-cycle given by a cyclic vertex sequence. Construction only checks the
/// parameters; [`structure_error`](Self::structure_error) reports whether the
/// sequence can carry an ℓ-cycle at all.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EllCycle {
    k: usize,
    ell: usize,
    seq: Vec<Vertex>,
}

impl EllCycle {
    pub fn new(seq: Vec<Vertex>, k: usize, ell: usize) -> Result<Self> {
        check_ell(k, ell)?;
        Ok(EllCycle { k, ell, seq })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn seq(&self) -> &[Vertex] {
        &self.seq
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    fn d(&self) -> usize {
        self.k - self.ell
    }

    /// Why the sequence is not an ℓ-cycle regardless of host, if it is not.
    pub fn structure_error(&self) -> Option<String> {
        let (n, d) = (self.seq.len(), self.d());
        if n % d != 0 {
            return Some(format!("{d} does not divide {n}"));
        }
        if n < self.k + d {
            return Some(format!("{n} vertices are too few for an {}-cycle in a {}-graph", self.ell, self.k));
        }
        first_repeat(&self.seq).map(|v| format!("vertex {v} repeated"))
    }

    /// Number of edges, `n / (k − ℓ)`.
    pub fn edge_count(&self) -> usize {
        self.seq.len() / self.d()
    }

    /// The cyclic windows starting at `0, d, 2d, …`, each in sequence order.
    pub fn windows(&self) -> impl Iterator<Item = Vec<Vertex>> + '_ {
        let (n, d, k) = (self.seq.len(), self.d(), self.k);
        (0..self.edge_count()).map(move |r| (0..k).map(|j| self.seq[(r * d + j) % n]).collect())
    }

    pub fn edges(&self) -> Vec<Vec<Vertex>> {
        self.windows().map(sorted).collect()
    }

    /// Rotation so that position `s` becomes position 0.
    fn rotate(&self, s: usize) -> Vec<Vertex> {
        let n = self.seq.len();
        (0..n).map(|i| self.seq[(i + s) % n]).collect()
    }

    /// The cycle rotated left by `r` edges.
    pub fn rotated(&self, r: usize) -> EllCycle {
        let s = if self.seq.is_empty() { 0 } else { (r * self.d()) % self.seq.len() };
        EllCycle { k: self.k, ell: self.ell, seq: self.rotate(s) }
    }

    /// The cycle traversed backwards, re-aligned so that it has the same edge
    /// set. Plain reversal moves the windows unless `k − ℓ` divides `ℓ`.
    pub fn reversed(&self) -> EllCycle {
        let d = self.d();
        let n = self.seq.len();
        let rev: Vec<Vertex> = self.seq.iter().rev().copied().collect();
        let s = (d - self.ell % d) % d;
        let seq = (0..n).map(|i| rev[(i + s) % n.max(1)]).collect();
        EllCycle { k: self.k, ell: self.ell, seq }
    }

    /// Lexicographically least sequence over edge rotations and reversal.
    pub fn canonical(&self) -> EllCycle {
        let rev = self.reversed();
        let mut best = self.seq.clone();
        for c in [self, &rev] {
            for r in 0..c.edge_count() {
                let cand = c.rotate(r * self.d());
                if cand < best {
                    best = cand;
                }
            }
        }
        EllCycle { k: self.k, ell: self.ell, seq: best }
    }

    /// The path formed by `m` consecutive edges starting at edge `r`.
    pub fn segment(&self, r: usize, m: usize) -> Result<EllPath> {
        let (n, d) = (self.seq.len(), self.d());
        let b = path_vertex_count(self.k, self.ell, m)?;
        if b > n {
            return Err(Error::InvalidParameter(format!("segment of {m} edges needs {b} > {n} vertices")));
        }
        let start = r * d;
        EllPath::new((0..b).map(|i| self.seq[(start + i) % n]).collect(), self.k, self.ell)
    }

    /// Whether `path` occurs as a path segment: its sequence (in one of its two
    /// directions) appears contiguously with its edges on cycle windows.
    pub fn contains_segment(&self, path: &EllPath) -> bool {
        if path.k != self.k || path.ell != self.ell || self.structure_error().is_some() {
            return false;
        }
        let (n, d) = (self.seq.len(), self.d());
        let b = path.seq.len();
        if b > n {
            return false;
        }
        let rev = path.reversed();
        (0..self.edge_count()).any(|r| {
            let start = r * d;
            [&path.seq, &rev.seq]
                .iter()
                .any(|s| (0..b).all(|i| self.seq[(start + i) % n] == s[i]))
        })
    }

    pub fn to_json(&self) -> SequenceJson {
        SequenceJson { k: self.k, l: self.ell, seq: self.seq.clone(), cyclic: true }
    }
}

/// Whether `cyc` is a Hamilton ℓ-cycle of `host`: it covers every vertex once,
/// `k − ℓ` divides `n`, and every window is an edge.
pub fn is_hamilton_ell_cycle(host: &KUniformHypergraph, cyc: &EllCycle) -> Result<bool> {
    if cyc.k != host.k() {
        return Err(Error::UniformityMismatch { expected: host.k(), found: cyc.k });
    }
    let n = host.n();
    if cyc.seq.len() != n || cyc.structure_error().is_some() {
        return Ok(false);
    }
    if cyc.seq.iter().any(|&v| v as usize >= n) {
        return Ok(false);
    }
    Ok(cyc.windows().all(|w| host.contains_edge(&w)))
}

/// Interchange form for paths and cycles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceJson {
    pub k: usize,
    pub l: usize,
    pub seq: Vec<Vertex>,
    pub cyclic: bool,
}

/// A parsed path or cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sequence {
    Path(EllPath),
    Cycle(EllCycle),
}

impl SequenceJson {
    pub fn parse(&self) -> Result<Sequence> {
        if self.cyclic {
            Ok(Sequence::Cycle(EllCycle::new(self.seq.clone(), self.k, self.l)?))
        } else {
            Ok(Sequence::Path(EllPath::new(self.seq.clone(), self.k, self.l)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn host(n: usize, k: usize, edges: &[&[Vertex]]) -> KUniformHypergraph {
        KUniformHypergraph::new(n, k, edges.iter().map(|e| e.to_vec())).unwrap()
    }

    #[test]
    fn path_from_sequence_examples() {
        let h = host(4, 3, &[&[0, 1, 2], &[1, 2, 3]]);
        let p = path_from_sequence(vec![0, 1, 2, 3], 3, 2, &h).unwrap();
        assert_eq!(p.length(), 2);
        let h2 = host(4, 3, &[&[0, 1, 2]]);
        match path_from_sequence(vec![0, 1, 2, 3], 3, 2, &h2) {
            Err(Error::NotAPathInHost { window, edge }) => {
                assert_eq!(window, 1);
                assert_eq!(edge, vec![1, 2, 3]);
            }
            other => panic!("unexpected {other:?}"),
        }
        let k4 = KUniformHypergraph::complete(7, 4).unwrap();
        assert!(matches!(
            path_from_sequence((0..7).collect(), 4, 2, &k4),
            Err(Error::Arity { len: 7, .. })
        ));
    }

    #[test]
    fn ends_examples() {
        let p = EllPath::new(vec![0, 1, 2, 3], 3, 2).unwrap();
        let (b, e, i) = p.ends_and_interior();
        assert_eq!(b.as_slice(), &[0, 1]);
        assert_eq!(e.as_slice(), &[2, 3]);
        assert!(i.is_empty());
        let p = EllPath::new((0..6).collect(), 3, 2).unwrap();
        let (b, e, i) = p.ends_and_interior();
        assert_eq!((b.as_slice(), e.as_slice(), i.as_slice()), (&[0, 1][..], &[4, 5][..], &[2, 3][..]));
        let p = EllPath::new(vec![0, 1, 2, 3], 4, 2).unwrap();
        assert_eq!(p.length(), 1);
        assert!(p.interior().is_empty());
    }

    #[test]
    fn concat_examples() {
        let p = EllPath::new(vec![0, 1, 2, 3], 3, 2).unwrap();
        let q = EllPath::new(vec![2, 3, 4, 5], 3, 2).unwrap();
        assert_eq!(p.concat(&q).unwrap().seq(), &[0, 1, 2, 3, 4, 5]);
        let q = EllPath::new(vec![3, 2, 4, 5], 3, 2).unwrap();
        assert!(matches!(p.concat(&q), Err(Error::EndMismatch { .. })));
        let q = EllPath::new(vec![2, 3, 0, 4], 3, 2).unwrap();
        assert!(matches!(p.concat(&q), Err(Error::VertexOverlap(0))));
    }

    #[test]
    fn hamilton_examples() {
        let k6 = KUniformHypergraph::complete(6, 3).unwrap();
        let c = EllCycle::new((0..6).collect(), 3, 2).unwrap();
        assert!(is_hamilton_ell_cycle(&k6, &c).unwrap());
        let e6 = KUniformHypergraph::empty(6, 3).unwrap();
        assert!(!is_hamilton_ell_cycle(&e6, &c).unwrap());
        let k7 = KUniformHypergraph::complete(7, 4).unwrap();
        let c7 = EllCycle::new((0..7).collect(), 4, 2).unwrap();
        assert!(!is_hamilton_ell_cycle(&k7, &c7).unwrap());
        let k4 = KUniformHypergraph::complete(6, 4).unwrap();
        assert!(matches!(is_hamilton_ell_cycle(&k4, &c), Err(Error::UniformityMismatch { .. })));
    }

    #[test]
    fn vertex_counts() {
        assert_eq!(path_vertex_count(3, 2, 4).unwrap(), 6);
        assert_eq!(path_vertex_count(3, 2, 7).unwrap(), 9);
        assert_eq!(path_vertex_count(4, 2, 1).unwrap(), 4);
        assert!(path_vertex_count(3, 3, 1).is_err());
    }

    #[test]
    fn reversal_keeps_edges() {
        // k = 3, l = 1: plain reversal would shift the windows
        let c = EllCycle::new((0..6).collect(), 3, 1).unwrap();
        let mut a = c.edges();
        let mut b = c.reversed().edges();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        let plain = EllCycle::new((0..6).rev().collect(), 3, 1).unwrap();
        let mut p = plain.edges();
        p.sort();
        assert_ne!(a, p);
    }

    #[test]
    fn canonical_is_rotation_invariant() {
        let c = EllCycle::new(vec![3, 1, 4, 0, 5, 2, 7, 6], 4, 2).unwrap();
        assert_eq!(c.rotated(1).canonical(), c.canonical());
        assert_eq!(c.reversed().canonical(), c.canonical());
    }

    #[test]
    fn segments() {
        let c = EllCycle::new((0..8).collect(), 3, 2).unwrap();
        let s = c.segment(6, 3).unwrap();
        assert_eq!(s.seq(), &[6, 7, 0, 1, 2]);
        assert!(c.contains_segment(&s));
        assert!(c.contains_segment(&s.reversed()));
        let off = EllPath::new(vec![6, 0, 7, 1, 2], 3, 2).unwrap();
        assert!(!c.contains_segment(&off));
    }

    #[test]
    fn json_roundtrip() {
        let p = EllPath::new(vec![4, 2, 0, 1], 3, 2).unwrap();
        let s = serde_json::to_string(&p.to_json()).unwrap();
        assert_eq!(s, r#"{"k":3,"l":2,"seq":[4,2,0,1],"cyclic":false}"#);
        let back: SequenceJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.parse().unwrap(), Sequence::Path(p));
    }
}
