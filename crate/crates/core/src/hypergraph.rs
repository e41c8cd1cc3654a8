//! Immutable k-uniform hypergraphs.
//!
//! Edges are stored as strictly increasing vertex lists, kept in lexicographic
//! order. Membership goes through the colex rank of the edge: a dense bitset
//! when `C(n, k)` is small, a hash set of ranks otherwise. Per-vertex incidence
//! lists back all degree queries.

use std::collections::HashSet;
use std::fmt;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

pub type Vertex = u32;

/// Largest `C(n, k)` for which sampling enumerates every k-subset and the
/// membership index is a dense bitset.
pub const DENSE_LIMIT: u128 = 1 << 24;

/// A sorted set of distinct vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vertex>", into = "Vec<Vertex>")]
pub struct VertexSet(Vec<Vertex>);

impl VertexSet {
    /// Builds a set, rejecting repeated vertices.
    pub fn new(vertices: impl IntoIterator<Item = Vertex>) -> Result<Self> {
        let mut v: Vec<Vertex> = vertices.into_iter().collect();
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidQuery(format!("vertex {} repeated in set", w[0])));
        }
        Ok(VertexSet(v))
    }

    /// Builds a set, silently dropping repeats.
    pub fn collect_from(vertices: impl IntoIterator<Item = Vertex>) -> Self {
        let mut v: Vec<Vertex> = vertices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }

    pub fn range(n: usize) -> Self {
        VertexSet((0..n as Vertex).collect())
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

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.0.iter().copied()
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.iter().copied().filter(|v| !other.contains(*v)).collect())
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet::collect_from(self.iter().chain(other.iter()))
    }
}

impl TryFrom<Vec<Vertex>> for VertexSet {
    type Error = Error;

    fn try_from(v: Vec<Vertex>) -> Result<Self> {
        VertexSet::new(v)
    }
}

impl From<VertexSet> for Vec<Vertex> {
    fn from(s: VertexSet) -> Self {
        s.0
    }
}

/// `C(n, r)` in 128 bits, saturating at `u128::MAX`.
pub fn binomial(n: u64, r: u64) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        // acc * (n - i) / (i + 1) stays integral at each step
        acc = match acc.checked_mul((n - i) as u128) {
            Some(x) => x / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Lexicographic enumeration of the k-subsets of `0..n`.
#[derive(Clone, Debug)]
pub struct KSubsets {
    n: usize,
    current: Vec<Vertex>,
    done: bool,
}

impl KSubsets {
    pub fn new(n: usize, k: usize) -> Self {
        KSubsets {
            n,
            current: (0..k as Vertex).collect(),
            done: k > n,
        }
    }
}

impl Iterator for KSubsets {
    type Item = Vec<Vertex>;

    fn next(&mut self) -> Option<Vec<Vertex>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let k = self.current.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if (self.current[i] as usize) < self.n - k + i {
                self.current[i] += 1;
                for j in i + 1..k {
                    self.current[j] = self.current[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

#[derive(Clone)]
struct RankTable {
    // table[v][i] = C(v, i) for v < n, i <= k
    table: Vec<Vec<u128>>,
}

impl RankTable {
    fn new(n: usize, k: usize) -> Self {
        let table = (0..n.max(1))
            .map(|v| (0..=k).map(|i| binomial(v as u64, i as u64)).collect())
            .collect();
        RankTable { table }
    }

    /// Colex rank of a strictly increasing k-subset.
    fn rank(&self, sorted: &[Vertex]) -> u128 {
        sorted
            .iter()
            .enumerate()
            .map(|(i, &v)| self.table[v as usize][i + 1])
            .sum()
    }

    fn unrank(&self, mut rank: u128, k: usize, n: usize) -> Vec<Vertex> {
        let mut out = vec![0; k];
        let mut hi = n;
        for i in (1..=k).rev() {
            // largest v < hi with C(v, i) <= rank
            let mut v = hi - 1;
            while self.table[v][i] > rank {
                v -= 1;
            }
            rank -= self.table[v][i];
            out[i - 1] = v as Vertex;
            hi = v;
        }
        out
    }
}

#[derive(Clone)]
enum Membership {
    Dense(Vec<u64>),
    Sparse(HashSet<u128>),
}

/// A k-uniform hypergraph on the vertex set `0..n`.
#[derive(Clone)]
pub struct KUniformHypergraph {
    n: usize,
    k: usize,
    edges: Vec<Vec<Vertex>>,
    incidence: Vec<Vec<u32>>,
    ranks: RankTable,
    members: Membership,
}

impl PartialEq for KUniformHypergraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.k == other.k && self.edges == other.edges
    }
}

impl Eq for KUniformHypergraph {}

impl fmt::Debug for KUniformHypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KUniformHypergraph")
            .field("n", &self.n)
            .field("k", &self.k)
            .field("edges", &self.edges.len())
            .finish()
    }
}

fn check_shape(n: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter("uniformity must be at least 1".into()));
    }
    if n > Vertex::MAX as usize {
        return Err(Error::InvalidParameter(format!("{n} vertices exceed the index range")));
    }
    Ok(())
}

impl KUniformHypergraph {
    /// Builds a hypergraph from edges given in any vertex order. Rejects edges
    /// of the wrong size, out-of-range or repeated vertices, and duplicate edges.
    pub fn new(n: usize, k: usize, edges: impl IntoIterator<Item = Vec<Vertex>>) -> Result<Self> {
        check_shape(n, k)?;
        let mut sorted = Vec::new();
        for mut e in edges {
            if e.len() != k {
                return Err(Error::Malformed(format!("edge {e:?} does not have {k} vertices")));
            }
            e.sort_unstable();
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Malformed(format!("edge {e:?} repeats a vertex")));
            }
            if let Some(&v) = e.last() {
                if v as usize >= n {
                    return Err(Error::Malformed(format!("edge {e:?} has a vertex outside 0..{n}")));
                }
            }
            sorted.push(e);
        }
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Malformed(format!("duplicate edge {:?}", w[0])));
        }
        Ok(Self::from_canonical(n, k, sorted))
    }

    /// Edges must already be strictly increasing, in range, unique and sorted.
    pub(crate) fn from_canonical(n: usize, k: usize, edges: Vec<Vec<Vertex>>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        let ranks = RankTable::new(n, k);
        let total = binomial(n as u64, k as u64);
        let mut members = if total <= DENSE_LIMIT {
            Membership::Dense(vec![0u64; (total as usize).div_ceil(64).max(1)])
        } else {
            Membership::Sparse(HashSet::with_capacity(edges.len()))
        };
        let mut incidence = vec![Vec::new(); n];
        for (id, e) in edges.iter().enumerate() {
            let r = ranks.rank(e);
            match &mut members {
                Membership::Dense(bits) => bits[(r / 64) as usize] |= 1 << (r % 64),
                Membership::Sparse(set) => {
                    set.insert(r);
                }
            }
            for &v in e {
                incidence[v as usize].push(id as u32);
            }
        }
        KUniformHypergraph { n, k, edges, incidence, ranks, members }
    }

    pub fn empty(n: usize, k: usize) -> Result<Self> {
        check_shape(n, k)?;
        Ok(Self::from_canonical(n, k, Vec::new()))
    }

    pub fn complete(n: usize, k: usize) -> Result<Self> {
        check_shape(n, k)?;
        Ok(Self::from_canonical(n, k, KSubsets::new(n, k).collect()))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> &[Vec<Vertex>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::range(self.n)
    }

    /// Ids (indices into [`edges`](Self::edges)) of edges containing `v`.
    pub fn incident(&self, v: Vertex) -> &[u32] {
        &self.incidence[v as usize]
    }

    fn has_rank(&self, r: u128) -> bool {
        match &self.members {
            Membership::Dense(bits) => bits[(r / 64) as usize] >> (r % 64) & 1 == 1,
            Membership::Sparse(set) => set.contains(&r),
        }
    }

    /// Membership test for a strictly increasing k-subset.
    pub fn contains_sorted(&self, sorted: &[Vertex]) -> bool {
        if sorted.len() != self.k || sorted.iter().any(|&v| v as usize >= self.n) {
            return false;
        }
        self.has_rank(self.ranks.rank(sorted))
    }

    /// Membership test for a vertex collection in any order.
    pub fn contains_edge(&self, vertices: &[Vertex]) -> bool {
        let mut e = vertices.to_vec();
        e.sort_unstable();
        if e.windows(2).any(|w| w[0] == w[1]) {
            return false;
        }
        self.contains_sorted(&e)
    }

    /// Edges containing every vertex of `set` (any order, no repeats).
    pub fn edges_containing<'a>(&'a self, set: &'a [Vertex]) -> impl Iterator<Item = &'a [Vertex]> + 'a {
        let pivot = set
            .iter()
            .copied()
            .filter(|&v| (v as usize) < self.n)
            .min_by_key(|&v| self.incidence[v as usize].len());
        let ids: &[u32] = match pivot {
            Some(v) if set.iter().all(|&u| (u as usize) < self.n) => &self.incidence[v as usize],
            Some(_) => &[],
            None if set.is_empty() => &[],
            None => &[],
        };
        let all = set.is_empty();
        let direct = ids.iter().map(move |&id| self.edges[id as usize].as_slice());
        let every = self.edges.iter().map(|e| e.as_slice()).filter(move |_| all);
        direct
            .chain(every)
            .filter(move |e| set.iter().all(|v| e.binary_search(v).is_ok()))
    }

    /// Whether some edge contains all of `set`.
    pub fn has_superset(&self, set: &[Vertex]) -> bool {
        match set.len() {
            0 => !self.edges.is_empty(),
            l if l == self.k => self.contains_edge(set),
            _ => self.edges_containing(set).next().is_some(),
        }
    }

    /// `deg(T)`: number of edges containing `T`.
    pub fn degree_of_set(&self, t: &VertexSet) -> Result<usize> {
        if t.len() > self.k {
            return Err(Error::InvalidQuery(format!(
                "set of size {} exceeds uniformity {}",
                t.len(),
                self.k
            )));
        }
        self.check_in_range(t)?;
        Ok(self.edges_containing(t.as_slice()).count())
    }

    /// `deg(S, X)`: edges `e ⊇ S` with `e \ S ⊆ X`.
    pub fn relative_degree(&self, s: &VertexSet, x: &VertexSet) -> Result<usize> {
        if !s.is_disjoint(x) {
            return Err(Error::InvalidQuery("S and X overlap".into()));
        }
        if s.len() > self.k {
            return Err(Error::InvalidQuery(format!(
                "set of size {} exceeds uniformity {}",
                s.len(),
                self.k
            )));
        }
        self.check_in_range(s)?;
        Ok(self
            .edges_containing(s.as_slice())
            .filter(|e| e.iter().all(|&v| s.contains(v) || x.contains(v)))
            .count())
    }

    /// `δ_t(H)`: minimum degree over all t-subsets of the vertex set.
    pub fn min_t_degree(&self, t: usize) -> Result<usize> {
        if t == 0 || t >= self.k {
            return Err(Error::InvalidQuery(format!(
                "t = {t} outside 1..={}",
                self.k.saturating_sub(1)
            )));
        }
        if t > self.n {
            return Err(Error::InvalidQuery(format!("no {t}-subsets on {} vertices", self.n)));
        }
        let total = binomial(self.n as u64, t as u64);
        let table = RankTable::new(self.n, t);
        let mut counts: std::collections::HashMap<u128, usize> = std::collections::HashMap::new();
        let mut sub = Vec::with_capacity(t);
        for e in &self.edges {
            for_each_subset(e, t, &mut sub, &mut |s| {
                *counts.entry(table.rank(s)).or_insert(0) += 1;
            });
        }
        if (counts.len() as u128) < total {
            return Ok(0);
        }
        Ok(counts.values().copied().min().unwrap_or(0))
    }

    fn check_in_range(&self, s: &VertexSet) -> Result<()> {
        match s.iter().find(|&v| v as usize >= self.n) {
            Some(v) => Err(Error::InvalidQuery(format!("vertex {v} outside 0..{}", self.n))),
            None => Ok(()),
        }
    }

    fn check_compatible(&self, other: &KUniformHypergraph) -> Result<()> {
        if self.k != other.k {
            return Err(Error::UniformityMismatch { expected: self.k, found: other.k });
        }
        if self.n != other.n {
            return Err(Error::InvalidParameter(format!(
                "vertex counts differ: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(())
    }

    pub fn union(&self, other: &KUniformHypergraph) -> Result<KUniformHypergraph> {
        self.check_compatible(other)?;
        let mut edges = Vec::with_capacity(self.edges.len() + other.edges.len());
        let (mut i, mut j) = (0, 0);
        while i < self.edges.len() || j < other.edges.len() {
            let pick_left = match (self.edges.get(i), other.edges.get(j)) {
                (Some(a), Some(b)) => {
                    if a == b {
                        j += 1;
                    }
                    a <= b
                }
                (Some(_), None) => true,
                _ => false,
            };
            if pick_left {
                edges.push(self.edges[i].clone());
                i += 1;
            } else {
                edges.push(other.edges[j].clone());
                j += 1;
            }
        }
        Ok(Self::from_canonical(self.n, self.k, edges))
    }

    /// Whether every edge of `self` is an edge of `other`.
    pub fn is_subgraph_of(&self, other: &KUniformHypergraph) -> bool {
        self.k == other.k && self.n == other.n && self.edges.iter().all(|e| other.contains_sorted(e))
    }

    /// Edges lying entirely inside `set`, on the same vertex range.
    pub fn induced(&self, set: &VertexSet) -> KUniformHypergraph {
        let edges = self
            .edges
            .iter()
            .filter(|e| e.iter().all(|&v| set.contains(v)))
            .cloned()
            .collect();
        Self::from_canonical(self.n, self.k, edges)
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson { n: self.n, k: self.k, edges: self.edges.clone() }
    }

    /// Reads the interchange form. Edges must be strictly increasing and unique.
    pub fn from_json(json: &GraphJson) -> Result<Self> {
        for e in &json.edges {
            if e.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Malformed(format!("edge {e:?} is not strictly increasing")));
            }
        }
        KUniformHypergraph::new(json.n, json.k, json.edges.iter().cloned())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("graph serialization cannot fail")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let json: GraphJson = serde_json::from_str(s)?;
        Self::from_json(&json)
    }
}

/// Calls `f` on each `t`-subset of the sorted slice `e`, in lexicographic order.
pub(crate) fn for_each_subset(e: &[Vertex], t: usize, buf: &mut Vec<Vertex>, f: &mut impl FnMut(&[Vertex])) {
    fn go(e: &[Vertex], start: usize, t: usize, buf: &mut Vec<Vertex>, f: &mut impl FnMut(&[Vertex])) {
        if buf.len() == t {
            f(buf);
            return;
        }
        let need = t - buf.len();
        for i in start..=e.len().saturating_sub(need) {
            if i >= e.len() {
                break;
            }
            buf.push(e[i]);
            go(e, i + 1, t, buf, f);
            buf.pop();
        }
    }
    buf.clear();
    go(e, 0, t, buf, f);
}

/// JSON interchange form: `{"n": int, "k": int, "edges": [[sorted ints], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub k: usize,
    pub edges: Vec<Vec<Vertex>>,
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

fn check_k_le_n(n: usize, k: usize) -> Result<()> {
    if k > n {
        return Err(Error::InvalidParameter(format!("uniformity {k} exceeds vertex count {n}")));
    }
    Ok(())
}

/// Binomial random k-graph `H^(k)_{n,p}`.
///
/// Enumerates every k-subset with one uniform draw each when `C(n, k)` is at
/// most [`DENSE_LIMIT`]; otherwise jumps between included ranks with geometric
/// skips. Both are exact; they consume the RNG differently.
pub fn sample_random(n: usize, k: usize, p: f64, seed: u64) -> Result<KUniformHypergraph> {
    check_shape(n, k)?;
    check_probability(p)?;
    check_k_le_n(n, k)?;
    let total = binomial(n as u64, k as u64);
    let mut rng = rng_from_seed(seed);
    if total <= DENSE_LIMIT {
        let edges = KSubsets::new(n, k).filter(|_| rng.gen::<f64>() < p).collect();
        return Ok(KUniformHypergraph::from_canonical(n, k, edges));
    }
    if p == 0.0 {
        return KUniformHypergraph::empty(n, k);
    }
    if p == 1.0 {
        return KUniformHypergraph::complete(n, k);
    }
    let ranks = RankTable::new(n, k);
    let log_q = (1.0 - p).ln();
    let mut edges = Vec::new();
    let mut next: u128 = 0;
    loop {
        let u: f64 = 1.0 - rng.gen::<f64>();
        let skip = (u.ln() / log_q).floor();
        if !skip.is_finite() || skip >= (total - next) as f64 {
            break;
        }
        let r = next + skip as u128;
        if r >= total {
            break;
        }
        edges.push(ranks.unrank(r, k, n));
        next = r + 1;
    }
    edges.sort_unstable();
    Ok(KUniformHypergraph::from_canonical(n, k, edges))
}

/// Parameters of a p-perturbation and its multi-round exposure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationParams {
    pub p: f64,
    pub rounds: usize,
    pub seed: u64,
}

impl PerturbationParams {
    pub fn new(p: f64, rounds: usize, seed: u64) -> Result<Self> {
        let params = PerturbationParams { p, rounds, seed };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        check_probability(self.p)?;
        if self.rounds == 0 {
            return Err(Error::InvalidParameter("rounds must be at least 1".into()));
        }
        Ok(())
    }
}

/// One uniform `[0, 1)` value per k-subset, in lexicographic order of the
/// subsets. Sharing a field across probabilities couples the perturbations:
/// the graph at `p` is `H ∪ {e : u_e < p}`, monotone in `p`.
#[derive(Clone, Debug)]
pub struct UniformField {
    n: usize,
    k: usize,
    values: Vec<f64>,
}

impl UniformField {
    pub fn new(n: usize, k: usize, seed: u64) -> Result<Self> {
        check_shape(n, k)?;
        check_k_le_n(n, k)?;
        let total = binomial(n as u64, k as u64);
        if total > DENSE_LIMIT {
            return Err(Error::InvalidParameter(format!(
                "coupled field over {total} subsets exceeds the dense limit"
            )));
        }
        let mut rng = rng_from_seed(seed);
        let values = (0..total).map(|_| rng.gen::<f64>()).collect();
        Ok(UniformField { n, k, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `(subset, u)` pairs in lexicographic subset order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<Vertex>, f64)> + '_ {
        KSubsets::new(self.n, self.k).zip(self.values.iter().copied())
    }

    /// `H ∪ {e : u_e < p}`.
    pub fn perturb(&self, host: &KUniformHypergraph, p: f64) -> Result<KUniformHypergraph> {
        check_probability(p)?;
        if host.n != self.n || host.k != self.k {
            return Err(Error::InvalidParameter("field and host shapes differ".into()));
        }
        let edges = self
            .iter()
            .filter(|(e, u)| *u < p || host.contains_sorted(e))
            .map(|(e, _)| e)
            .collect();
        Ok(KUniformHypergraph::from_canonical(self.n, self.k, edges))
    }
}

/// The p-perturbation `H⁺_p`: every non-edge of `host` joins independently
/// with probability `p`.
///
/// For `C(n, k) ≤` [`DENSE_LIMIT`] this is `UniformField::new(n, k, seed).perturb(host, p)`,
/// so equal seeds give nested results for increasing `p`.
pub fn perturb(host: &KUniformHypergraph, params: &PerturbationParams) -> Result<KUniformHypergraph> {
    params.validate()?;
    let total = binomial(host.n as u64, host.k as u64);
    if total <= DENSE_LIMIT {
        return UniformField::new(host.n, host.k, params.seed)?.perturb(host, params.p);
    }
    let random = sample_random(host.n, host.k, params.p, params.seed)?;
    host.union(&random)
}

/// Result of exposing a p-perturbation in rounds.
#[derive(Clone, Debug)]
pub struct Exposure {
    /// `H_1, …, H_r`, each a binomial random k-graph with probability `p / r`.
    pub rounds: Vec<KUniformHypergraph>,
    /// Extra edges drawn so that each non-edge of the host lands in the
    /// final graph with probability exactly `p`.
    pub top_up: KUniformHypergraph,
    /// `H ∪ H_1 ∪ … ∪ H_r ∪ top_up`.
    pub perturbed: KUniformHypergraph,
}

impl Exposure {
    /// `H ∪ H_1 ∪ … ∪ H_i`.
    pub fn cumulative(&self, host: &KUniformHypergraph, i: usize) -> Result<KUniformHypergraph> {
        self.rounds[..i].iter().try_fold(host.clone(), |acc, g| acc.union(g))
    }
}

/// Exposes `H⁺_p` in `rounds` independent rounds of probability `q = p / r`.
///
/// A non-edge missed by every round joins through an independent top-up coin
/// with probability `(p − q*) / (1 − q*)`, where `q* = 1 − (1 − q)^r`, which
/// makes its final inclusion probability exactly `p`. Each k-subset consumes
/// exactly `r + 1` uniforms, in lexicographic subset order.
pub fn multi_round_exposure(host: &KUniformHypergraph, p: f64, rounds: usize, seed: u64) -> Result<Exposure> {
    PerturbationParams::new(p, rounds, seed)?;
    let (n, k) = (host.n, host.k);
    let total = binomial(n as u64, k as u64);
    if total > DENSE_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "multi-round exposure over {total} subsets exceeds the dense limit"
        )));
    }
    let q = p / rounds as f64;
    let covered = 1.0 - (1.0 - q).powi(rounds as i32);
    let top_up_prob = if covered >= 1.0 { 0.0 } else { ((p - covered) / (1.0 - covered)).max(0.0) };

    let mut rng = rng_from_seed(seed);
    let mut round_edges: Vec<Vec<Vec<Vertex>>> = vec![Vec::new(); rounds];
    let mut top_up = Vec::new();
    let mut perturbed = Vec::new();
    for e in KSubsets::new(n, k) {
        let mut hit = false;
        for edges in round_edges.iter_mut() {
            if rng.gen::<f64>() < q {
                edges.push(e.clone());
                hit = true;
            }
        }
        let coin = rng.gen::<f64>();
        let in_host = host.contains_sorted(&e);
        if !in_host && !hit && coin < top_up_prob {
            top_up.push(e.clone());
            hit = true;
        }
        if in_host || hit {
            perturbed.push(e);
        }
    }
    Ok(Exposure {
        rounds: round_edges
            .into_iter()
            .map(|edges| KUniformHypergraph::from_canonical(n, k, edges))
            .collect(),
        top_up: KUniformHypergraph::from_canonical(n, k, top_up),
        perturbed: KUniformHypergraph::from_canonical(n, k, perturbed),
    })
}

/// Size of the dense part `A` used by [`extremal_construction`]: `⌊αn⌋`.
pub fn extremal_part_size(n: usize, alpha: f64) -> usize {
    // tolerate representation error in products like (1/3)·12
    (alpha * n as f64 + 1e-9).floor().max(0.0) as usize
}

/// The k-graph on `0..n` whose edges are the k-subsets meeting
/// `A = {0, …, ⌊αn⌋ − 1}`. The complement `B` spans no edge.
pub fn extremal_construction(n: usize, k: usize, alpha: f64) -> Result<KUniformHypergraph> {
    check_shape(n, k)?;
    check_k_le_n(n, k)?;
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must be positive")));
    }
    let a = extremal_part_size(n, alpha);
    if a == 0 {
        return Err(Error::Degenerate(format!("⌊{alpha}·{n}⌋ = 0 leaves A empty")));
    }
    let a = a.min(n) as Vertex;
    let edges = KSubsets::new(n, k).filter(|e| e[0] < a).collect();
    Ok(KUniformHypergraph::from_canonical(n, k, edges))
}

/// A named way of producing a host graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HostDescriptor {
    Empty,
    Complete,
    Extremal { alpha: f64 },
    Random { p: f64 },
}

impl HostDescriptor {
    pub fn build(&self, n: usize, k: usize, seed: u64) -> Result<KUniformHypergraph> {
        match *self {
            HostDescriptor::Empty => KUniformHypergraph::empty(n, k),
            HostDescriptor::Complete => KUniformHypergraph::complete(n, k),
            HostDescriptor::Extremal { alpha } => extremal_construction(n, k, alpha),
            HostDescriptor::Random { p } => sample_random(n, k, p, seed),
        }
    }
}

impl fmt::Display for HostDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HostDescriptor::Empty => write!(f, "empty"),
            HostDescriptor::Complete => write!(f, "complete"),
            HostDescriptor::Extremal { alpha } => write!(f, "extremal:{alpha}"),
            HostDescriptor::Random { p } => write!(f, "random:{p}"),
        }
    }
}

impl std::str::FromStr for HostDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        let number = |arg: Option<&str>| -> Result<f64> {
            arg.ok_or_else(|| Error::InvalidParameter(format!("host `{s}` needs a numeric argument")))?
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("host `{s}` has a non-numeric argument")))
        };
        match kind {
            "empty" => Ok(HostDescriptor::Empty),
            "complete" => Ok(HostDescriptor::Complete),
            "extremal" => Ok(HostDescriptor::Extremal { alpha: number(arg)? }),
            "random" => Ok(HostDescriptor::Random { p: number(arg)? }),
            _ => Err(Error::InvalidParameter(format!(
                "unknown host `{s}` (expected empty, complete, extremal:<alpha> or random:<p>)"
            ))),
        }
    }
}
