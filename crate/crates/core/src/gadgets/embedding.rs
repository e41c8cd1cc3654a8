use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;

use super::Label;
use crate::error::{Error, Result};
use crate::hypergraph::{KUniformHypergraph, Vertex};
use crate::rng::{rng_from_seed, Rng};
use crate::search::SearchOutcome;

/// Which gadget edges must land in which host, and which labels are pinned.
///
/// Labels run over `1..=labels`; every label gets an image, including labels
/// in no constraint. Unpinned labels may only use vertices in `allowed` when
/// it is given.
#[derive(Clone)]
pub struct EmbeddingProblem<'a> {
    pub n: usize,
    pub labels: usize,
    pub constraints: Vec<(Vec<Label>, &'a KUniformHypergraph)>,
    pub pins: Vec<(Label, Vertex)>,
    pub allowed: Option<Vec<bool>>,
}

impl<'a> EmbeddingProblem<'a> {
    pub fn new(host: &'a KUniformHypergraph, edges: &[Vec<Label>], labels: usize) -> Self {
        EmbeddingProblem {
            n: host.n(),
            labels,
            constraints: edges.iter().map(|e| (e.clone(), host)).collect(),
            pins: Vec::new(),
            allowed: None,
        }
    }

    pub fn constrain(mut self, edges: &[Vec<Label>], host: &'a KUniformHypergraph) -> Self {
        self.constraints.extend(edges.iter().map(|e| (e.clone(), host)));
        self
    }

    pub fn pin(mut self, pins: &[(Label, Vertex)]) -> Self {
        self.pins.extend_from_slice(pins);
        self
    }

    pub fn restrict(mut self, allowed: Vec<bool>) -> Self {
        self.allowed = Some(allowed);
        self
    }
}

/// An injective map from gadget labels to host vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PinnedEmbedding {
    /// `images[x − 1]` is the image of label `x`.
    pub images: Vec<Vertex>,
    pub pins: Vec<Label>,
}

impl PinnedEmbedding {
    pub fn image(&self, label: Label) -> Vertex {
        self.images[label as usize - 1]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EmbeddingCount {
    Exact(u128),
    /// Hit rate of uniform random injections scaled by their number.
    Estimate { value: f64, std_error: f64, samples: u64 },
}

impl EmbeddingCount {
    pub fn value(&self) -> f64 {
        match *self {
            EmbeddingCount::Exact(c) => c as f64,
            EmbeddingCount::Estimate { value, .. } => value,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, EmbeddingCount::Exact(_))
    }
}

/// `(a)_r = a (a − 1) ⋯ (a − r + 1)`, saturating.
fn falling(a: usize, r: usize) -> u128 {
    if r > a {
        return 0;
    }
    (0..r).fold(1u128, |acc, i| acc.saturating_mul((a - i) as u128))
}

fn falling_f64(a: usize, r: usize) -> f64 {
    if r > a {
        return 0.0;
    }
    (0..r).map(|i| (a - i) as f64).product()
}

struct Engine<'a> {
    labels: usize,
    edges: Vec<(Vec<usize>, &'a KUniformHypergraph)>,
    label_edges: Vec<Vec<usize>>,
    pins: Vec<(usize, Vertex)>,
    order: Vec<usize>,
    free: Vec<usize>,
    allowed: Vec<bool>,
    allowed_count: usize,
}

#[derive(Clone)]
struct State {
    img: Vec<Option<Vertex>>,
    used: Vec<bool>,
    used_allowed: usize,
}

impl<'a> Engine<'a> {
    fn new(p: &EmbeddingProblem<'a>) -> Result<Self> {
        let labels = p.labels;
        let mut edges = Vec::with_capacity(p.constraints.len());
        let mut label_edges = vec![Vec::new(); labels];
        for (id, (e, host)) in p.constraints.iter().enumerate() {
            if host.n() != p.n {
                return Err(Error::InvalidParameter("constraint hosts differ in vertex count".into()));
            }
            if e.len() != host.k() {
                return Err(Error::UniformityMismatch { expected: host.k(), found: e.len() });
            }
            let mut idx = Vec::with_capacity(e.len());
            for &x in e {
                if x == 0 || x as usize > labels {
                    return Err(Error::InvalidParameter(format!("label {x} outside 1..={labels}")));
                }
                idx.push(x as usize - 1);
                label_edges[x as usize - 1].push(id);
            }
            edges.push((idx, *host));
        }
        let mut pinned = vec![false; labels];
        let mut taken = vec![false; p.n];
        let mut pins = Vec::with_capacity(p.pins.len());
        for &(x, v) in &p.pins {
            if x == 0 || x as usize > labels || v as usize >= p.n {
                return Err(Error::Precondition(format!("pin {x} -> {v} out of range")));
            }
            if pinned[x as usize - 1] || taken[v as usize] {
                return Err(Error::Precondition(format!("pin {x} -> {v} conflicts with another pin")));
            }
            pinned[x as usize - 1] = true;
            taken[v as usize] = true;
            pins.push((x as usize - 1, v));
        }
        let allowed = match &p.allowed {
            Some(a) if a.len() == p.n => a.clone(),
            Some(_) => return Err(Error::InvalidParameter("allowed mask has the wrong length".into())),
            None => vec![true; p.n],
        };
        let allowed_count = allowed.iter().filter(|&&a| a).count();

        // pinned labels first, then the label with the most placed neighbours
        let mut placed = pinned.clone();
        let degree: Vec<usize> = label_edges.iter().map(|l| l.len()).collect();
        let mut order = Vec::new();
        let mut free = Vec::new();
        for x in 0..labels {
            if !pinned[x] && degree[x] == 0 {
                free.push(x);
            }
        }
        let mut remaining: Vec<usize> = (0..labels).filter(|&x| !pinned[x] && degree[x] > 0).collect();
        while !remaining.is_empty() {
            let score = |x: usize| {
                let mut nb: Vec<usize> = label_edges[x]
                    .iter()
                    .flat_map(|&e| edges[e].0.iter().copied())
                    .filter(|&y| y != x && placed[y])
                    .collect();
                nb.sort_unstable();
                nb.dedup();
                (nb.len(), degree[x])
            };
            let (pos, _) = remaining
                .iter()
                .enumerate()
                .max_by(|(_, &a), (_, &b)| score(a).cmp(&score(b)).then(b.cmp(&a)))
                .expect("nonempty");
            let x = remaining.remove(pos);
            placed[x] = true;
            order.push(x);
        }
        Ok(Engine { labels, edges, label_edges, pins, order, free, allowed, allowed_count })
    }

    fn initial(&self, n: usize) -> Option<State> {
        let mut s = State { img: vec![None; self.labels], used: vec![false; n], used_allowed: 0 };
        for &(x, v) in &self.pins {
            s.img[x] = Some(v);
            s.used[v as usize] = true;
            if self.allowed[v as usize] {
                s.used_allowed += 1;
            }
        }
        // edges spanned by pins alone must already be present
        for (e, host) in &self.edges {
            let imgs: Option<Vec<Vertex>> = e.iter().map(|&y| s.img[y]).collect();
            if let Some(imgs) = imgs {
                if !host.contains_edge(&imgs) {
                    return None;
                }
            }
        }
        Some(s)
    }

    fn candidates(&self, x: usize, s: &State) -> Vec<Vertex> {
        let best = self.label_edges[x]
            .iter()
            .map(|&e| (e, self.edges[e].0.iter().filter(|&&y| s.img[y].is_some()).count()))
            .max_by_key(|&(_, c)| c);
        let mut out = match best {
            Some((e, c)) if c > 0 => {
                let (labels, host) = &self.edges[e];
                let imgs: Vec<Vertex> = labels.iter().filter_map(|&y| s.img[y]).collect();
                let mut cand: Vec<Vertex> = host
                    .edges_containing(&imgs)
                    .flat_map(|edge| edge.iter().copied())
                    .filter(|v| !imgs.contains(v))
                    .collect();
                cand.sort_unstable();
                cand.dedup();
                cand
            }
            _ => (0..self.allowed.len() as Vertex).collect(),
        };
        out.retain(|&v| !s.used[v as usize] && self.allowed[v as usize]);
        out
    }

    fn fits(&self, x: usize, v: Vertex, s: &State) -> bool {
        let mut buf = Vec::new();
        self.label_edges[x].iter().all(|&e| {
            let (labels, host) = &self.edges[e];
            buf.clear();
            buf.push(v);
            let mut complete = true;
            for &y in labels {
                if y == x {
                    continue;
                }
                match s.img[y] {
                    Some(w) => buf.push(w),
                    None => complete = false,
                }
            }
            if complete {
                host.contains_edge(&buf)
            } else {
                host.has_superset(&buf)
            }
        })
    }

    fn place(&self, x: usize, v: Vertex, s: &mut State) {
        s.img[x] = Some(v);
        s.used[v as usize] = true;
        s.used_allowed += 1;
    }

    fn unplace(&self, x: usize, v: Vertex, s: &mut State) {
        s.img[x] = None;
        s.used[v as usize] = false;
        s.used_allowed -= 1;
    }

    fn leaf_count(&self, s: &State) -> u128 {
        falling(self.allowed_count - s.used_allowed, self.free.len())
    }

    fn count_from(&self, depth: usize, s: &mut State, nodes: &AtomicU64, budget: u64, abort: &AtomicBool) -> Option<u128> {
        if abort.load(Ordering::Relaxed) {
            return None;
        }
        if nodes.fetch_add(1, Ordering::Relaxed) >= budget {
            abort.store(true, Ordering::Relaxed);
            return None;
        }
        if depth == self.order.len() {
            return Some(self.leaf_count(s));
        }
        let x = self.order[depth];
        let mut total: u128 = 0;
        for v in self.candidates(x, s) {
            if !self.fits(x, v, s) {
                continue;
            }
            self.place(x, v, s);
            let sub = self.count_from(depth + 1, s, nodes, budget, abort);
            self.unplace(x, v, s);
            total = total.saturating_add(sub?);
        }
        Some(total)
    }

    fn count(&self, n: usize, budget: u64) -> Option<u128> {
        let Some(s) = self.initial(n) else { return Some(0) };
        if self.order.is_empty() {
            return Some(self.leaf_count(&s));
        }
        let nodes = AtomicU64::new(0);
        let abort = AtomicBool::new(false);
        let x = self.order[0];
        let cands: Vec<Vertex> = self.candidates(x, &s).into_iter().filter(|&v| self.fits(x, v, &s)).collect();
        nodes.fetch_add(1, Ordering::Relaxed);
        let parts: Vec<Option<u128>> = cands
            .par_iter()
            .map(|&v| {
                let mut local = s.clone();
                self.place(x, v, &mut local);
                self.count_from(1, &mut local, &nodes, budget, &abort)
            })
            .collect();
        parts.into_iter().try_fold(0u128, |acc, p| p.map(|c| acc.saturating_add(c)))
    }

    fn sample(&self, n: usize, samples: u64, seed: u64) -> EmbeddingCount {
        let Some(s) = self.initial(n) else {
            return EmbeddingCount::Exact(0);
        };
        let pool: Vec<Vertex> = (0..n as Vertex)
            .filter(|&v| self.allowed[v as usize] && !s.used[v as usize])
            .collect();
        let need = self.order.len();
        let scale = falling_f64(pool.len(), need + self.free.len());
        if need > pool.len() || scale == 0.0 {
            return EmbeddingCount::Exact(0);
        }
        let mut rng = rng_from_seed(seed);
        let mut pool = pool;
        let mut hits = 0u64;
        let mut img = s.img.clone();
        let mut buf = Vec::new();
        for _ in 0..samples {
            for i in 0..need {
                let j = rng.gen_range(i..pool.len());
                pool.swap(i, j);
                img[self.order[i]] = Some(pool[i]);
            }
            let ok = self.edges.iter().all(|(labels, host)| {
                buf.clear();
                buf.extend(labels.iter().map(|&y| img[y].expect("all constrained labels placed")));
                host.contains_edge(&buf)
            });
            if ok {
                hits += 1;
            }
        }
        let rate = hits as f64 / samples as f64;
        EmbeddingCount::Estimate {
            value: scale * rate,
            std_error: scale * (rate * (1.0 - rate) / samples as f64).sqrt(),
            samples,
        }
    }

    fn find_from(&self, depth: usize, s: &mut State, rng: &mut Rng, nodes: &mut u64, budget: u64) -> Option<bool> {
        *nodes += 1;
        if *nodes > budget {
            return None;
        }
        if depth == self.order.len() {
            return Some(self.allowed_count - s.used_allowed >= self.free.len());
        }
        let x = self.order[depth];
        let mut cands = self.candidates(x, s);
        cands.shuffle(rng);
        for v in cands {
            if !self.fits(x, v, s) {
                continue;
            }
            self.place(x, v, s);
            match self.find_from(depth + 1, s, rng, nodes, budget) {
                Some(true) => return Some(true),
                Some(false) => {}
                None => return None,
            }
            self.unplace(x, v, s);
        }
        Some(false)
    }
}

/// Counts injections of a gadget (edge list over labels `1..=labels`) into
/// `host` that respect `pins` and map every gadget edge to a host edge.
///
/// Enumerates exactly while at most `budget` search nodes are visited; past
/// that, estimates from `budget` uniform random injections (capped at 10⁶).
pub fn count_pinned_embeddings(
    host: &KUniformHypergraph,
    edges: &[Vec<Label>],
    labels: usize,
    pins: &[(Label, Vertex)],
    budget: u64,
    seed: u64,
) -> Result<EmbeddingCount> {
    let problem = EmbeddingProblem::new(host, edges, labels).pin(pins);
    count_problem(&problem, budget, seed)
}

/// [`count_pinned_embeddings`] for a general problem.
pub fn count_problem(problem: &EmbeddingProblem<'_>, budget: u64, seed: u64) -> Result<EmbeddingCount> {
    if budget == 0 {
        return Err(Error::InvalidParameter("budget must be positive".into()));
    }
    let engine = Engine::new(problem)?;
    Ok(match engine.count(problem.n, budget) {
        Some(c) => EmbeddingCount::Exact(c),
        None => engine.sample(problem.n, budget.min(1_000_000), seed),
    })
}

/// Finds one embedding, trying candidates in a seeded random order.
pub fn find_embedding(problem: &EmbeddingProblem<'_>, budget: u64, seed: u64) -> Result<SearchOutcome<PinnedEmbedding>> {
    let engine = Engine::new(problem)?;
    let Some(mut s) = engine.initial(problem.n) else {
        return Ok(SearchOutcome::Exhausted);
    };
    let mut rng = rng_from_seed(seed);
    let mut nodes = 0u64;
    match engine.find_from(0, &mut s, &mut rng, &mut nodes, budget) {
        None => return Ok(SearchOutcome::BudgetExceeded),
        Some(false) => return Ok(SearchOutcome::Exhausted),
        Some(true) => {}
    }
    let mut rest: Vec<Vertex> = (0..problem.n as Vertex)
        .filter(|&v| engine.allowed[v as usize] && !s.used[v as usize])
        .collect();
    rest.shuffle(&mut rng);
    for (&x, v) in engine.free.iter().zip(rest) {
        s.img[x] = Some(v);
    }
    Ok(SearchOutcome::Found(PinnedEmbedding {
        images: s.img.into_iter().map(|v| v.expect("every label placed")).collect(),
        pins: problem.pins.iter().map(|&(x, _)| x).collect(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::build_absorber;

    #[test]
    fn single_edge_counts() {
        let k5 = KUniformHypergraph::complete(5, 3).unwrap();
        let e = vec![vec![1, 2, 3]];
        assert_eq!(count_pinned_embeddings(&k5, &e, 3, &[], 1 << 20, 0).unwrap(), EmbeddingCount::Exact(60));
        assert_eq!(count_pinned_embeddings(&k5, &e, 3, &[(1, 0)], 1 << 20, 0).unwrap(), EmbeddingCount::Exact(12));
        let empty = KUniformHypergraph::empty(5, 3).unwrap();
        assert_eq!(count_pinned_embeddings(&empty, &e, 3, &[], 1 << 20, 0).unwrap(), EmbeddingCount::Exact(0));
        // an isolated extra label multiplies by the remaining vertices
        assert_eq!(count_pinned_embeddings(&k5, &e, 4, &[], 1 << 20, 0).unwrap(), EmbeddingCount::Exact(120));
    }

    #[test]
    fn conflicting_pins() {
        let k5 = KUniformHypergraph::complete(5, 3).unwrap();
        let e = vec![vec![1, 2, 3]];
        assert!(matches!(
            count_pinned_embeddings(&k5, &e, 3, &[(1, 0), (2, 0)], 100, 0),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            count_pinned_embeddings(&k5, &e, 3, &[(1, 0), (1, 2)], 100, 0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn sampling_on_complete_host_is_exact_scale() {
        let a = build_absorber(3, 2).unwrap();
        let k = KUniformHypergraph::complete(14, 3).unwrap();
        let c = count_pinned_embeddings(&k, a.reg_edges(), a.vertex_count(), &[(13, 0)], 10_000, 1).unwrap();
        match c {
            EmbeddingCount::Estimate { value, std_error, .. } => {
                assert_eq!(value, falling_f64(13, 12));
                assert_eq!(std_error, 0.0);
            }
            EmbeddingCount::Exact(x) => assert_eq!(x, falling(13, 12)),
        }
    }

    #[test]
    fn find_respects_allowed() {
        let k = KUniformHypergraph::complete(8, 3).unwrap();
        let mut allowed = vec![false; 8];
        for v in [2, 4, 6] {
            allowed[v] = true;
        }
        let p = EmbeddingProblem::new(&k, &[vec![1, 2, 3]], 3).restrict(allowed);
        match find_embedding(&p, 1000, 3).unwrap() {
            SearchOutcome::Found(e) => {
                let mut im = e.images.clone();
                im.sort();
                assert_eq!(im, vec![2, 4, 6]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
