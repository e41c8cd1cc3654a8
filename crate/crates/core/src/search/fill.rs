//! Backtracking assignment of distinct vertices to sequence positions so that
//! prescribed windows of positions map to host edges. Exact search, path
//! tiling and connecting paths are all instances.

use std::time::Instant;

use rand::seq::SliceRandom;

use super::{SearchLimits, SearchOutcome};
use crate::hypergraph::{KUniformHypergraph, Vertex};
use crate::rng::{rng_from_seed, Rng};

pub(crate) struct FillSpec<'a> {
    pub host: &'a KUniformHypergraph,
    pub len: usize,
    /// Position lists that must map to edges.
    pub windows: Vec<Vec<usize>>,
    pub fixed: Vec<Option<Vertex>>,
    /// Free positions in placement order.
    pub order: Vec<usize>,
    /// Vertices usable at free positions.
    pub allowed: Vec<bool>,
    /// Pairs `(a, b)` requiring `seq[a] < seq[b]`.
    pub less_than: Vec<(usize, usize)>,
    /// Try candidates with the fewest continuations first, dropping dead ends.
    pub fail_first: bool,
    /// Shuffle candidates with this seed instead of taking them in index order.
    pub shuffle: Option<u64>,
    /// Break fail-first ties by ascending host degree, keeping well-connected
    /// vertices for the positions that close the sequence.
    pub low_degree_first: bool,
}

struct Filler<'a> {
    spec: &'a FillSpec<'a>,
    pos_windows: Vec<Vec<usize>>,
    pos_less: Vec<Vec<(usize, bool)>>,
    seq: Vec<Option<Vertex>>,
    used: Vec<bool>,
    nodes: u64,
    budget: u64,
    deadline: Option<Instant>,
    out_of_budget: bool,
    rng: Option<Rng>,
    buf: Vec<Vertex>,
    /// Host degrees when ties break by degree, else zeros.
    degree: Vec<usize>,
    scratch: Vec<usize>,
}

impl<'a> Filler<'a> {
    fn candidates(&mut self, pos: usize) -> Vec<Vertex> {
        let host = self.spec.host;
        let best = self.pos_windows[pos]
            .iter()
            .map(|&w| {
                let c = self.spec.windows[w].iter().filter(|&&q| self.seq[q].is_some()).count();
                (w, c)
            })
            .max_by_key(|&(_, c)| c);
        let mut out: Vec<Vertex> = match best {
            Some((w, c)) if c > 0 => {
                let imgs: Vec<Vertex> = self.spec.windows[w].iter().filter_map(|&q| self.seq[q]).collect();
                let mut cand: Vec<Vertex> = host
                    .edges_containing(&imgs)
                    .flat_map(|e| e.iter().copied())
                    .filter(|v| !imgs.contains(v))
                    .collect();
                cand.sort_unstable();
                cand.dedup();
                cand
            }
            _ => (0..host.n() as Vertex).collect(),
        };
        out.retain(|&v| self.spec.allowed[v as usize] && !self.used[v as usize]);
        let less = &self.pos_less[pos];
        if !less.is_empty() {
            out.retain(|&v| {
                less.iter().all(|&(other, mine_smaller)| match self.seq[other] {
                    Some(w) => (v < w) == mine_smaller,
                    None => true,
                })
            });
        }
        out
    }

    fn fits(&mut self, pos: usize, v: Vertex) -> bool {
        let host = self.spec.host;
        for &w in &self.pos_windows[pos] {
            self.buf.clear();
            self.buf.push(v);
            let mut complete = true;
            for &q in &self.spec.windows[w] {
                if q == pos {
                    continue;
                }
                match self.seq[q] {
                    Some(x) => self.buf.push(x),
                    None => complete = false,
                }
            }
            let ok = if complete {
                host.contains_edge(&self.buf)
            } else {
                self.buf.len() < 2 || host.has_superset(&self.buf)
            };
            if !ok {
                return false;
            }
        }
        true
    }

    fn valid_candidates(&mut self, pos: usize) -> Vec<Vertex> {
        let cands = self.candidates(pos);
        cands.into_iter().filter(|&v| self.fits(pos, v)).collect()
    }

    /// Whether every unfilled position sharing a window with `pos`, other
    /// than `skip`, still has a candidate.
    fn neighbours_alive(&mut self, pos: usize, skip: usize) -> bool {
        let mut seen = std::mem::take(&mut self.scratch);
        seen.clear();
        for &w in &self.pos_windows[pos] {
            seen.extend(self.spec.windows[w].iter().copied().filter(|&q| q != skip && self.seq[q].is_none()));
        }
        seen.sort_unstable();
        seen.dedup();
        let ok = seen.iter().all(|&q| !self.valid_candidates(q).is_empty());
        self.scratch = seen;
        ok
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.out_of_budget = true;
        } else if let Some(deadline) = self.deadline {
            if self.nodes % 4096 == 0 && Instant::now() >= deadline {
                self.out_of_budget = true;
            }
        }
        !self.out_of_budget
    }

    fn go(&mut self, depth: usize) -> bool {
        if depth == self.spec.order.len() {
            return true;
        }
        if !self.tick() {
            return false;
        }
        let pos = self.spec.order[depth];
        let mut cands = self.valid_candidates(pos);
        if let Some(rng) = self.rng.as_mut() {
            cands.shuffle(rng);
        }
        if self.spec.fail_first && depth + 1 < self.spec.order.len() {
            let next = self.spec.order[depth + 1];
            let mut scored = Vec::with_capacity(cands.len());
            for v in cands {
                self.seq[pos] = Some(v);
                self.used[v as usize] = true;
                let succ = self.valid_candidates(next).len();
                let alive = succ > 0 && self.neighbours_alive(pos, next);
                self.seq[pos] = None;
                self.used[v as usize] = false;
                if alive {
                    scored.push((succ, self.degree[v as usize], v));
                }
            }
            scored.sort_unstable();
            cands = scored.into_iter().map(|(_, _, v)| v).collect();
        }
        for v in cands {
            self.seq[pos] = Some(v);
            self.used[v as usize] = true;
            if self.go(depth + 1) {
                return true;
            }
            self.seq[pos] = None;
            self.used[v as usize] = false;
            if self.out_of_budget {
                return false;
            }
        }
        false
    }
}

/// Runs the search; returns the outcome and the number of nodes visited.
pub(crate) fn fill(spec: &FillSpec<'_>, limits: &SearchLimits) -> (SearchOutcome<Vec<Vertex>>, u64) {
    let n = spec.host.n();
    let mut pos_windows = vec![Vec::new(); spec.len];
    for (w, ps) in spec.windows.iter().enumerate() {
        for &p in ps {
            pos_windows[p].push(w);
        }
    }
    let mut pos_less = vec![Vec::new(); spec.len];
    for &(a, b) in &spec.less_than {
        pos_less[a].push((b, true));
        pos_less[b].push((a, false));
    }
    let mut used = vec![false; n];
    for v in spec.fixed.iter().flatten() {
        if used[*v as usize] {
            return (SearchOutcome::Exhausted, 0);
        }
        used[*v as usize] = true;
    }
    let mut f = Filler {
        spec,
        pos_windows,
        pos_less,
        seq: spec.fixed.clone(),
        used,
        nodes: 0,
        budget: limits.nodes,
        deadline: limits.time.map(|t| Instant::now() + t),
        out_of_budget: false,
        rng: spec.shuffle.map(rng_from_seed),
        buf: Vec::with_capacity(spec.host.k()),
        degree: if spec.low_degree_first {
            (0..n as Vertex).map(|v| spec.host.incident(v).len()).collect()
        } else {
            vec![0; n]
        },
        scratch: Vec::new(),
    };
    // constraints among fixed positions only
    for w in &spec.windows {
        if w.iter().all(|&q| f.seq[q].is_some()) {
            let e: Vec<Vertex> = w.iter().map(|&q| f.seq[q].expect("fixed")).collect();
            if !spec.host.contains_edge(&e) {
                return (SearchOutcome::Exhausted, 0);
            }
        }
    }
    for &(a, b) in &spec.less_than {
        if let (Some(x), Some(y)) = (f.seq[a], f.seq[b]) {
            if x >= y {
                return (SearchOutcome::Exhausted, 0);
            }
        }
    }
    let found = f.go(0);
    let nodes = f.nodes;
    if found {
        let seq = f.seq.into_iter().map(|v| v.expect("all positions assigned")).collect();
        (SearchOutcome::Found(seq), nodes)
    } else if f.out_of_budget {
        (SearchOutcome::BudgetExceeded, nodes)
    } else {
        (SearchOutcome::Exhausted, nodes)
    }
}

/// Windows `r·d .. r·d + k` of a linear sequence of `len` positions.
pub(crate) fn linear_windows(len: usize, k: usize, d: usize) -> Vec<Vec<usize>> {
    if len < k {
        return Vec::new();
    }
    (0..=(len - k) / d).map(|r| (r * d..r * d + k).collect()).collect()
}

/// Cyclic windows starting at `0, d, 2d, …` on `n` positions.
pub(crate) fn cyclic_windows(n: usize, k: usize, d: usize) -> Vec<Vec<usize>> {
    (0..n / d).map(|r| (0..k).map(|j| (r * d + j) % n).collect()).collect()
}
