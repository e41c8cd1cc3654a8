//! The absorbing pipeline: build absorbing paths, join them, set aside a
//! reservoir, tile the rest with short paths, join everything into a cycle
//! through the reservoir, and absorb what is left of the reservoir.
//!
//! The perturbation is exposed in rounds. Absorbers use `H` for their regular
//! edges and `H ∪ H_1` for their random edges; joining the absorbers uses
//! `H ∪ H_1 ∪ H_2`, tiling `H ∪ … ∪ H_3` and the final joins `H ∪ … ∪ H_4`.

use std::fmt;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::connect::{build_chain, connector_interior_sizes};
use super::matching::{perfect_matching, Matching};
use super::tiling::greedy_path_tiling;
use super::{SearchLimits, SearchOutcome};
use crate::error::{Error, Result};
use crate::gadgets::{absorb, build_absorber, can_absorb, find_embedding, Absorber, EmbeddingProblem, Label};
use crate::hypergraph::{multi_round_exposure, KSubsets, KUniformHypergraph, Vertex, VertexSet};
use crate::paths::{is_hamilton_ell_cycle, path_vertex_count, EllCycle, EllPath, OrderedTuple};
use crate::rng::{derive_seed, rng_from_seed};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    /// Number of exposure rounds.
    pub rounds: usize,
    /// Absorbing paths to build; `None` picks `max(1, n / (4|V(F)|))` when the
    /// gadget fits, else none.
    pub absorbers: Option<usize>,
    /// Length `m` of the tiling paths.
    pub tiling_length: usize,
    /// Bounds `lo < hi` of the reservoir size as fractions of `n`.
    pub reservoir: (f64, f64),
    /// Attempts per absorber embedding, per tiling, and for the final join
    /// followed by absorption.
    pub retries: usize,
    /// A tuple counts as bad when fewer absorbing paths than this can absorb it.
    pub bad_threshold: usize,
    pub seed: u64,
    pub limits: SearchLimits,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams {
            rounds: 4,
            absorbers: None,
            tiling_length: 2,
            reservoir: (0.1, 0.2),
            retries: 3,
            bad_threshold: 1,
            seed: 0,
            limits: SearchLimits::with_nodes(200_000),
        }
    }
}

impl PipelineParams {
    pub fn validate(&self, k: usize, ell: usize) -> Result<()> {
        self.limits.validate()?;
        let (lo, hi) = self.reservoir;
        if self.rounds == 0 {
            return Err(Error::InvalidParameter("rounds must be at least 1".into()));
        }
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(Error::InvalidParameter(format!("reservoir bounds ({lo}, {hi}) need 0 <= lo < hi <= 1")));
        }
        if self.tiling_length == 0 {
            return Err(Error::InvalidParameter("tiling length must be at least 1".into()));
        }
        if self.tiling_length * (k - ell) < ell {
            return Err(Error::InvalidParameter(format!(
                "tiling paths of length {} have overlapping ends",
                self.tiling_length
            )));
        }
        if self.retries == 0 {
            return Err(Error::InvalidParameter("retries must be at least 1".into()));
        }
        if self.bad_threshold == 0 {
            return Err(Error::InvalidParameter("bad-tuple threshold must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Absorbers,
    ConnectAbsorbers,
    Reservoir,
    Tiling,
    ConnectCycle,
    Absorb,
    Verify,
}

impl Stage {
    /// 1-based position in the pipeline.
    pub fn number(self) -> usize {
        self as usize + 1
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Absorbers => "absorbers",
            Stage::ConnectAbsorbers => "connect_absorbers",
            Stage::Reservoir => "reservoir",
            Stage::Tiling => "tiling",
            Stage::ConnectCycle => "connect_cycle",
            Stage::Absorb => "absorb",
            Stage::Verify => "verify",
        };
        write!(f, "stage {} ({name})", self.number())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageStatus {
    Ok,
    Skipped,
    Failed,
}

/// Where every vertex stands after a stage.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TracePartition {
    pub absorbing: Vec<Vertex>,
    pub connectors: Vec<Vertex>,
    pub tiling: Vec<Vertex>,
    pub reservoir: Vec<Vertex>,
    pub absorbed: Vec<Vertex>,
    pub unassigned: Vec<Vertex>,
}

impl TracePartition {
    pub fn parts(&self) -> [&[Vertex]; 6] {
        [&self.absorbing, &self.connectors, &self.tiling, &self.reservoir, &self.absorbed, &self.unassigned]
    }

    /// Whether the parts are pairwise disjoint and cover `0..n`.
    pub fn is_partition_of(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        for part in self.parts() {
            for &v in part {
                if v as usize >= n || seen[v as usize] {
                    return false;
                }
                seen[v as usize] = true;
            }
        }
        seen.into_iter().all(|s| s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: Stage,
    pub status: StageStatus,
    pub nodes: u64,
    pub note: String,
    pub partition: TracePartition,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub p: f64,
    pub seed: u64,
    pub stages: Vec<StageRecord>,
}

impl Trace {
    pub fn failed_stage(&self) -> Option<Stage> {
        self.stages.iter().find(|r| r.status == StageStatus::Failed).map(|r| r.stage)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serialization cannot fail")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineOutcome {
    /// A Hamilton ℓ-cycle of the perturbed graph, verified before returning.
    pub cycle: Option<EllCycle>,
    pub trace: Trace,
    /// The perturbed graph the cycle lives in.
    pub perturbed: KUniformHypergraph,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Part {
    Unassigned,
    Absorbing,
    Connector,
    Tiling,
    Reservoir,
    Absorbed,
}

struct Copy {
    /// Images of labels `1..=L`.
    embedding: Vec<Vertex>,
    path: EllPath,
}

struct Run<'a> {
    parts: Vec<Part>,
    trace: Trace,
    params: &'a PipelineParams,
}

impl Run<'_> {
    fn snapshot(&self) -> TracePartition {
        let mut t = TracePartition::default();
        for (v, part) in self.parts.iter().enumerate() {
            let v = v as Vertex;
            match part {
                Part::Unassigned => t.unassigned.push(v),
                Part::Absorbing => t.absorbing.push(v),
                Part::Connector => t.connectors.push(v),
                Part::Tiling => t.tiling.push(v),
                Part::Reservoir => t.reservoir.push(v),
                Part::Absorbed => t.absorbed.push(v),
            }
        }
        t
    }

    fn record(&mut self, stage: Stage, status: StageStatus, nodes: u64, note: impl Into<String>) {
        let partition = self.snapshot();
        self.trace.stages.push(StageRecord { stage, status, nodes, note: note.into(), partition });
    }

    fn mask(&self, part: Part) -> Vec<bool> {
        self.parts.iter().map(|&p| p == part).collect()
    }

    fn seed(&self, stage: Stage, i: u64) -> u64 {
        derive_seed(self.params.seed, stage.number() as u64, i)
    }

    fn count(&self, part: Part) -> usize {
        self.parts.iter().filter(|&&p| p == part).count()
    }
}

/// Runs the pipeline on `H⁺_p`. A returned cycle has passed
/// [`is_hamilton_ell_cycle`] against the perturbed graph; otherwise the trace
/// names the stage that failed.
pub fn absorbing_pipeline(host: &KUniformHypergraph, ell: usize, p: f64, params: &PipelineParams) -> Result<PipelineOutcome> {
    let (n, k) = (host.n(), host.k());
    if ell == 0 || ell >= k {
        return Err(Error::InvalidParameter(format!("need 1 <= l < k, got k = {k}, l = {ell}")));
    }
    let d = k - ell;
    if n % d != 0 {
        return Err(Error::InvalidParameter(format!("k - l = {d} does not divide n = {n}")));
    }
    params.validate(k, ell)?;
    let exposure = multi_round_exposure(host, p, params.rounds, derive_seed(params.seed, 0, 0))?;
    let graphs: Vec<KUniformHypergraph> =
        (0..=params.rounds).map(|i| exposure.cumulative(host, i)).collect::<Result<_>>()?;
    let round = |i: usize| &graphs[i.min(params.rounds)];
    let perturbed = exposure.perturbed.clone();

    let mut run = Run {
        parts: vec![Part::Unassigned; n],
        trace: Trace { n, k, l: ell, p, seed: params.seed, stages: Vec::new() },
        params,
    };
    let done = |run: Run<'_>, cycle: Option<EllCycle>| PipelineOutcome { cycle, trace: run.trace, perturbed: perturbed.clone() };

    // stage 1: absorbing paths
    let absorber = if ell >= 2 { Some(build_absorber(k, ell)?) } else { None };
    let gadget_size = absorber.as_ref().map_or(usize::MAX, |a| a.vertex_count());
    let target = match (&absorber, params.absorbers) {
        (None, _) => 0,
        (Some(_), Some(t)) => t,
        (Some(_), None) if n >= gadget_size => (n / (4 * gadget_size)).max(1),
        (Some(_), None) => 0,
    };
    let mut copies: Vec<Copy> = Vec::new();
    let mut nodes = 0u64;
    if let Some(a) = absorber.as_ref().filter(|_| target > 0) {
        for i in 0..target {
            let mut got = None;
            for attempt in 0..params.retries {
                let free: Vec<Vertex> = (0..n as Vertex).filter(|&v| run.parts[v as usize] == Part::Unassigned).collect();
                if free.len() < a.vertex_count() {
                    break;
                }
                let seed = run.seed(Stage::Absorbers, (i * params.retries + attempt) as u64);
                let (copy, used) = embed_absorber(a, host, round(1), &free, n, &params.limits, seed)?;
                nodes += used;
                if copy.is_some() {
                    got = copy;
                    break;
                }
            }
            let Some(copy) = got else { break };
            for &v in copy.path.seq() {
                run.parts[v as usize] = Part::Absorbing;
            }
            copies.push(copy);
        }
        if copies.is_empty() {
            run.record(Stage::Absorbers, StageStatus::Failed, nodes, format!("no embedding of the absorber among {target} requested"));
            return Ok(done(run, None));
        }
        let note = format!("{} of {target} absorbing paths", copies.len());
        run.record(Stage::Absorbers, StageStatus::Ok, nodes, note);
    } else {
        let why = if absorber.is_none() { "no absorber for l = 1" } else { "absorber does not fit" };
        run.record(Stage::Absorbers, StageStatus::Skipped, 0, why);
    }

    // stage 2: join the absorbing paths into one path
    let mut backbone: Option<EllPath> = None;
    match copies.len() {
        0 => run.record(Stage::ConnectAbsorbers, StageStatus::Skipped, 0, "no absorbing paths"),
        1 => {
            backbone = Some(copies[0].path.clone());
            run.record(Stage::ConnectAbsorbers, StageStatus::Ok, 0, "single absorbing path");
        }
        _ => {
            let paths: Vec<EllPath> = copies.iter().map(|c| c.path.clone()).collect();
            let allowed = run.mask(Part::Unassigned);
            let mut shortest = |_: usize, avail: usize| connector_interior_sizes(k, ell, avail);
            let seed = run.seed(Stage::ConnectAbsorbers, 0);
            match build_chain(round(2), &paths, &allowed, &params.limits, seed, &mut shortest, false) {
                Ok(chain) => {
                    for &v in &chain.interior {
                        run.parts[v as usize] = Part::Connector;
                    }
                    backbone = Some(EllPath::new(chain.seq, k, ell)?);
                    run.record(Stage::ConnectAbsorbers, StageStatus::Ok, chain.nodes, "");
                }
                Err(e @ Error::Unconnectable { .. }) => {
                    run.record(Stage::ConnectAbsorbers, StageStatus::Failed, 0, e.to_string());
                    return Ok(done(run, None));
                }
                Err(e) => return Err(e),
            }
        }
    }

    // stage 3: reservoir
    let m = params.tiling_length;
    let b = path_vertex_count(k, ell, m)?;
    let x_prime: Vec<Vertex> = (0..n as Vertex).filter(|&v| run.parts[v as usize] == Part::Unassigned).collect();
    let (r, in_range) = reservoir_size(x_prime.len(), n, b, params.reservoir);
    let mut pool = x_prime.clone();
    pool.shuffle(&mut rng_from_seed(run.seed(Stage::Reservoir, 0)));
    for &v in &pool[..r] {
        run.parts[v as usize] = Part::Reservoir;
    }
    let note = if in_range {
        format!("r = {r}")
    } else {
        format!("r = {r}: no size in range has {b} dividing |X'| - r; took the nearest")
    };
    run.record(Stage::Reservoir, StageStatus::Ok, 0, note);

    // stage 4: tile the rest; uncovered vertices join the reservoir
    let forbidden = VertexSet::collect_from((0..n as Vertex).filter(|&v| run.parts[v as usize] != Part::Unassigned));
    let tiling = greedy_path_tiling(round(3), ell, m, &forbidden, run.seed(Stage::Tiling, 0), params.retries, &params.limits)?;
    for p in &tiling.paths {
        for &v in p.seq() {
            run.parts[v as usize] = Part::Tiling;
        }
    }
    let uncovered = run.count(Part::Unassigned);
    for part in run.parts.iter_mut().filter(|p| **p == Part::Unassigned) {
        *part = Part::Reservoir;
    }
    let note = format!("{} paths, {uncovered} uncovered vertices moved to the reservoir", tiling.paths.len());
    run.record(Stage::Tiling, StageStatus::Ok, tiling.nodes, note);

    // stages 5 and 6: join everything into a cycle through the reservoir, then
    // absorb what is left; a failed attempt is rolled back and retried
    let mut paths: Vec<EllPath> = backbone.into_iter().collect();
    paths.extend(tiling.paths.iter().cloned());
    if paths.is_empty() {
        run.record(Stage::ConnectCycle, StageStatus::Failed, 0, Error::NothingToConnect.to_string());
        return Ok(done(run, None));
    }
    let capacity = copies.len() * d;
    let before = run.parts.clone();
    let mut cycle_seq = Vec::new();
    for attempt in 0..params.retries {
        run.parts.clone_from(&before);
        let last = attempt + 1 == params.retries;
        let tag = format!("attempt {} of {}", attempt + 1, params.retries);
        // even attempts leave as much as possible for absorption, odd ones as little
        let mut policy = |left: usize, avail: usize| -> Vec<usize> {
            let mut sizes = connector_interior_sizes(k, ell, avail);
            if left == 1 {
                sizes.retain(|&q| avail - q <= capacity);
                if attempt % 2 == 1 {
                    sizes.reverse();
                }
            } else {
                let share = avail.saturating_sub(capacity).div_ceil(left);
                sizes.sort_by_key(|&q| (q.abs_diff(share), q));
            }
            sizes
        };
        let allowed = run.mask(Part::Reservoir);
        let seed = run.seed(Stage::ConnectCycle, attempt as u64);
        let chain = match build_chain(round(4), &paths, &allowed, &params.limits, seed, &mut policy, true) {
            Ok(c) => c,
            Err(e @ (Error::Unconnectable { .. } | Error::Precondition(_))) => {
                if last {
                    run.record(Stage::ConnectCycle, StageStatus::Failed, 0, format!("{e} ({tag})"));
                    return Ok(done(run, None));
                }
                continue;
            }
            Err(e) => return Err(e),
        };
        for &v in &chain.interior {
            run.parts[v as usize] = Part::Connector;
        }
        let leftover = run.count(Part::Reservoir);
        if leftover == 0 {
            cycle_seq = chain.seq;
            run.record(Stage::ConnectCycle, StageStatus::Ok, chain.nodes, format!("no reservoir vertices left ({tag})"));
            run.record(Stage::Absorb, StageStatus::Skipped, 0, "nothing left to absorb");
            break;
        }
        let rest: Vec<Vertex> = (0..n as Vertex).filter(|&v| run.parts[v as usize] == Part::Reservoir).collect();
        let plan = match absorber.as_ref() {
            None => Err("leftover vertices but no absorbing paths".to_string()),
            Some(a) => plan_absorption(a, &copies, &rest, round(1), params),
        };
        let plan = match plan {
            Ok(plan) => plan,
            Err(note) => {
                if last {
                    let kept = format!("{leftover} reservoir vertices left ({tag})");
                    run.record(Stage::ConnectCycle, StageStatus::Ok, chain.nodes, kept);
                    run.record(Stage::Absorb, StageStatus::Failed, 0, note);
                    return Ok(done(run, None));
                }
                continue;
            }
        };
        run.record(Stage::ConnectCycle, StageStatus::Ok, chain.nodes, format!("{leftover} reservoir vertices left ({tag})"));
        let a = absorber.as_ref().expect("a plan implies an absorber");
        cycle_seq = chain.seq;
        for (j, tuple) in plan {
            let q = absorb(round(1), a, &copies[j].path, &copies[j].embedding, &tuple)?;
            match replace_segment(&cycle_seq, copies[j].path.seq(), q.seq(), d) {
                Some(seq) => cycle_seq = seq,
                None => {
                    run.record(Stage::Absorb, StageStatus::Failed, 0, format!("absorbing path {j} is not a segment of the cycle"));
                    return Ok(done(run, None));
                }
            }
            for &v in tuple.as_slice() {
                run.parts[v as usize] = Part::Absorbed;
            }
        }
        run.record(Stage::Absorb, StageStatus::Ok, 0, format!("{} tuples absorbed", leftover / d));
        break;
    }

    // stage 7: independent verification against the perturbed graph
    let cycle = EllCycle::new(cycle_seq, k, ell)?;
    if is_hamilton_ell_cycle(&perturbed, &cycle)? {
        run.record(Stage::Verify, StageStatus::Ok, 0, "");
        Ok(done(run, Some(cycle)))
    } else {
        run.record(Stage::Verify, StageStatus::Failed, 0, "assembled sequence is not a Hamilton cycle");
        Ok(done(run, None))
    }
}

/// Embeds `F` with its absorbed tuple pinned to a random tuple of free
/// vertices: regular edges in `host`, random edges in `random`.
fn embed_absorber(
    a: &Absorber,
    host: &KUniformHypergraph,
    random: &KUniformHypergraph,
    free: &[Vertex],
    n: usize,
    limits: &SearchLimits,
    seed: u64,
) -> Result<(Option<Copy>, u64)> {
    let mut rng = rng_from_seed(seed);
    let witness: Vec<Vertex> = free.choose_multiple(&mut rng, a.d()).copied().collect();
    let pins: Vec<(Label, Vertex)> = a.f_a.iter().copied().zip(witness.iter().copied()).collect();
    let mut allowed = vec![false; n];
    for &v in free {
        allowed[v as usize] = true;
    }
    for &v in &witness {
        allowed[v as usize] = false;
    }
    let problem = EmbeddingProblem::new(host, a.reg_edges(), a.vertex_count())
        .constrain(a.rand_edges(), random)
        .pin(&pins)
        .restrict(allowed);
    let outcome = find_embedding(&problem, limits.nodes, seed ^ 0x5eed)?;
    let SearchOutcome::Found(e) = outcome else {
        return Ok((None, limits.nodes));
    };
    let embedding = e.images[..a.path_len].to_vec();
    let path = EllPath::new(a.p_seq.iter().map(|&x| embedding[x as usize - 1]).collect(), a.k, a.ell)?;
    Ok((Some(Copy { embedding, path }), 0))
}

/// Smallest `r` in `[lo·n, hi·n] ∩ [0, |X'|]` with `b | (|X'| − r)`, else the
/// feasible `r` nearest to that range (ties toward the smaller). Returns the
/// size and whether it lies in the range.
fn reservoir_size(x_len: usize, n: usize, b: usize, (lo, hi): (f64, f64)) -> (usize, bool) {
    let lo_r = (lo * n as f64).ceil() as usize;
    let hi_r = ((hi * n as f64).floor() as usize).min(x_len);
    if let Some(r) = (lo_r..=hi_r).find(|&r| r <= x_len && (x_len - r) % b == 0) {
        return (r, true);
    }
    let distance = |r: usize| if r < lo_r { lo_r - r } else { r.saturating_sub(hi_r) };
    let r = (0..=x_len)
        .filter(|&r| (x_len - r) % b == 0)
        .min_by_key(|&r| (distance(r), r))
        .unwrap_or(x_len);
    (r, false)
}

/// Matches the leftover vertices into `(k − ℓ)`-tuples and assigns each to a
/// distinct absorbing path able to absorb it.
fn plan_absorption(
    a: &Absorber,
    copies: &[Copy],
    rest: &[Vertex],
    graph: &KUniformHypergraph,
    params: &PipelineParams,
) -> std::result::Result<Vec<(usize, OrderedTuple)>, String> {
    let d = a.d();
    // per unordered tuple: which copies absorb it, and in which order
    let mut options: Vec<(Vec<Vertex>, Vec<(usize, Vec<Vertex>)>)> = Vec::new();
    let mut aux_edges = Vec::new();
    for idx in KSubsets::new(rest.len(), d) {
        let set: Vec<Vertex> = idx.iter().map(|&i| rest[i as usize]).collect();
        let mut who = Vec::new();
        for (j, c) in copies.iter().enumerate() {
            if let Some(order) = orderings(&set).into_iter().find(|o| can_absorb(graph, a, &c.embedding, o)) {
                who.push((j, order));
            }
        }
        if who.len() >= params.bad_threshold {
            aux_edges.push(idx.clone());
            options.push((idx, who));
        }
    }
    let aux = KUniformHypergraph::new(rest.len(), d, aux_edges).map_err(|e| e.to_string())?;
    let matching = match perfect_matching(&aux, &params.limits).map_err(|e| e.to_string())? {
        Matching::Perfect(m) => m,
        Matching::Impossible(why) => return Err(format!("no perfect matching of leftover tuples: {why}")),
        Matching::BudgetExceeded => return Err("matching search ran out of budget".into()),
    };
    let choices: Vec<&Vec<(usize, Vec<Vertex>)>> = matching
        .iter()
        .map(|e| &options.iter().find(|(s, _)| s == e).expect("matched tuples are aux edges").1)
        .collect();
    // augmenting-path assignment of tuples to distinct copies
    let mut owner: Vec<Option<usize>> = vec![None; copies.len()];
    for t in 0..choices.len() {
        let mut seen = vec![false; copies.len()];
        if !augment(t, &choices, &mut owner, &mut seen) {
            return Err(format!("{} tuples but not enough distinct absorbing paths", choices.len()));
        }
    }
    let mut plan = Vec::new();
    for (j, o) in owner.iter().enumerate() {
        if let Some(t) = *o {
            let order = &choices[t].iter().find(|(c, _)| *c == j).expect("owner is an option").1;
            plan.push((j, OrderedTuple::new(order.clone()).map_err(|e| e.to_string())?));
        }
    }
    Ok(plan)
}

fn augment(t: usize, choices: &[&Vec<(usize, Vec<Vertex>)>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &(j, _) in choices[t].iter() {
        if seen[j] {
            continue;
        }
        seen[j] = true;
        if owner[j].is_none() || augment(owner[j].expect("checked"), choices, owner, seen) {
            owner[j] = Some(t);
            return true;
        }
    }
    false
}

fn orderings(set: &[Vertex]) -> Vec<Vec<Vertex>> {
    if set.len() <= 1 {
        return vec![set.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..set.len() {
        let mut rest = set.to_vec();
        let first = rest.remove(i);
        for mut tail in orderings(&rest) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

/// Replaces the path segment `old` (in either direction) of the cyclic
/// sequence by `new`, keeping edge windows aligned.
fn replace_segment(cycle: &[Vertex], old: &[Vertex], new: &[Vertex], d: usize) -> Option<Vec<Vertex>> {
    let n = cycle.len();
    let i = cycle.iter().position(|&v| v == old[0])?;
    let b = old.len();
    let forward = (0..b).all(|t| cycle[(i + t) % n] == old[t]);
    let backward = (0..b).all(|t| cycle[(i + n - t) % n] == old[t]);
    let (start, piece): (usize, Vec<Vertex>) = if forward {
        (i, new.to_vec())
    } else if backward {
        ((i + n + 1 - b) % n, new.iter().rev().copied().collect())
    } else {
        return None;
    };
    if start % d != 0 {
        return None;
    }
    let mut out = piece;
    out.extend((b..n).map(|t| cycle[(start + t) % n]));
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::extremal_construction;

    #[test]
    fn complete_hosts_succeed() {
        for n in [12, 16, 20] {
            let h = KUniformHypergraph::complete(n, 3).unwrap();
            let out = absorbing_pipeline(&h, 2, 0.0, &PipelineParams::default()).unwrap();
            let c = out.cycle.unwrap_or_else(|| panic!("n = {n}: {:?}", out.trace.stages));
            assert!(is_hamilton_ell_cycle(&h, &c).unwrap());
            for s in &out.trace.stages {
                assert!(s.partition.is_partition_of(n));
            }
        }
    }

    #[test]
    fn absorption_is_exercised() {
        let h = KUniformHypergraph::complete(26, 3).unwrap();
        let params = PipelineParams { reservoir: (0.3, 0.4), ..PipelineParams::default() };
        let out = absorbing_pipeline(&h, 2, 0.0, &params).unwrap();
        assert!(out.cycle.is_some(), "{:?}", out.trace.stages);
    }

    #[test]
    fn empty_host_fails_first_stage() {
        let h = KUniformHypergraph::empty(16, 3).unwrap();
        let out = absorbing_pipeline(&h, 2, 0.0, &PipelineParams::default()).unwrap();
        assert!(out.cycle.is_none());
        assert_eq!(out.trace.failed_stage(), Some(Stage::Absorbers));
    }

    #[test]
    fn divisibility_is_rejected() {
        let h = KUniformHypergraph::complete(9, 4).unwrap();
        assert!(matches!(absorbing_pipeline(&h, 2, 0.0, &PipelineParams::default()), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn extremal_runs_are_sound() {
        let h = extremal_construction(20, 3, 0.5).unwrap();
        for seed in 0..4 {
            let params = PipelineParams { seed, ..PipelineParams::default() };
            let out = absorbing_pipeline(&h, 2, 0.05, &params).unwrap();
            if let Some(c) = out.cycle {
                assert!(is_hamilton_ell_cycle(&out.perturbed, &c).unwrap());
            }
        }
    }

    #[test]
    fn reservoir_rule() {
        // |X'| = 12, b = 4, range [2, 2] is infeasible; 0 and 4 tie, smaller wins
        assert_eq!(reservoir_size(12, 12, 4, (0.1, 0.2)), (0, false));
        assert_eq!(reservoir_size(4, 16, 4, (0.1, 0.2)), (4, false));
        assert_eq!(reservoir_size(20, 40, 4, (0.1, 0.2)), (4, true));
    }

    #[test]
    fn segment_replacement() {
        let cyc: Vec<Vertex> = (0..8).collect();
        let out = replace_segment(&cyc, &[2, 3, 4, 5], &[2, 3, 9, 4, 5], 1).unwrap();
        assert_eq!(out, vec![2, 3, 9, 4, 5, 6, 7, 0, 1]);
        let out = replace_segment(&cyc, &[5, 4, 3, 2], &[5, 4, 9, 3, 2], 1).unwrap();
        assert_eq!(out, vec![2, 3, 9, 4, 5, 6, 7, 0, 1]);
    }
}
