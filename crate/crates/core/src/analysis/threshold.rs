//! Monte Carlo estimation of the probability that `H⁺_p` has a Hamilton
//! ℓ-cycle, with coupled sampling: every trial draws one uniform per k-set and
//! the graph at `p` keeps the non-edges whose uniform is below `p`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::moment::ln_factorial;
use crate::error::{Error, Result};
use crate::hypergraph::{HostDescriptor, KUniformHypergraph, UniformField, Vertex};
use crate::rng::derive_seed;
use crate::search::{exact_hamilton_search, SearchLimits, SearchOutcome};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    pub host: HostDescriptor,
    pub n: usize,
    pub k: usize,
    pub l: usize,
    /// Strictly increasing probabilities in `[0, 1]`; may be empty when only
    /// the median crossing is wanted.
    pub grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Also locate each trial's exact crossing point and report their median.
    pub median: bool,
    pub limits: SearchLimits,
}

impl ThresholdConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.l == 0 || self.l >= self.k {
            return Err(Error::InvalidParameter(format!("need 1 <= l < k, got k = {}, l = {}", self.k, self.l)));
        }
        if self.grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidParameter("grid values must lie in [0, 1]".into()));
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("grid must be strictly increasing".into()));
        }
        if self.grid.is_empty() && !self.median {
            return Err(Error::InvalidParameter("nothing to estimate: empty grid and no median".into()));
        }
        self.limits.validate()
    }
}

/// Where a trial's coupled family first becomes Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "p", rename_all = "snake_case")]
pub enum Crossing {
    /// The host alone is Hamiltonian.
    Host,
    /// Hamiltonian exactly for `p` strictly above this value.
    At(f64),
    /// Not Hamiltonian even at `p = 1`.
    Never,
    /// Some search ran out of budget.
    Inconclusive,
}

impl Crossing {
    /// The crossing as a number, `+∞` for `Never`.
    fn value(self) -> Option<f64> {
        match self {
            Crossing::Host => Some(0.0),
            Crossing::At(p) => Some(p),
            Crossing::Never => Some(f64::INFINITY),
            Crossing::Inconclusive => None,
        }
    }

    /// Hamiltonicity at `p` implied by the crossing.
    pub fn predicts(self, p: f64) -> Option<bool> {
        match self {
            Crossing::Host => Some(true),
            Crossing::At(x) => Some(x < p),
            Crossing::Never => Some(false),
            Crossing::Inconclusive => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    /// Hamiltonicity at each grid point; `None` when the search ran out of budget.
    pub indicators: Vec<Option<bool>>,
    pub crossing: Option<Crossing>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub p: f64,
    pub trials: usize,
    pub successes: usize,
    pub inconclusive: usize,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl CurvePoint {
    pub fn half_width(&self) -> f64 {
        (self.ci_hi - self.ci_lo) / 2.0
    }
}

/// Median of the per-trial crossings: the `p` at which the estimated
/// probability reaches ½. `None` bounds stand for `+∞`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MedianEstimate {
    pub p_half: Option<f64>,
    pub ci_lo: f64,
    pub ci_hi: Option<f64>,
    pub trials: usize,
    pub inconclusive: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCurve {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub host: String,
    pub seed: u64,
    pub points: Vec<CurvePoint>,
    pub median: Option<MedianEstimate>,
    pub trials: Vec<TrialRecord>,
}

impl ThresholdCurve {
    /// Whether every trial's conclusive indicators are non-decreasing in `p`.
    pub fn is_monotone(&self) -> bool {
        self.trials.iter().all(|t| {
            let known: Vec<bool> = t.indicators.iter().flatten().copied().collect();
            known.windows(2).all(|w| w[0] <= w[1])
        })
    }

    /// Whether grid indicators agree with the located crossings.
    pub fn crossings_agree(&self) -> bool {
        self.trials.iter().all(|t| {
            let Some(c) = t.crossing else { return true };
            t.indicators.iter().zip(&self.points).all(|(ind, pt)| match (ind, c.predicts(pt.p)) {
                (Some(a), Some(b)) => *a == b,
                _ => true,
            })
        })
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Malformed(e.to_string());
        w.write_record(["p", "trials", "successes", "inconclusive", "p_hat", "ci_lo", "ci_hi"]).map_err(io)?;
        for pt in &self.points {
            w.write_record([
                pt.p.to_string(),
                pt.trials.to_string(),
                pt.successes.to_string(),
                pt.inconclusive.to_string(),
                pt.p_hat.to_string(),
                pt.ci_lo.to_string(),
                pt.ci_hi.to_string(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Malformed(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("curve serialization cannot fail")
    }
}

/// Wilson score interval for `successes` out of `trials` at quantile `z`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let centre = (phat + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// `P(B ≤ j)` for `B ~ Binomial(n, ½)`.
pub fn binomial_half_cdf(n: usize, j: usize) -> f64 {
    let ln_n = ln_factorial(n as u64);
    let ln_half = n as f64 * std::f64::consts::LN_2;
    (0..=j.min(n))
        .map(|i| (ln_n - ln_factorial(i as u64) - ln_factorial((n - i) as u64) - ln_half).exp())
        .sum::<f64>()
        .min(1.0)
}

/// Distribution-free 95% interval for the median of sorted samples: order
/// statistics `x_(j)` and `x_(n+1−j)` for the largest `j` with
/// `P(B ≤ j − 1) ≤ 0.025`. `None` when no `j` qualifies.
pub fn median_order_interval(n: usize) -> Option<(usize, usize)> {
    let mut best = None;
    for j in 1..=n.div_ceil(2) {
        if binomial_half_cdf(n, j - 1) <= 0.025 {
            best = Some(j);
        } else {
            break;
        }
    }
    best.map(|j| (j, n + 1 - j))
}

fn hamiltonian(g: &KUniformHypergraph, ell: usize, limits: &SearchLimits) -> Result<Option<bool>> {
    Ok(match exact_hamilton_search(g, ell, limits)? {
        SearchOutcome::Found(_) => Some(true),
        SearchOutcome::Exhausted => Some(false),
        SearchOutcome::BudgetExceeded => None,
    })
}

/// Binary search for the smallest prefix of the non-edges, sorted by their
/// uniform, whose addition makes the host Hamiltonian.
fn locate_crossing(host: &KUniformHypergraph, field: &UniformField, ell: usize, limits: &SearchLimits) -> Result<Crossing> {
    let mut extra: Vec<(f64, Vec<Vertex>)> =
        field.iter().filter(|(e, _)| !host.contains_sorted(e)).map(|(e, u)| (u, e)).collect();
    extra.sort_by(|a, b| a.0.total_cmp(&b.0));
    let with = |j: usize| -> Result<Option<bool>> {
        let added = KUniformHypergraph::new(host.n(), host.k(), extra[..j].iter().map(|(_, e)| e.clone()))?;
        hamiltonian(&host.union(&added)?, ell, limits)
    };
    match with(0)? {
        None => return Ok(Crossing::Inconclusive),
        Some(true) => return Ok(Crossing::Host),
        Some(false) => {}
    }
    match with(extra.len())? {
        None => return Ok(Crossing::Inconclusive),
        Some(false) => return Ok(Crossing::Never),
        Some(true) => {}
    }
    let (mut lo, mut hi) = (0, extra.len());
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        match with(mid)? {
            None => return Ok(Crossing::Inconclusive),
            Some(true) => hi = mid,
            Some(false) => lo = mid,
        }
    }
    Ok(Crossing::At(extra[hi - 1].0))
}

fn run_trial(cfg: &ThresholdConfig, trial: usize) -> Result<TrialRecord> {
    let host_seed = derive_seed(cfg.seed, 1, trial as u64);
    let field_seed = derive_seed(cfg.seed, 2, trial as u64);
    let host = cfg.host.build(cfg.n, cfg.k, host_seed)?;
    let field = UniformField::new(cfg.n, cfg.k, field_seed)?;
    let indicators = cfg
        .grid
        .iter()
        .map(|&p| hamiltonian(&field.perturb(&host, p)?, cfg.l, &cfg.limits))
        .collect::<Result<Vec<_>>>()?;
    let crossing = if cfg.median { Some(locate_crossing(&host, &field, cfg.l, &cfg.limits)?) } else { None };
    Ok(TrialRecord { trial, seed: field_seed, indicators, crossing })
}

/// Estimates the Hamiltonicity probability of `H⁺_p` at each grid point with
/// Wilson intervals, and optionally the median crossing point. Trials run in
/// parallel and are reproducible from `seed`; random hosts are redrawn per trial.
pub fn estimate_threshold_curve(cfg: &ThresholdConfig) -> Result<ThresholdCurve> {
    cfg.validate()?;
    let trials: Vec<TrialRecord> = (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, t)).collect::<Result<_>>()?;

    let points = cfg
        .grid
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let successes = trials.iter().filter(|t| t.indicators[i] == Some(true)).count();
            let inconclusive = trials.iter().filter(|t| t.indicators[i].is_none()).count();
            let conclusive = cfg.trials - inconclusive;
            let p_hat = if conclusive == 0 { 0.0 } else { successes as f64 / conclusive as f64 };
            let (ci_lo, ci_hi) = wilson_interval(successes, conclusive, Z_95);
            CurvePoint { p, trials: cfg.trials, successes, inconclusive, p_hat, ci_lo, ci_hi }
        })
        .collect();

    let median = cfg.median.then(|| {
        let mut values: Vec<f64> = trials.iter().filter_map(|t| t.crossing.and_then(Crossing::value)).collect();
        values.sort_by(f64::total_cmp);
        let inconclusive = cfg.trials - values.len();
        let finite = |x: f64| x.is_finite().then_some(x);
        let m = values.len();
        let p_half = match m {
            0 => None,
            _ if m % 2 == 1 => finite(values[m / 2]),
            _ => finite((values[m / 2 - 1] + values[m / 2]) / 2.0),
        };
        let (ci_lo, ci_hi) = match median_order_interval(m) {
            Some((j, u)) => (values[j - 1], finite(values[u - 1])),
            None => (0.0, None),
        };
        MedianEstimate { p_half, ci_lo, ci_hi, trials: cfg.trials, inconclusive }
    });

    Ok(ThresholdCurve {
        n: cfg.n,
        k: cfg.k,
        l: cfg.l,
        host: cfg.host.to_string(),
        seed: cfg.seed,
        points,
        median,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(host: HostDescriptor, grid: Vec<f64>, trials: usize) -> ThresholdConfig {
        ThresholdConfig {
            host,
            n: 6,
            k: 3,
            l: 2,
            grid,
            trials,
            seed: 11,
            median: true,
            limits: SearchLimits::default(),
        }
    }

    #[test]
    fn trivial_hosts() {
        let c = estimate_threshold_curve(&config(HostDescriptor::Complete, vec![0.0, 0.5], 5)).unwrap();
        assert!(c.points.iter().all(|p| p.p_hat == 1.0));
        assert_eq!(c.median.as_ref().unwrap().p_half, Some(0.0));
        let e = estimate_threshold_curve(&config(HostDescriptor::Empty, vec![0.0, 1.0], 5)).unwrap();
        assert_eq!(e.points[0].p_hat, 0.0);
        assert_eq!(e.points[1].p_hat, 1.0);
        assert!(e.is_monotone() && e.crossings_agree());
    }

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(0, 10, Z_95);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.277_532).abs() < 1e-5);
        let (lo, hi) = wilson_interval(5, 10, Z_95);
        assert!((lo - 0.236_593).abs() < 1e-5 && (hi - 0.763_407).abs() < 1e-5);
    }

    #[test]
    fn order_statistics() {
        assert_eq!(median_order_interval(5), None);
        // P(B ≤ 0) = 1/64 ≤ 0.025 < P(B ≤ 1) = 7/64
        assert_eq!(median_order_interval(6), Some((1, 6)));
        assert!((binomial_half_cdf(6, 1) - 7.0 / 64.0).abs() < 1e-15);
        assert!((binomial_half_cdf(10, 10) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_columns() {
        let c = estimate_threshold_curve(&config(HostDescriptor::Empty, vec![0.5], 3)).unwrap();
        let csv = c.to_csv().unwrap();
        assert!(csv.starts_with("p,trials,successes,inconclusive,p_hat,ci_lo,ci_hi\n"));
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(estimate_threshold_curve(&config(HostDescriptor::Empty, vec![0.5, 0.5], 3)).is_err());
        assert!(estimate_threshold_curve(&config(HostDescriptor::Empty, vec![1.5], 3)).is_err());
        assert!(estimate_threshold_curve(&config(HostDescriptor::Empty, vec![0.5], 0)).is_err());
    }
}
