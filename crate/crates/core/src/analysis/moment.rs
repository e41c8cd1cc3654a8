use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Expected number of path-inducing injections of `⌊n/2b⌋` disjoint ℓ-paths
/// of length `m` into the binomial random k-graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub b: usize,
    pub p: f64,
    /// Number of path copies, `⌊n/2b⌋`.
    pub paths: usize,
    /// `ln E(X)`; `None` when `E(X) = 0`.
    pub log_expectation: Option<f64>,
    /// Whether `E(X) < 1`.
    pub below_one: bool,
    /// Set when `2b` does not divide `n`, so fewer than `n/2` vertices are covered.
    pub flagged: bool,
}

impl MomentReport {
    pub fn expectation(&self) -> f64 {
        self.log_expectation.map_or(0.0, f64::exp)
    }
}

/// Compensated sum of `ln i` for `i` in `lo..=hi`.
pub fn ln_product(lo: u64, hi: u64) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for i in lo.max(2)..=hi {
        let y = (i as f64).ln() - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// `ln n!`.
pub fn ln_factorial(n: u64) -> f64 {
    ln_product(2, n)
}

/// `E(X) = n!/(n − v)! · p^{qm}` with `q = ⌊n/2b⌋` copies on `v = qb` vertices.
pub fn first_moment(n: usize, k: usize, ell: usize, m: usize, p: f64) -> Result<MomentReport> {
    if k < 2 || ell == 0 || ell >= k || m == 0 {
        return Err(Error::InvalidParameter(format!("invalid path parameters k = {k}, l = {ell}, m = {m}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} is not a probability")));
    }
    let b = m * (k - ell) + ell;
    let paths = n / (2 * b);
    let vertices = paths * b;
    let edges = paths * m;
    let log_expectation = if edges > 0 && p == 0.0 {
        None
    } else {
        let injections = ln_product((n - vertices) as u64 + 1, n as u64);
        Some(injections + if edges > 0 { edges as f64 * p.ln() } else { 0.0 })
    };
    Ok(MomentReport {
        n,
        k,
        l: ell,
        m,
        b,
        p,
        paths,
        log_expectation,
        below_one: log_expectation.map_or(true, |l| l < 0.0),
        flagged: n % (2 * b) != 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_case() {
        let r = first_moment(6, 3, 2, 1, 0.25).unwrap();
        assert_eq!((r.b, r.paths), (3, 1));
        assert!(!r.flagged);
        assert!((r.expectation() - 120.0 * 0.25).abs() < 1e-12);
        let zero = first_moment(6, 3, 2, 1, 0.0).unwrap();
        assert_eq!(zero.expectation(), 0.0);
        assert!(zero.below_one);
        assert!(first_moment(7, 3, 2, 1, 0.5).unwrap().flagged);
    }

    #[test]
    fn factorials() {
        assert!((ln_factorial(10) - 3_628_800f64.ln()).abs() < 1e-12);
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
    }
}
