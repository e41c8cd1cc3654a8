use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{binomial, KUniformHypergraph, Vertex};

fn check_kl(k: usize, ell: usize) -> Result<()> {
    if k < 2 || ell == 0 || ell >= k {
        return Err(Error::InvalidParameter(format!("need 1 <= l < k, got k = {k}, l = {ell}")));
    }
    Ok(())
}

/// The ℓ-path k-graph of length `m` on vertices `0..b` in path order.
pub fn path_hypergraph(k: usize, ell: usize, m: usize) -> Result<KUniformHypergraph> {
    check_kl(k, ell)?;
    if m == 0 {
        return Err(Error::InvalidParameter("path length must be at least 1".into()));
    }
    let d = k - ell;
    let b = m * d + ell;
    let edges = (0..m).map(|r| ((r * d) as Vertex..(r * d + k) as Vertex).collect());
    KUniformHypergraph::new(b, k, edges)
}

/// `d(H) = e(H) / (v(H) − 1)`.
pub fn density(h: &KUniformHypergraph) -> Result<Ratio<u64>> {
    if h.n() < 2 {
        return Err(Error::UndefinedDensity);
    }
    Ok(Ratio::new(h.edge_count() as u64, h.n() as u64 - 1))
}

/// Whether every proper subgraph on at least two vertices is strictly sparser.
///
/// Among subgraphs on a fixed vertex set the induced one is densest, so it is
/// enough to compare the induced subgraphs on proper vertex subsets; spanning
/// proper subgraphs lose an edge and are sparser whenever `e(H) > 0`.
/// Enumerates all vertex subsets, so `v(H)` must stay below 26.
pub fn strictly_balanced(h: &KUniformHypergraph) -> Result<bool> {
    let whole = density(h)?;
    let n = h.n();
    if n >= 26 {
        return Err(Error::InvalidParameter(format!("{n} vertices is too many to enumerate subsets")));
    }
    if h.edge_count() == 0 {
        // every spanning subgraph has the same density 0
        return Ok(false);
    }
    let masks: Vec<u32> = h.edges().iter().map(|e| e.iter().fold(0u32, |m, &v| m | 1 << v)).collect();
    let full = (1u32 << n) - 1;
    for w in 1..full {
        let size = w.count_ones() as u64;
        if size < 2 {
            continue;
        }
        let inside = masks.iter().filter(|&&e| e & w == e).count() as u64;
        if Ratio::new(inside, size - 1) >= whole {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `th(n) = n^{−1/d(P)} (ln n)^{1/e(P)}` for the ℓ-path `P` of length `m`,
/// i.e. `n^{−(k−ℓ)−(ℓ−1)/m} (ln n)^{1/m}`, evaluated in log space.
pub fn jkv_threshold(k: usize, ell: usize, m: usize, n: usize) -> Result<f64> {
    check_kl(k, ell)?;
    if m == 0 {
        return Err(Error::InvalidParameter("path length must be at least 1".into()));
    }
    if n < 3 {
        return Err(Error::Domain(format!("n = {n} must be at least 3")));
    }
    let ln_n = (n as f64).ln();
    let inv_density = (k - ell) as f64 + (ell as f64 - 1.0) / m as f64;
    Ok((-inv_density * ln_n + ln_n.ln() / m as f64).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    Lower,
    Upper,
}

/// Tail bounds for a random selection of bounded summands with mean `E`:
/// `exp(−δ²E/2m)` below `(1−δ)E` and `exp(−δ²E/3m)` above `(1+δ)E`.
pub fn chernoff_tail(expectation: f64, delta: f64, m: f64, side: Tail) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.5) {
        return Err(Error::Domain(format!("delta = {delta} must lie in (0, 3/2)")));
    }
    if !(m > 0.0) || !(expectation >= 0.0) {
        return Err(Error::Domain("need m > 0 and a non-negative expectation".into()));
    }
    let denom = match side {
        Tail::Lower => 2.0,
        Tail::Upper => 3.0,
    };
    Ok((-delta * delta * expectation / (denom * m)).exp())
}

/// Upper tail `exp(−t/m)` of `P(X ≥ E + t)` for a sum of independent
/// `{0, m}`-valued variables, valid for `t > 6E`.
pub fn binomial_chernoff_tail(expectation: f64, t: f64, m: f64) -> Result<f64> {
    if !(m > 0.0) || !(expectation >= 0.0) {
        return Err(Error::Domain("need m > 0 and a non-negative expectation".into()));
    }
    if !(t > 6.0 * expectation) {
        return Err(Error::Domain(format!("t = {t} must exceed 6E = {}", 6.0 * expectation)));
    }
    Ok((-t / m).exp())
}

/// The codegree coefficient: `1/2` when `k − ℓ` divides `k`, else
/// `1 / (⌈k/(k−ℓ)⌉ (k−ℓ))`.
pub fn dirac_coefficient(k: usize, ell: usize) -> Result<Ratio<u64>> {
    check_kl(k, ell)?;
    let d = (k - ell) as u64;
    let k = k as u64;
    Ok(if k % d == 0 { Ratio::new(1, 2) } else { Ratio::new(1, k.div_ceil(d) * d) })
}

/// Whether `δ₁(G) > (k−1)/k · (C(n−1, k−1) − 1)` with `k ≥ 2` and `k | n`,
/// the minimum vertex degree that forces a perfect matching.
pub fn daykin_haggkvist_check(g: &KUniformHypergraph) -> bool {
    let (n, k) = (g.n(), g.k());
    if k < 2 || n == 0 || n % k != 0 {
        return false;
    }
    let min_degree = (0..n as Vertex).map(|v| g.incident(v).len() as u128).min().unwrap_or(0);
    let c = binomial(n as u64 - 1, k as u64 - 1);
    k as u128 * min_degree > (k as u128 - 1) * c.saturating_sub(1)
}

/// Whether `(k − ℓ + c)·m / b > 1` with `b = m(k−ℓ) + ℓ`, which holds exactly
/// when `c > ℓ/m`.
pub fn exponent_verdict(k: usize, ell: usize, m: usize, c: Ratio<i64>) -> Result<bool> {
    check_kl(k, ell)?;
    if m == 0 {
        return Err(Error::InvalidParameter("path length must be at least 1".into()));
    }
    let d = (k - ell) as i64;
    let b = m as i64 * d + ell as i64;
    Ok((Ratio::from_integer(d) + c) * Ratio::from_integer(m as i64) / Ratio::from_integer(b) > Ratio::from_integer(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_densities() {
        let p = path_hypergraph(3, 2, 2).unwrap();
        assert_eq!(density(&p).unwrap(), Ratio::new(2, 3));
        for k in 2..=6 {
            let edge = KUniformHypergraph::complete(k, k).unwrap();
            assert_eq!(density(&edge).unwrap(), Ratio::new(1, k as u64 - 1));
        }
        assert!(strictly_balanced(&path_hypergraph(3, 2, 5).unwrap()).unwrap());
        assert!(matches!(density(&KUniformHypergraph::empty(1, 1).unwrap()), Err(Error::UndefinedDensity)));
    }

    #[test]
    fn unbalanced_example() {
        // a triangle is denser than the whole graph
        let h = KUniformHypergraph::new(6, 2, vec![vec![0, 1], vec![1, 2], vec![0, 2], vec![3, 4]]).unwrap();
        assert!(!strictly_balanced(&h).unwrap());
    }

    #[test]
    fn threshold_values() {
        let v = jkv_threshold(3, 2, 1, 100).unwrap();
        assert!((v - 100f64.powi(-2) * 100f64.ln()).abs() < 1e-15);
        assert!((v - 4.605e-4).abs() < 1e-6);
        let v = jkv_threshold(4, 2, 1, 50).unwrap();
        assert!((v - 50f64.powi(-3) * 50f64.ln()).abs() < 1e-15);
        // the exponent of n tends to −(k − ℓ) as m grows
        let n = 1e6 as usize;
        let slope = |m| jkv_threshold(3, 2, m, n).unwrap().ln() / (n as f64).ln();
        assert!((slope(100_000) + 1.0).abs() < 1e-3);
        assert!(slope(1) < slope(10));
    }

    #[test]
    fn tails() {
        let lower = chernoff_tail(200.0, 0.5, 1.0, Tail::Lower).unwrap();
        assert!((lower - (-25f64).exp()).abs() < 1e-20);
        assert!(chernoff_tail(200.0, 1e-9, 1.0, Tail::Upper).unwrap() > 1.0 - 1e-12);
        assert!(matches!(chernoff_tail(1.0, 1.5, 1.0, Tail::Upper), Err(Error::Domain(_))));
        assert!(matches!(chernoff_tail(1.0, 0.0, 1.0, Tail::Upper), Err(Error::Domain(_))));
        assert_eq!(binomial_chernoff_tail(1.0, 10.0, 2.0).unwrap(), (-5f64).exp());
        assert!(matches!(binomial_chernoff_tail(1.0, 6.0, 2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn dirac_values() {
        assert_eq!(dirac_coefficient(3, 2).unwrap(), Ratio::new(1, 2));
        assert_eq!(dirac_coefficient(5, 3).unwrap(), Ratio::new(1, 6));
        assert_eq!(dirac_coefficient(4, 2).unwrap(), Ratio::new(1, 2));
    }

    #[test]
    fn matching_degree_condition() {
        assert!(daykin_haggkvist_check(&KUniformHypergraph::complete(6, 3).unwrap()));
        assert!(!daykin_haggkvist_check(&KUniformHypergraph::complete(7, 3).unwrap()));
        assert!(!daykin_haggkvist_check(&KUniformHypergraph::empty(6, 3).unwrap()));
    }

    #[test]
    fn verdict_flips_at_ell_over_m() {
        for (k, ell, m) in [(3, 2, 1), (3, 2, 4), (5, 2, 3), (6, 4, 7)] {
            let edge = Ratio::new(ell as i64, m as i64);
            let eps = Ratio::new(1, 1_000_000);
            assert!(!exponent_verdict(k, ell, m, edge).unwrap());
            assert!(!exponent_verdict(k, ell, m, edge - eps).unwrap());
            assert!(exponent_verdict(k, ell, m, edge + eps).unwrap());
        }
    }
}
