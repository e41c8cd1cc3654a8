use std::collections::{BTreeMap, BTreeSet};

use serde_json::json;

use super::{components, path_windows, rand_path_length, recognize_ell_path, Check, GadgetJson, Label, Report};
use crate::error::{Error, Result};
use crate::hypergraph::Vertex;
use crate::paths::OrderedTuple;

/// The graded family `F_0 ⊆ F_1 ⊆ … ⊆ F_t` on labels `1..=b`, where
/// `t = ⌈k/(k − ℓ)⌉ − 1`, `b = 3(k − ℓ)t + k` and `e_i = {d·i + 1, …, d·i + k}`.
/// `F_i` holds `e_0..=e_t`, `e_{2t+1−i}..=e_{2t}` and `e_{2t+1}..=e_{3t}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectorFamily {
    pub k: usize,
    pub ell: usize,
    pub t: usize,
    pub b: usize,
    /// `e_0, …, e_{3t}`.
    pub edges: Vec<Vec<Label>>,
    /// Indices into `edges` of `E(F_i)`, for `i = 0..=t`.
    pub grades: Vec<Vec<usize>>,
    pub beg: Vec<Label>,
    pub end: Vec<Label>,
}

pub fn build_connector_family(k: usize, ell: usize) -> Result<ConnectorFamily> {
    if ell < 2 || ell >= k {
        return Err(Error::InvalidParameter(format!("connector needs 2 <= l < k, got k = {k}, l = {ell}")));
    }
    let d = k - ell;
    let t = rand_path_length(k, ell);
    if t * d > k - 1 {
        return Err(Error::Construction(format!("t(k - l) = {} exceeds k - 1", t * d)));
    }
    let b = 3 * d * t + k;
    let edges: Vec<Vec<Label>> = (0..=3 * t)
        .map(|i| ((d * i + 1) as Label..=(d * i + k) as Label).collect())
        .collect();
    let grades = (0..=t)
        .map(|i| {
            let mut g: Vec<usize> = (0..=t).collect();
            g.extend(2 * t + 1 - i..=2 * t);
            g.extend(2 * t + 1..=3 * t);
            g
        })
        .collect();
    Ok(ConnectorFamily {
        k,
        ell,
        t,
        b,
        edges,
        grades,
        beg: (1..=ell as Label).collect(),
        end: ((b - ell + 1) as Label..=b as Label).collect(),
    })
}

impl ConnectorFamily {
    pub fn d(&self) -> usize {
        self.k - self.ell
    }

    /// Edge lists of `F_i`.
    pub fn grade(&self, i: usize) -> Vec<Vec<Label>> {
        self.grades[i].iter().map(|&e| self.edges[e].clone()).collect()
    }

    /// Labels outside both ends.
    pub fn interior(&self) -> Vec<Label> {
        ((self.ell + 1) as Label..=(self.b - self.ell) as Label).collect()
    }

    pub fn to_json(&self) -> GadgetJson {
        let idx = |s: &[Label]| s.iter().map(|&x| x - 1).collect::<Vec<Vertex>>();
        let labels = (1..=self.b as Label).map(|x| (format!("u_{x}"), x - 1)).collect();
        let mut parts = BTreeMap::new();
        parts.insert("l".into(), json!(self.ell));
        parts.insert("t".into(), json!(self.t));
        parts.insert(
            "grades".into(),
            json!(self
                .grades
                .iter()
                .map(|g| g.iter().map(|&e| idx(&self.edges[e])).collect::<Vec<_>>())
                .collect::<Vec<_>>()),
        );
        parts.insert("beg".into(), json!(idx(&self.beg)));
        parts.insert("end".into(), json!(idx(&self.end)));
        GadgetJson {
            n: self.b,
            k: self.k,
            edges: self.edges.iter().map(|e| idx(e)).collect(),
            labels,
            parts,
        }
    }
}

/// Certifies the family: the top grade is the full path on `1..=b`, the
/// bottom grade splits into two vertex-disjoint ℓ-paths of lengths `t + 1` and
/// `t` plus `t(k − ℓ) − ℓ` isolated vertices, and each grade adds one edge.
pub fn verify_connector_family(f: &ConnectorFamily) -> Report {
    let (k, ell, t, d) = (f.k, f.ell, f.t, f.d());
    let mut checks = Vec::new();

    let full: Vec<Label> = (1..=f.b as Label).collect();
    let mut expected = path_windows(&full, k, ell);
    expected.sort();
    let mut top = f.grade(t);
    top.sort();
    let full_ok = top == expected && top.len() == 3 * t + 1;
    checks.push(Check::new("full_path", full_ok, format!("{} edges on {} vertices", top.len(), f.b)));

    let bottom = f.grade(0);
    let split = (|| -> std::result::Result<usize, String> {
        let comps = components(&bottom);
        if comps.len() != 2 {
            return Err(format!("{} components", comps.len()));
        }
        let mut lens: Vec<usize> = comps.iter().map(|c| c.len()).collect();
        lens.sort_unstable();
        if lens != [t, t + 1] {
            return Err(format!("component lengths {lens:?}"));
        }
        let mut covered = BTreeSet::new();
        for c in &comps {
            let seq = recognize_ell_path(c, k, ell).ok_or("a component is not an l-path")?;
            covered.extend(seq);
        }
        Ok(f.b - covered.len())
    })();
    let isolated = split.as_ref().ok().copied();
    checks.push(Check::new(
        "two_path_split",
        split.is_ok(),
        split.as_ref().err().cloned().unwrap_or_default(),
    ));
    let want = t * d - ell;
    checks.push(Check::new(
        "isolated_count",
        isolated == Some(want),
        format!("{isolated:?} isolated, expected {want}"),
    ));

    let graded = (1..=t).all(|i| {
        let prev: BTreeSet<usize> = f.grades[i - 1].iter().copied().collect();
        let cur: BTreeSet<usize> = f.grades[i].iter().copied().collect();
        let added: Vec<usize> = cur.difference(&prev).copied().collect();
        prev.is_subset(&cur) && cur.len() == f.grades[0].len() + i && added == [2 * t + 1 - i]
    });
    checks.push(Check::new("graded", graded, ""));

    let overlap = f
        .edges
        .windows(2)
        .all(|w| w[0].iter().filter(|x| w[1].contains(x)).count() == ell);
    checks.push(Check::new("consecutive_overlap", overlap, ""));
    checks.push(Check::new("t_bound", t * d < k, format!("t(k - l) = {}", t * d)));

    Report { checks }
}

/// The tuple in reverse order.
pub fn reverse_tuple(s: &OrderedTuple) -> OrderedTuple {
    s.reversed()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_two_family() {
        let f = build_connector_family(3, 2).unwrap();
        assert_eq!((f.t, f.b), (2, 9));
        assert_eq!(f.grade(2).len(), 7);
        let r = verify_connector_family(&f);
        assert!(r.all_passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn five_two_family() {
        let f = build_connector_family(5, 2).unwrap();
        assert_eq!((f.t, f.b), (1, 14));
        assert!(verify_connector_family(&f).all_passed());
        assert_eq!(f.t * f.d() - f.ell, 1);
    }

    #[test]
    fn tuple_reversal() {
        let s = OrderedTuple::new(vec![1, 2, 3]).unwrap();
        assert_eq!(reverse_tuple(&s).as_slice(), &[3, 2, 1]);
        assert_eq!(reverse_tuple(&reverse_tuple(&s)), s);
        let s = OrderedTuple::new(vec![7, 4]).unwrap();
        assert_eq!(reverse_tuple(&s).as_slice(), &[4, 7]);
    }
}
