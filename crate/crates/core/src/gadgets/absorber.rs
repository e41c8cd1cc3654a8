use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde_json::json;

use super::{path_windows, rand_path_length, recognize_ell_path, Check, GadgetJson, Label, Report};
use crate::error::{Error, Result};
use crate::hypergraph::{KUniformHypergraph, Vertex};
use crate::paths::{EllPath, OrderedTuple};

/// The absorbing gadget `F` for given `2 ≤ ℓ < k`.
///
/// With `d = k − ℓ`, `T = 3d + 1` and `L = T·k`, vertex `v_i^j` (`i ∈ [k]`,
/// `j ∈ [T]`) has label `(j − 1)·k + i` and `a_i` (`i ∈ [d]`) has label `L + i`.
/// `P(F)` runs through `1..=L` in order. `Q(F)` swaps `v_i^{i+1}` for `a_i`
/// and re-inserts the swapped vertices right after `v_k^{2d}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Absorber {
    pub k: usize,
    pub ell: usize,
    pub rows: usize,
    pub path_len: usize,
    pub p_seq: Vec<Label>,
    pub q_seq: Vec<Label>,
    pub f_reg: Vec<Vec<Label>>,
    pub f_rand: Vec<Vec<Label>>,
    pub f_a: Vec<Label>,
    pub beg: Vec<Label>,
    pub end: Vec<Label>,
}

fn v(k: usize, i: usize, j: usize) -> Label {
    ((j - 1) * k + i) as Label
}

/// Q(F) by the modification rule applied to P(F).
fn q_by_rule(k: usize, d: usize, big_l: usize) -> Vec<Label> {
    let mut seq: Vec<Label> = (1..=big_l as Label).collect();
    let mut replaced = Vec::with_capacity(d);
    for i in 1..=d {
        let pos = seq.iter().position(|&x| x == v(k, i, i + 1)).expect("label present");
        replaced.push(seq[pos]);
        seq[pos] = (big_l + i) as Label;
    }
    let anchor = seq.iter().position(|&x| x == v(k, k, 2 * d)).expect("label present");
    seq.splice(anchor + 1..anchor + 1, replaced);
    seq
}

/// Q(F) assembled row by row as in its displayed form.
fn q_by_rows(k: usize, d: usize, rows: usize) -> Vec<Label> {
    let big_l = rows * k;
    let mut seq = Vec::with_capacity(big_l + d);
    seq.extend((1..=k).map(|i| v(k, i, 1)));
    for j in 2..=d + 1 {
        seq.extend((1..=k).map(|i| if i == j - 1 { (big_l + j - 1) as Label } else { v(k, i, j) }));
    }
    for j in d + 2..=2 * d {
        seq.extend((1..=k).map(|i| v(k, i, j)));
    }
    seq.extend((1..=d).map(|i| v(k, i, i + 1)));
    for j in 2 * d + 1..=rows {
        seq.extend((1..=k).map(|i| v(k, i, j)));
    }
    seq
}

/// Builds `F(k, ℓ)`. Fails if the two descriptions of `Q(F)` disagree.
pub fn build_absorber(k: usize, ell: usize) -> Result<Absorber> {
    if ell < 2 || ell >= k {
        return Err(Error::InvalidParameter(format!("absorber needs 2 <= l < k, got k = {k}, l = {ell}")));
    }
    let d = k - ell;
    let rows = 3 * d + 1;
    let big_l = rows * k;
    let p_seq: Vec<Label> = (1..=big_l as Label).collect();
    let q_seq = q_by_rule(k, d, big_l);
    let q_rows = q_by_rows(k, d, rows);
    if q_seq != q_rows {
        let at = q_seq.iter().zip(&q_rows).position(|(a, b)| a != b).unwrap_or(q_seq.len().min(q_rows.len()));
        return Err(Error::Construction(format!(
            "second path differs between rule and row form at position {at}"
        )));
    }

    let marked = [v(k, d, d + 1), v(k, 1, 2 * d + 1)];
    let mut all: BTreeSet<Vec<Label>> = path_windows(&p_seq, k, ell).into_iter().collect();
    let q_windows = path_windows(&q_seq, k, ell);
    let f_rand: Vec<Vec<Label>> = q_windows
        .iter()
        .filter(|e| marked.iter().all(|m| e.contains(m)))
        .cloned()
        .collect();
    all.extend(q_windows);
    let rand_set: HashSet<&Vec<Label>> = f_rand.iter().collect();
    let f_reg = all.iter().filter(|e| !rand_set.contains(e)).cloned().collect();
    let mut f_rand = f_rand;
    f_rand.sort();

    Ok(Absorber {
        k,
        ell,
        rows,
        path_len: big_l,
        f_a: (1..=d).map(|i| (big_l + i) as Label).collect(),
        beg: p_seq[..ell].to_vec(),
        end: p_seq[big_l - ell..].to_vec(),
        p_seq,
        q_seq,
        f_reg,
        f_rand,
    })
}

impl Absorber {
    pub fn d(&self) -> usize {
        self.k - self.ell
    }

    /// Number of gadget vertices, `L + k − ℓ`.
    pub fn vertex_count(&self) -> usize {
        self.path_len + self.d()
    }

    /// Length `t` of the random part's path.
    pub fn t(&self) -> usize {
        rand_path_length(self.k, self.ell)
    }

    /// Class index in `1..=k` of a label.
    pub fn class_of(&self, label: Label) -> usize {
        let x = label as usize;
        if x > self.path_len {
            x - self.path_len
        } else {
            (x - 1) % self.k + 1
        }
    }

    /// All edges of `F`, sorted.
    pub fn edges(&self) -> Vec<Vec<Label>> {
        let mut e: Vec<Vec<Label>> = self.f_reg.iter().chain(&self.f_rand).cloned().collect();
        e.sort();
        e.dedup();
        e
    }

    /// `"v_i^j"` / `"a_i"` name of a label.
    pub fn name_of(&self, label: Label) -> String {
        let x = label as usize;
        if x > self.path_len {
            format!("a_{}", x - self.path_len)
        } else {
            format!("v_{}^{}", (x - 1) % self.k + 1, (x - 1) / self.k + 1)
        }
    }

    pub fn to_json(&self) -> GadgetJson {
        let idx = |s: &[Label]| s.iter().map(|&x| x - 1).collect::<Vec<Vertex>>();
        let idx_edges = |es: &[Vec<Label>]| es.iter().map(|e| idx(e)).collect::<Vec<_>>();
        let labels = (1..=self.vertex_count() as Label).map(|x| (self.name_of(x), x - 1)).collect();
        let mut parts = BTreeMap::new();
        parts.insert("l".into(), json!(self.ell));
        parts.insert("p_seq".into(), json!(idx(&self.p_seq)));
        parts.insert("q_seq".into(), json!(idx(&self.q_seq)));
        parts.insert("f_rand".into(), json!(idx_edges(&self.f_rand)));
        parts.insert("f_a".into(), json!(idx(&self.f_a)));
        parts.insert("beg".into(), json!(idx(&self.beg)));
        parts.insert("end".into(), json!(idx(&self.end)));
        GadgetJson {
            n: self.vertex_count(),
            k: self.k,
            edges: idx_edges(&self.edges()),
            labels,
            parts,
        }
    }
}

fn path_in(seq: &[Label], k: usize, ell: usize, edges: &BTreeSet<Vec<Label>>) -> std::result::Result<(), String> {
    if EllPath::new(seq.to_vec(), k, ell).is_err() {
        return Err("sequence is not an admissible path sequence".into());
    }
    match path_windows(seq, k, ell).into_iter().find(|w| !edges.contains(w)) {
        Some(w) => Err(format!("window {w:?} is not an edge")),
        None => Ok(()),
    }
}

fn ends_match(seq: &[Label], beg: &[Label], end: &[Label]) -> bool {
    seq.len() >= beg.len() && seq.starts_with(beg) && seq.ends_with(end)
}

/// Checks the five defining properties of the gadget from its stored data.
pub fn verify_absorber(a: &Absorber) -> Report {
    let (k, ell) = (a.k, a.ell);
    let d = a.d();
    let all: BTreeSet<Vec<Label>> = a.f_reg.iter().chain(&a.f_rand).cloned().collect();
    let vf: BTreeSet<Label> = (1..=a.vertex_count() as Label).collect();
    let fa: BTreeSet<Label> = a.f_a.iter().copied().collect();
    let mut checks = Vec::new();

    let p_vertices: BTreeSet<Label> = a.p_seq.iter().copied().collect();
    let expected_p: BTreeSet<Label> = vf.difference(&fa).copied().collect();
    let p_check = path_in(&a.p_seq, k, ell, &all).and_then(|_| {
        if p_vertices != expected_p || p_vertices.len() != a.p_seq.len() {
            Err("vertex set is not V(F) minus the absorbed set".into())
        } else if !ends_match(&a.p_seq, &a.beg, &a.end) {
            Err("ends differ from the gadget ends".into())
        } else {
            Ok(())
        }
    });
    checks.push(Check::new("p_path", p_check.is_ok(), p_check.err().unwrap_or_default()));

    let q_vertices: BTreeSet<Label> = a.q_seq.iter().copied().collect();
    let q_check = path_in(&a.q_seq, k, ell, &all).and_then(|_| {
        if q_vertices != vf || q_vertices.len() != a.q_seq.len() {
            Err("vertex set is not V(F)".into())
        } else if !ends_match(&a.q_seq, &a.beg, &a.end) {
            Err("ends differ from the gadget ends".into())
        } else {
            Ok(())
        }
    });
    checks.push(Check::new("q_path", q_check.is_ok(), q_check.err().unwrap_or_default()));

    let count = a.vertex_count();
    let count_ok = count == a.rows * k + d && a.rows == 3 * d + 1 && count < 3 * k * k;
    checks.push(Check::new(
        "vertex_count",
        count_ok,
        format!("{count} vertices, bound {}", 3 * k * k),
    ));

    let bad_reg = a.f_reg.iter().find(|e| {
        let classes: BTreeSet<usize> = e.iter().map(|&x| a.class_of(x)).collect();
        classes.len() != k || e.len() != k
    });
    checks.push(Check::new(
        "reg_partite",
        bad_reg.is_none(),
        bad_reg.map(|e| format!("edge {e:?} meets a class twice")).unwrap_or_default(),
    ));

    let t = rand_path_length(k, ell);
    let rand_check = (|| -> std::result::Result<(), String> {
        if a.f_rand.len() != t {
            return Err(format!("{} edges, expected {t}", a.f_rand.len()));
        }
        let seq = recognize_ell_path(&a.f_rand, k, ell).ok_or("edges do not form an l-path")?;
        let forbidden: BTreeSet<Label> = fa.iter().chain(&a.beg).chain(&a.end).copied().collect();
        if let Some(x) = seq.iter().find(|x| forbidden.contains(x)) {
            return Err(format!("path uses protected vertex {x}"));
        }
        let isolated = expected_p.len() - seq.len();
        if isolated != a.path_len - t * d - ell {
            return Err(format!("{isolated} isolated vertices"));
        }
        Ok(())
    })();
    checks.push(Check::new("rand_path", rand_check.is_ok(), rand_check.err().unwrap_or_default()));

    Report { checks }
}

fn image(embedding: &[Vertex], s: &OrderedTuple, big_l: usize, label: Label) -> Vertex {
    let x = label as usize;
    if x > big_l {
        s.as_slice()[x - big_l - 1]
    } else {
        embedding[x - 1]
    }
}

/// Whether `s` can be absorbed by the copy of `P(F)` given by `embedding`
/// (images of labels `1..=L`): every window of `Q(F)` with `a_i ↦ s_i` must be
/// an edge of `host`.
pub fn can_absorb(host: &KUniformHypergraph, a: &Absorber, embedding: &[Vertex], s: &[Vertex]) -> bool {
    let tuple = OrderedTuple::new(s.to_vec());
    let Ok(tuple) = tuple else { return false };
    let mut w = Vec::with_capacity(a.k);
    let d = a.d();
    (0..=(a.q_seq.len() - a.k) / d).all(|r| {
        w.clear();
        w.extend(a.q_seq[r * d..r * d + a.k].iter().map(|&x| image(embedding, &tuple, a.path_len, x)));
        host.contains_edge(&w)
    })
}

/// Replaces the copy `p_copy` of `P(F)` by the copy of `Q(F)` that also
/// covers `s`. The result has the same ends and vertex set `V(p_copy) ∪ s`.
pub fn absorb(
    host: &KUniformHypergraph,
    a: &Absorber,
    p_copy: &EllPath,
    embedding: &[Vertex],
    s: &OrderedTuple,
) -> Result<EllPath> {
    if embedding.len() != a.path_len {
        return Err(Error::Precondition(format!(
            "embedding has {} images, expected {}",
            embedding.len(),
            a.path_len
        )));
    }
    if s.len() != a.d() {
        return Err(Error::Precondition(format!("tuple has {} vertices, expected {}", s.len(), a.d())));
    }
    let p_image: Vec<Vertex> = a.p_seq.iter().map(|&x| embedding[x as usize - 1]).collect();
    if p_copy.seq() != p_image.as_slice() || p_copy.k() != a.k || p_copy.ell() != a.ell {
        return Err(Error::Precondition("path is not the image of P(F) under the embedding".into()));
    }
    if let Some(x) = s.as_slice().iter().find(|x| p_copy.seq().contains(x)) {
        return Err(Error::Precondition(format!("vertex {x} of the tuple lies on the path")));
    }
    let q_image: Vec<Vertex> = a.q_seq.iter().map(|&x| image(embedding, s, a.path_len, x)).collect();
    for w in path_windows(&q_image, a.k, a.ell) {
        if !host.contains_sorted(&w) {
            return Err(Error::CannotAbsorb { edge: w });
        }
    }
    EllPath::new(q_image, a.k, a.ell)
}

impl Absorber {
    pub fn reg_edges(&self) -> &[Vec<Label>] {
        &self.f_reg
    }

    pub fn rand_edges(&self) -> &[Vec<Label>] {
        &self.f_rand
    }

    /// Edge list of `P(F)`.
    pub fn p_edges(&self) -> Vec<Vec<Label>> {
        path_windows(&self.p_seq, self.k, self.ell)
    }

    /// Edge list of `Q(F)`.
    pub fn q_edges(&self) -> Vec<Vec<Label>> {
        path_windows(&self.q_seq, self.k, self.ell)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_absorbers_certify() {
        for (k, ell) in [(3, 2), (4, 2), (4, 3), (5, 3), (6, 2)] {
            let a = build_absorber(k, ell).unwrap();
            let r = verify_absorber(&a);
            assert!(r.all_passed(), "({k},{ell}): {:?}", r.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn sizes() {
        let a = build_absorber(3, 2).unwrap();
        assert_eq!((a.rows, a.path_len, a.vertex_count(), a.f_rand.len()), (4, 12, 13, 2));
        let a = build_absorber(4, 3).unwrap();
        assert_eq!((a.rows, a.path_len, a.vertex_count()), (4, 16, 17));
        assert_eq!(a.f_rand.len(), 3);
    }

    #[test]
    fn q_sequence_for_three_two() {
        // d = 1: a_1 replaces v_1^2 (label 4); v_1^2 follows v_3^2 (label 6)
        let a = build_absorber(3, 2).unwrap();
        assert_eq!(a.q_seq, vec![1, 2, 3, 13, 5, 6, 4, 7, 8, 9, 10, 11, 12]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_absorber(3, 1).is_err());
        assert!(build_absorber(3, 3).is_err());
    }

    #[test]
    fn moving_rand_edge_breaks_partiteness() {
        let mut a = build_absorber(3, 2).unwrap();
        let e = a.f_rand.pop().unwrap();
        a.f_reg.push(e);
        let r = verify_absorber(&a);
        assert!(!r.get("reg_partite").unwrap().passed);
    }

    #[test]
    fn absorb_on_own_edges() {
        let a = build_absorber(3, 2).unwrap();
        let host = KUniformHypergraph::new(
            a.vertex_count(),
            3,
            a.edges().into_iter().map(|e| e.into_iter().map(|x| x - 1).collect()),
        )
        .unwrap();
        let emb: Vec<Vertex> = (0..a.path_len as Vertex).collect();
        let p = EllPath::new(emb.clone(), 3, 2).unwrap();
        let s = OrderedTuple::new(vec![12]).unwrap();
        let q = absorb(&host, &a, &p, &emb, &s).unwrap();
        assert_eq!(q.beg(), p.beg());
        assert_eq!(q.end(), p.end());
        assert_eq!(q.vertex_count(), 13);
        q.validate_in(&host).unwrap();

        let missing = a.q_edges()[4].iter().map(|x| x - 1).collect::<Vec<_>>();
        let pruned = KUniformHypergraph::new(
            host.n(),
            3,
            host.edges().iter().filter(|e| **e != missing).cloned(),
        )
        .unwrap();
        match absorb(&pruned, &a, &p, &emb, &s) {
            Err(Error::CannotAbsorb { edge }) => assert_eq!(edge, missing),
            other => panic!("unexpected {other:?}"),
        }
        let overlap = OrderedTuple::new(vec![3]).unwrap();
        assert!(matches!(absorb(&host, &a, &p, &emb, &overlap), Err(Error::Precondition(_))));
    }
}
