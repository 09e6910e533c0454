//! Ice hive quivers on the triangular lattice `i + j + k = l`.
//!
//! Edge `t` (1, 2 or 3) is the side where coordinate `t` vanishes. Corners
//! `(l,0,0)` etc. are not vertices. Arrows go `p -> p + d` for
//! `d ∈ {(-1,1,0), (0,-1,1), (1,0,-1)}` except between two vertices of the
//! same edge.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::label::Label;
use crate::quiver::IceQuiver;

pub const DIRECTIONS: [[i64; 3]; 3] = [[-1, 1, 0], [0, -1, 1], [1, 0, -1]];

/// Lattice points with at most one zero coordinate, in lex order.
pub fn hive_points(l: u32) -> Vec<[u32; 3]> {
    let mut pts = Vec::new();
    for i in 0..=l {
        for j in 0..=l - i {
            let k = l - i - j;
            if [i, j, k].iter().filter(|&&c| c == 0).count() <= 1 {
                pts.push([i, j, k]);
            }
        }
    }
    pts
}

pub fn is_boundary(p: [u32; 3]) -> bool {
    p.contains(&0)
}

/// Arrows of `Δ_l` as coordinate pairs.
pub fn hive_arrows(l: u32) -> Vec<([u32; 3], [u32; 3])> {
    let pts = hive_points(l);
    let set: std::collections::HashSet<[u32; 3]> = pts.iter().copied().collect();
    let mut out = Vec::new();
    for &p in &pts {
        for d in DIRECTIONS {
            let q = [0, 1, 2].map(|t| p[t] as i64 + d[t]);
            if q.iter().any(|&c| c < 0) {
                continue;
            }
            let q = q.map(|c| c as u32);
            if !set.contains(&q) {
                continue;
            }
            if (0..3).any(|t| p[t] == 0 && q[t] == 0) {
                continue;
            }
            out.push((p, q));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HiveQuiver {
    pub l: u32,
    pub quiver: IceQuiver,
}

pub fn build_hive(l: u32) -> Result<HiveQuiver> {
    if l < 2 {
        return Err(Error::SizeTooSmall(l));
    }
    let pts = hive_points(l);
    let labels = pts.iter().map(|&p| Label::Hive(p)).collect();
    let frozen = pts.iter().map(|&p| is_boundary(p)).collect();
    let mut q = IceQuiver::new(labels, frozen)?;
    let idx: BTreeMap<[u32; 3], usize> = pts.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    for (p, r) in hive_arrows(l) {
        q.add_arrows(idx[&p], idx[&r], &BigInt::one());
    }
    Ok(HiveQuiver { l, quiver: q })
}

/// Which edges (1..=3) a label lies on.
pub fn edges_of(p: [u32; 3]) -> Vec<u8> {
    (0..3).filter(|&t| p[t] == 0).map(|t| t as u8 + 1).collect()
}

impl HiveQuiver {
    pub fn coords(&self, v: usize) -> [u32; 3] {
        self.quiver.label(v).as_hive().expect("hive label")
    }

    /// Canonical JSON with `l`, per-vertex `coords` and screen position `xy`.
    pub fn to_json(&self) -> Value {
        let mut v = self.quiver.to_json();
        let l = self.l as f64;
        if let Some(vs) = v.get_mut("vertices").and_then(Value::as_array_mut) {
            for (i, vert) in vs.iter_mut().enumerate() {
                let [a, b, c] = self.coords(i);
                let x = (b as f64 + c as f64 / 2.0) / l;
                let y = (c as f64 * 3f64.sqrt() / 2.0) / l;
                vert["coords"] = json!([a, b, c]);
                vert["xy"] = json!([x, y]);
            }
        }
        v["l"] = json!(self.l);
        v
    }
}

/// `Δ_l` with vertex `(i,j,k)` renamed to `{a:i, b:j, c:k}`.
pub fn relabel_cyclic(h: &HiveQuiver, t: [u32; 3]) -> Result<IceQuiver> {
    h.quiver.relabel(|l| {
        let p = l.as_hive().expect("hive label");
        Label::points((0..3).map(|s| (t[s], p[s])))
    })
}

/// Remove the frozen vertices on the given edges (`Δ_l^♭`, `Δ_l^♭♭`).
pub fn drop_edges(h: &HiveQuiver, edges: &[u8]) -> Result<IceQuiver> {
    if edges.is_empty() || edges.iter().any(|&e| !(1..=3).contains(&e)) {
        return Err(Error::InvalidChoice("edges must be a nonempty subset of {1,2,3}".into()));
    }
    let gone: Vec<usize> = (0..h.quiver.len())
        .filter(|&v| edges_of(h.coords(v)).iter().any(|e| edges.contains(e)))
        .collect();
    h.quiver.delete_vertices(&gone)
}

/// Closed-form counts: (vertices, mutable, frozen, arrows).
pub fn hive_counts(l: u32) -> (u64, u64, u64, u64) {
    let l = l as u64;
    ((l - 1) * (l + 4) / 2, (l - 1) * (l - 2) / 2, 3 * (l - 1), 3 * l * (l - 1) / 2)
}

/// Rows `b ∪ c`, columns `a ∪ b` of `Δ_l^♭` with edge `j = 0` dropped,
/// `a` the edge `k = 0`, `c` the edge `i = 0`; both in lex order.
pub fn certificate_matrix(h: &HiveQuiver) -> Vec<Vec<BigInt>> {
    let q = &h.quiver;
    let pick = |f: &dyn Fn([u32; 3]) -> bool| -> Vec<usize> { (0..q.len()).filter(|&v| f(h.coords(v))).collect() };
    let rows = pick(&|p| p[0] == 0 || !is_boundary(p));
    let cols = pick(&|p| p[2] == 0 || !is_boundary(p));
    q.submatrix(&rows, &cols).expect("indices in range")
}

/// The lex-ordered certificate is square, triangular, with unit diagonal.
pub fn certificate_holds(h: &HiveQuiver) -> bool {
    let m = certificate_matrix(h);
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return false;
    }
    let unit = (0..n).all(|i| m[i][i].abs().is_one());
    let lower = (0..n).all(|i| (i + 1..n).all(|j| m[i][j].is_zero()));
    let upper = (0..n).all(|i| (0..i).all(|j| m[i][j].is_zero()));
    unit && (lower || upper)
}

/// Hive strip of length `n + 1`: top row `0..=n` (labels `Int`), bottom row
/// `b1..bn` (frozen). Arrows `r -> r-1`, `r -> b(r+1)`, `bs -> s`.
pub fn hive_strip(n: usize, zero_frozen: bool) -> IceQuiver {
    let mut labels: Vec<Label> = (0..=n as i64).map(Label::Int).collect();
    labels.extend((1..=n).map(|s| Label::Name(format!("b{s}"))));
    let mut frozen = vec![false; n + 1];
    frozen[0] = zero_frozen;
    frozen.extend(std::iter::repeat(true).take(n));
    let mut q = IceQuiver::new(labels, frozen).expect("distinct labels");
    let bot = |s: usize| n + s;
    let one = BigInt::one();
    for r in 1..=n {
        q.add_arrows(r, r - 1, &one);
        q.add_arrows(bot(r), r, &one);
    }
    for r in 0..n {
        q.add_arrows(r, bot(r + 1), &one);
    }
    q
}

/// The strip after `(n, ..., 1)`: `0 -> 1`, `r -> br`, `bs -> s+1`, `r -> r-1` for `r >= 2`.
/// A frozen `0` keeps its arrow to `b1`.
pub fn strip_after_sequence(n: usize, zero_frozen: bool) -> IceQuiver {
    let base = hive_strip(n, zero_frozen);
    let mut q = IceQuiver::new(base.labels().to_vec(), base.frozen_flags().to_vec()).expect("distinct labels");
    let bot = |s: usize| n + s;
    let one = BigInt::one();
    q.add_arrows(0, 1, &one);
    for r in 1..=n {
        q.add_arrows(r, bot(r), &one);
    }
    for s in 1..n {
        q.add_arrows(bot(s), s + 1, &one);
    }
    for r in 2..=n {
        q.add_arrows(r, r - 1, &one);
    }
    if zero_frozen {
        q.add_arrows(0, bot(1), base.entry(0, bot(1)));
    }
    q
}

pub fn strip_sequence(n: usize) -> Vec<usize> {
    (1..=n).rev().collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StripReport {
    pub optimized: bool,
    pub matches_closed_form: bool,
    pub restored: bool,
}

impl StripReport {
    pub fn ok(&self) -> bool {
        self.optimized && self.matches_closed_form && self.restored
    }
}

pub fn strip_verify(n: usize, zero_frozen: bool) -> Result<StripReport> {
    let q = hive_strip(n, zero_frozen);
    let after = q.mutate_seq(&strip_sequence(n))?;
    let optimized = after.is_sink_or_source(0);
    let matches_closed_form = after == strip_after_sequence(n, zero_frozen);
    let deleted = after.delete_vertices(&[0])?;
    let back_seq: Vec<usize> = (0..n).collect();
    let restored = deleted.mutate_seq(&back_seq)? == q.delete_vertices(&[0])?;
    Ok(StripReport { optimized, matches_closed_form, restored })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_hives() {
        let h = build_hive(2).unwrap();
        assert_eq!(h.quiver.len(), 3);
        assert!(h.quiver.mutable_vertices().is_empty());
        let h5 = build_hive(5).unwrap();
        assert_eq!((h5.quiver.len(), h5.quiver.mutable_vertices().len()), (18, 6));
        assert_eq!(build_hive(1), Err(Error::SizeTooSmall(1)));
    }

    #[test]
    fn cyclic_relabel_is_rotation_invariant() {
        let h = build_hive(4).unwrap();
        let a = relabel_cyclic(&h, [1, 2, 3]).unwrap();
        let b = relabel_cyclic(&h, [2, 3, 1]).unwrap();
        assert_eq!(a, b);
        let c = relabel_cyclic(&h, [1, 3, 2]).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn dropped_edges() {
        assert_eq!(drop_edges(&build_hive(5).unwrap(), &[1]).unwrap().len(), 14);
        assert_eq!(drop_edges(&build_hive(2).unwrap(), &[1, 2]).unwrap().len(), 1);
        let d = drop_edges(&build_hive(3).unwrap(), &[1, 2, 3]).unwrap();
        assert_eq!(d.labels(), &[Label::hive(1, 1, 1)]);
    }

    #[test]
    fn strip_small() {
        assert!(strip_verify(1, false).unwrap().ok());
        assert!(strip_verify(3, true).unwrap().ok());
    }

    #[test]
    fn example_optimization_in_delta5() {
        let h = build_hive(5).unwrap();
        let q = h.quiver.mutate_labels(&[Label::hive(2, 1, 2), Label::hive(2, 2, 1)]).unwrap();
        for p in [Label::hive(2, 0, 3), Label::hive(2, 3, 0)] {
            assert!(q.is_sink_or_source(q.index_of(&p).unwrap()));
        }
    }
}
