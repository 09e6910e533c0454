//! Ice quivers stored as a net skew-symmetric multiplicity matrix.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::label::Label;
use crate::linalg::{bareiss_rank, IntMatrix};

/// An ice quiver. `adj[u][v]` is the number of arrows `u -> v` minus the
/// number of arrows `v -> u`. Frozen-frozen entries are kept.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IceQuiver {
    labels: Vec<Label>,
    frozen: Vec<bool>,
    adj: IntMatrix,
}

impl IceQuiver {
    pub fn new(labels: Vec<Label>, frozen: Vec<bool>) -> Result<Self> {
        if labels.len() != frozen.len() {
            return Err(Error::DimensionMismatch("labels vs frozen flags".into()));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l) {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
        }
        let n = labels.len();
        Ok(IceQuiver { labels, frozen, adj: vec![vec![BigInt::zero(); n]; n] })
    }

    /// Vertices `0..n` labelled by their index.
    pub fn with_size(n: usize, frozen: &[usize]) -> Self {
        let labels = (0..n as i64).map(Label::Int).collect();
        let mut fr = vec![false; n];
        for &f in frozen {
            fr[f] = true;
        }
        IceQuiver::new(labels, fr).expect("integer labels are distinct")
    }

    /// Build from `(from, to, multiplicity)` triples on index-labelled vertices.
    pub fn from_arrows(n: usize, frozen: &[usize], arrows: &[(usize, usize, i64)]) -> Self {
        let mut q = IceQuiver::with_size(n, frozen);
        for &(u, v, m) in arrows {
            q.add_arrows(u, v, &BigInt::from(m));
        }
        q
    }

    /// Build from a skew-symmetric matrix. Panics if the matrix is not skew.
    pub fn from_matrix(adj: IntMatrix, frozen: &[usize]) -> Self {
        let n = adj.len();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(adj[i][j], -adj[j][i].clone(), "matrix is not skew-symmetric");
            }
        }
        let mut q = IceQuiver::with_size(n, frozen);
        q.adj = adj;
        q
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &Label {
        &self.labels[v]
    }

    pub fn is_frozen(&self, v: usize) -> bool {
        self.frozen[v]
    }

    pub fn frozen_flags(&self) -> &[bool] {
        &self.frozen
    }

    pub fn adjacency(&self) -> &IntMatrix {
        &self.adj
    }

    pub fn entry(&self, u: usize, v: usize) -> &BigInt {
        &self.adj[u][v]
    }

    pub fn index_of(&self, l: &Label) -> Option<usize> {
        self.labels.iter().position(|x| x == l)
    }

    pub fn require(&self, l: &Label) -> Result<usize> {
        self.index_of(l).ok_or_else(|| Error::UnknownVertex(l.to_string()))
    }

    pub fn mutable_vertices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| !self.frozen[v]).collect()
    }

    pub fn frozen_vertices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.frozen[v]).collect()
    }

    /// Add `m` arrows `u -> v` (negative `m` means `v -> u`).
    pub fn add_arrows(&mut self, u: usize, v: usize, m: &BigInt) {
        assert_ne!(u, v, "loops are not allowed");
        self.adj[u][v] += m;
        self.adj[v][u] -= m;
    }

    pub fn set_frozen(&mut self, v: usize, frozen: bool) {
        self.frozen[v] = frozen;
    }

    /// Mutation at `u` via the matrix rule; frozen-frozen pairs are untouched.
    pub fn mutate_in_place(&mut self, u: usize) -> Result<()> {
        if u >= self.len() {
            return Err(Error::UnknownVertex(u.to_string()));
        }
        if self.frozen[u] {
            return Err(Error::FrozenVertexMutation(self.labels[u].to_string()));
        }
        let n = self.len();
        let ins: Vec<usize> = (0..n).filter(|&v| self.adj[v][u].is_positive()).collect();
        let outs: Vec<usize> = (0..n).filter(|&w| self.adj[u][w].is_positive()).collect();
        for &v in &ins {
            for &w in &outs {
                if self.frozen[v] && self.frozen[w] {
                    continue;
                }
                let m = &self.adj[v][u] * &self.adj[u][w];
                self.adj[v][w] += &m;
                self.adj[w][v] -= &m;
            }
        }
        for v in 0..n {
            self.adj[u][v] = -self.adj[u][v].clone();
            self.adj[v][u] = -self.adj[v][u].clone();
        }
        Ok(())
    }

    pub fn mutate(&self, u: usize) -> Result<IceQuiver> {
        let mut q = self.clone();
        q.mutate_in_place(u)?;
        Ok(q)
    }

    /// Left-to-right composition: `us[0]` is applied first.
    pub fn mutate_seq(&self, us: &[usize]) -> Result<IceQuiver> {
        let mut q = self.clone();
        for &u in us {
            q.mutate_in_place(u)?;
        }
        Ok(q)
    }

    pub fn mutate_at(&self, l: &Label) -> Result<IceQuiver> {
        self.mutate(self.require(l)?)
    }

    pub fn mutate_labels(&self, ls: &[Label]) -> Result<IceQuiver> {
        let mut q = self.clone();
        for l in ls {
            let u = q.require(l)?;
            q.mutate_in_place(u)?;
        }
        Ok(q)
    }

    /// Rows at mutable vertices, columns at all vertices.
    pub fn b_matrix(&self) -> IntMatrix {
        self.mutable_vertices().into_iter().map(|u| self.adj[u].clone()).collect()
    }

    pub fn b_rank(&self) -> usize {
        bareiss_rank(&self.b_matrix())
    }

    pub fn has_full_rank(&self) -> bool {
        self.b_rank() == self.mutable_vertices().len()
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<IntMatrix> {
        for &v in rows.iter().chain(cols) {
            if v >= self.len() {
                return Err(Error::UnknownVertex(v.to_string()));
            }
        }
        Ok(rows.iter().map(|&r| cols.iter().map(|&c| self.adj[r][c].clone()).collect()).collect())
    }

    pub fn submatrix_rank(&self, rows: &[usize], cols: &[usize]) -> Result<usize> {
        Ok(bareiss_rank(&self.submatrix(rows, cols)?))
    }

    pub fn freeze(&self, s: &[usize]) -> Result<IceQuiver> {
        let mut q = self.clone();
        for &v in s {
            if v >= self.len() {
                return Err(Error::UnknownVertex(v.to_string()));
            }
            q.frozen[v] = true;
        }
        Ok(q)
    }

    pub fn delete_vertices(&self, s: &[usize]) -> Result<IceQuiver> {
        for &v in s {
            if v >= self.len() {
                return Err(Error::UnknownVertex(v.to_string()));
            }
        }
        let gone: HashSet<usize> = s.iter().copied().collect();
        let keep: Vec<usize> = (0..self.len()).filter(|v| !gone.contains(v)).collect();
        Ok(self.induced(&keep))
    }

    /// Full subquiver on `keep`, in the given order.
    pub fn induced(&self, keep: &[usize]) -> IceQuiver {
        IceQuiver {
            labels: keep.iter().map(|&v| self.labels[v].clone()).collect(),
            frozen: keep.iter().map(|&v| self.frozen[v]).collect(),
            adj: keep.iter().map(|&r| keep.iter().map(|&c| self.adj[r][c].clone()).collect()).collect(),
        }
    }

    /// No outgoing arrows.
    pub fn is_sink(&self, v: usize) -> bool {
        self.adj[v].iter().all(|x| !x.is_positive())
    }

    /// No incoming arrows.
    pub fn is_source(&self, v: usize) -> bool {
        self.adj[v].iter().all(|x| !x.is_negative())
    }

    pub fn is_sink_or_source(&self, v: usize) -> bool {
        self.is_sink(v) || self.is_source(v)
    }

    pub fn is_skew(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| self.adj[i][i].is_zero() && (0..n).all(|j| self.adj[i][j] == -self.adj[j][i].clone()))
    }

    /// Replace every label by `f(label)` and reorder vertices by label.
    pub fn relabel<F: Fn(&Label) -> Label>(&self, f: F) -> Result<IceQuiver> {
        let mut q = IceQuiver::new(self.labels.iter().map(&f).collect(), self.frozen.clone())?;
        q.adj = self.adj.clone();
        Ok(q.sorted())
    }

    /// Same quiver with vertices ordered by label.
    pub fn sorted(&self) -> IceQuiver {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.labels[a].cmp(&self.labels[b]));
        self.induced(&order)
    }

    /// Compare two quivers vertex-by-label. With `b_part_only`, entries between
    /// two frozen vertices are ignored.
    pub fn same_as(&self, other: &IceQuiver, b_part_only: bool) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let map: Option<Vec<usize>> = self.labels.iter().map(|l| other.index_of(l)).collect();
        let Some(map) = map else { return false };
        let n = self.len();
        for i in 0..n {
            if self.frozen[i] != other.frozen[map[i]] {
                return false;
            }
            for j in 0..n {
                if b_part_only && self.frozen[i] && self.frozen[j] {
                    continue;
                }
                if self.adj[i][j] != other.adj[map[i]][map[j]] {
                    return false;
                }
            }
        }
        true
    }

    /// Arrows as `(from, to, multiplicity)` with positive multiplicity, sorted.
    pub fn arrows(&self) -> Vec<(usize, usize, BigInt)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in 0..self.len() {
                if self.adj[i][j].is_positive() {
                    out.push((i, j, self.adj[i][j].clone()));
                }
            }
        }
        out
    }

    pub fn arrow_count(&self) -> BigInt {
        self.arrows().into_iter().map(|(_, _, m)| m).sum()
    }

    /// Canonical JSON value: sorted keys, vertices by id, arrows lexicographic.
    pub fn to_json(&self) -> Value {
        let vertices: Vec<Value> = (0..self.len())
            .map(|i| json!({"id": i, "label": self.labels[i].to_string(), "frozen": self.frozen[i]}))
            .collect();
        let arrows: Vec<Value> = self.arrows().into_iter().map(|(i, j, m)| json!([i, j, int_json(&m)])).collect();
        json!({"vertices": vertices, "arrows": arrows})
    }

    pub fn from_json(v: &Value) -> Result<IceQuiver> {
        let raw: RawQuiver = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        raw.build()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("json values serialize")
    }

    pub fn from_json_str(s: &str) -> Result<IceQuiver> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        IceQuiver::from_json(&v)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph quiver {\n");
        for i in 0..self.len() {
            let shape = if self.frozen[i] { "box" } else { "circle" };
            let _ = writeln!(s, "  v{i} [label=\"{}\", shape={shape}];", self.labels[i]);
        }
        for (i, j, m) in self.arrows() {
            if m == BigInt::from(1) {
                let _ = writeln!(s, "  v{i} -> v{j};");
            } else {
                let _ = writeln!(s, "  v{i} -> v{j} [label=\"{m}\"];");
            }
        }
        s.push_str("}\n");
        s
    }

    /// Canonical form under vertex permutations that preserve frozen flags.
    /// Labels are forgotten. Brute force within blocks of equal local
    /// invariants; intended for at most 10 vertices.
    pub fn canonical_key(&self) -> Result<CanonicalKey> {
        let n = self.len();
        if n > 10 {
            return Err(Error::TooManyVertices(n));
        }
        let inv: Vec<(bool, Vec<BigInt>)> = (0..n)
            .map(|v| {
                let mut row = self.adj[v].clone();
                row.sort();
                (self.frozen[v], row)
            })
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| inv[a].cmp(&inv[b]));
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for &v in &order {
            match blocks.last_mut() {
                Some(b) if inv[b[0]] == inv[v] => b.push(v),
                _ => blocks.push(vec![v]),
            }
        }
        let header: Vec<(bool, Vec<BigInt>)> = order.iter().map(|&v| inv[v].clone()).collect();
        let mut best: Option<Vec<BigInt>> = None;
        let mut perm = Vec::with_capacity(n);
        search_blocks(&blocks, 0, &mut perm, &mut |p: &[usize]| {
            let key: Vec<BigInt> = p.iter().flat_map(|&i| p.iter().map(move |&j| (i, j))).map(|(i, j)| self.adj[i][j].clone()).collect();
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        });
        Ok(CanonicalKey { header, matrix: best.unwrap_or_default() })
    }

    pub fn is_isomorphic(&self, other: &IceQuiver) -> Result<bool> {
        Ok(self.len() == other.len() && self.canonical_key()? == other.canonical_key()?)
    }
}

fn search_blocks<F: FnMut(&[usize])>(blocks: &[Vec<usize>], bi: usize, perm: &mut Vec<usize>, f: &mut F) {
    if bi == blocks.len() {
        f(perm);
        return;
    }
    let mut block = blocks[bi].clone();
    permute(&mut block, 0, &mut |p: &[usize]| {
        let base = perm.len();
        perm.extend_from_slice(p);
        search_blocks(blocks, bi + 1, perm, f);
        perm.truncate(base);
    });
}

fn permute<F: FnMut(&[usize])>(xs: &mut Vec<usize>, k: usize, f: &mut F) {
    if k == xs.len() {
        f(xs);
        return;
    }
    for i in k..xs.len() {
        xs.swap(k, i);
        permute(xs, k + 1, f);
        xs.swap(k, i);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey {
    header: Vec<(bool, Vec<BigInt>)>,
    matrix: Vec<BigInt>,
}

/// Representatives of the isomorphism classes in `qs`, in first-seen order.
pub fn iso_classes(qs: &[IceQuiver]) -> Result<Vec<IceQuiver>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for q in qs {
        if seen.insert(q.canonical_key()?) {
            out.push(q.clone());
        }
    }
    Ok(out)
}

/// Breadth-first closure under mutation at mutable vertices, one
/// representative per isomorphism class.
pub fn mutation_class(q: &IceQuiver, max_size: usize) -> Result<Vec<IceQuiver>> {
    let mut seen = HashSet::new();
    seen.insert(q.canonical_key()?);
    let mut out = vec![q.clone()];
    let mut queue = VecDeque::from([q.clone()]);
    while let Some(cur) = queue.pop_front() {
        for u in cur.mutable_vertices() {
            let next = cur.mutate(u)?;
            if seen.insert(next.canonical_key()?) {
                if out.len() == max_size {
                    return Err(Error::ClassTooLarge(max_size));
                }
                out.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(out)
}

fn int_json(m: &BigInt) -> Value {
    match m.to_i64() {
        Some(x) => json!(x),
        None => json!(m.to_string()),
    }
}

#[derive(Deserialize, Serialize)]
struct RawVertex {
    id: usize,
    label: Label,
    frozen: bool,
}

#[derive(Deserialize)]
struct RawQuiver {
    vertices: Vec<RawVertex>,
    #[serde(default)]
    arrows: Vec<(usize, usize, Value)>,
}

impl RawQuiver {
    fn build(self) -> Result<IceQuiver> {
        let mut vs = self.vertices;
        vs.sort_by_key(|v| v.id);
        if vs.iter().enumerate().any(|(i, v)| v.id != i) {
            return Err(Error::Parse("vertex ids must be 0..n".into()));
        }
        let mut q = IceQuiver::new(vs.iter().map(|v| v.label.clone()).collect(), vs.iter().map(|v| v.frozen).collect())?;
        for (i, j, m) in self.arrows {
            if i >= q.len() || j >= q.len() || i == j {
                return Err(Error::Parse(format!("bad arrow {i} -> {j}")));
            }
            let m: BigInt = match m {
                Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| Error::Parse("bad multiplicity".into()))?,
                Value::String(s) => s.parse().map_err(|_| Error::Parse("bad multiplicity".into()))?,
                _ => return Err(Error::Parse("bad multiplicity".into())),
            };
            q.add_arrows(i, j, &m);
        }
        Ok(q)
    }
}

/// Vertex index sets by label predicate, sorted by label.
pub fn select<F: Fn(&Label) -> bool>(q: &IceQuiver, pred: F) -> Vec<usize> {
    let mut v: Vec<usize> = (0..q.len()).filter(|&i| pred(q.label(i))).collect();
    v.sort_by(|&a, &b| q.label(a).cmp(q.label(b)));
    v
}

/// Net arrow multiplicities keyed by label pairs (positive entries only).
pub fn arrows_by_label(q: &IceQuiver) -> BTreeMap<(Label, Label), BigInt> {
    q.arrows().into_iter().map(|(i, j, m)| ((q.label(i).clone(), q.label(j).clone()), m)).collect()
}

/// Labels of the mutable vertices, as a set.
pub fn mutable_labels(q: &IceQuiver) -> BTreeSet<Label> {
    q.mutable_vertices().into_iter().map(|v| q.label(v).clone()).collect()
}
