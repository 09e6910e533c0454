//! Triangulated disks, the glued hive quivers `◇_l(T)`, and the mutation
//! sequences realizing flips and twists.
//!
//! A triangle is stored as a cyclic triple in its own orientation. It is
//! counterclockwise when the triple is cyclically increasing in the boundary
//! order `1..m`. Glued vertices are labelled by maps `{marked point: coord}`
//! with zero coordinates dropped, so a vertex on a diagonal has the same label
//! in both triangles.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::One;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hive::{hive_arrows, hive_points, is_boundary};
use crate::label::Label;
use crate::quiver::IceQuiver;

pub type Triangle = [u32; 3];

/// Rotate so the smallest point comes first.
fn rotate_min(t: Triangle) -> Triangle {
    let r = (0..3).min_by_key(|&s| t[s]).expect("three corners");
    [t[r], t[(r + 1) % 3], t[(r + 2) % 3]]
}

/// `+1` for a cyclically increasing triple, `-1` otherwise.
pub fn orientation(t: Triangle) -> i8 {
    let r = rotate_min(t);
    if r[1] < r[2] {
        1
    } else {
        -1
    }
}

/// Rotate `t` so that `first` is at position 0.
fn rotate_to(t: Triangle, first: u32) -> Option<Triangle> {
    let r = t.iter().position(|&p| p == first)?;
    Some([t[r], t[(r + 1) % 3], t[(r + 2) % 3]])
}

fn traverses(t: Triangle, p: u32, q: u32) -> bool {
    (0..3).any(|s| t[s] == p && t[(s + 1) % 3] == q)
}

fn edge(p: u32, q: u32) -> (u32, u32) {
    (p.min(q), p.max(q))
}

fn crossing(a: (u32, u32), b: (u32, u32)) -> bool {
    let inside = |x: u32| a.0 < x && x < a.1;
    let shared = a.0 == b.0 || a.0 == b.1 || a.1 == b.0 || a.1 == b.1;
    !shared && inside(b.0) != inside(b.1)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiskTriangulation {
    m: u32,
    triangles: Vec<Triangle>,
}

impl DiskTriangulation {
    /// Validate a triangulation of the convex `m`-gon with oriented triangles.
    pub fn new(m: u32, triangles: Vec<Triangle>) -> Result<Self> {
        let bad = |s: &str| Err(Error::InvalidTriangulation(s.into()));
        if m < 3 {
            return bad("need at least 3 marked points");
        }
        if triangles.len() != (m - 2) as usize {
            return bad("a disk with m marked points has m-2 triangles");
        }
        let mut uses: BTreeMap<(u32, u32), usize> = BTreeMap::new();
        for t in &triangles {
            if t.iter().any(|&p| p == 0 || p > m) || t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return bad("triangle corners must be distinct points in 1..=m");
            }
            for s in 0..3 {
                *uses.entry(edge(t[s], t[(s + 1) % 3])).or_default() += 1;
            }
        }
        let on_boundary = |e: (u32, u32)| e.1 == e.0 + 1 || (e.0 == 1 && e.1 == m);
        for (&e, &n) in &uses {
            let want = if on_boundary(e) { 1 } else { 2 };
            if n != want {
                return bad("every boundary edge needs one triangle and every diagonal two");
            }
        }
        let diags: Vec<_> = uses.keys().copied().filter(|&e| !on_boundary(e)).collect();
        for (i, &a) in diags.iter().enumerate() {
            if diags[i + 1..].iter().any(|&b| crossing(a, b)) {
                return bad("diagonals cross");
            }
        }
        Ok(DiskTriangulation { m, triangles })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn orientations(&self) -> Vec<i8> {
        self.triangles.iter().map(|&t| orientation(t)).collect()
    }

    /// Diagonals with the indices of their two triangles.
    pub fn diagonals(&self) -> Vec<((u32, u32), usize, usize)> {
        let mut inc: BTreeMap<(u32, u32), Vec<usize>> = BTreeMap::new();
        for (x, t) in self.triangles.iter().enumerate() {
            for s in 0..3 {
                inc.entry(edge(t[s], t[(s + 1) % 3])).or_default().push(x);
            }
        }
        inc.into_iter().filter(|(_, xs)| xs.len() == 2).map(|(e, xs)| (e, xs[0], xs[1])).collect()
    }

    /// Both triangles along `d` traverse it in opposite directions.
    pub fn is_consistent_at(&self, d: (u32, u32)) -> Result<bool> {
        let (_, x, y) = self.find_diagonal(d)?;
        let (t, u) = (self.triangles[x], self.triangles[y]);
        Ok(traverses(t, d.0, d.1) != traverses(u, d.0, d.1))
    }

    pub fn is_consistent(&self) -> bool {
        self.diagonals().iter().all(|&(d, _, _)| self.is_consistent_at(d).unwrap_or(false))
    }

    fn find_diagonal(&self, d: (u32, u32)) -> Result<((u32, u32), usize, usize)> {
        let d = edge(d.0, d.1);
        self.diagonals()
            .into_iter()
            .find(|&(e, _, _)| e == d)
            .ok_or_else(|| Error::NotADiagonal(format!("{}-{}", d.0, d.1)))
    }

    /// `{"m", "triangles" (each sorted), "orientations"}`.
    pub fn to_json(&self) -> Value {
        let tris: Vec<Vec<u32>> = self
            .triangles
            .iter()
            .map(|t| {
                let mut s = t.to_vec();
                s.sort_unstable();
                s
            })
            .collect();
        json!({"m": self.m, "triangles": tris, "orientations": self.orientations()})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let perr = |s: &str| Error::Parse(s.into());
        let m = v.get("m").and_then(Value::as_u64).ok_or_else(|| perr("missing m"))? as u32;
        let tris = v.get("triangles").and_then(Value::as_array).ok_or_else(|| perr("missing triangles"))?;
        let ors: Vec<i64> = match v.get("orientations") {
            None => vec![1; tris.len()],
            Some(o) => o
                .as_array()
                .ok_or_else(|| perr("orientations must be an array"))?
                .iter()
                .map(|x| x.as_i64().ok_or_else(|| perr("orientation must be +1 or -1")))
                .collect::<Result<_>>()?,
        };
        if ors.len() != tris.len() {
            return Err(perr("one orientation per triangle"));
        }
        let mut out = Vec::new();
        for (t, &o) in tris.iter().zip(&ors) {
            let pts: Vec<u32> = t
                .as_array()
                .ok_or_else(|| perr("triangle must be an array"))?
                .iter()
                .map(|p| p.as_u64().map(|p| p as u32).ok_or_else(|| perr("bad point")))
                .collect::<Result<_>>()?;
            let mut t: Triangle = pts.try_into().map_err(|_| perr("triangle needs 3 points"))?;
            t.sort_unstable();
            match o {
                1 => {}
                -1 => t.reverse(),
                _ => return Err(perr("orientation must be +1 or -1")),
            }
            out.push(t);
        }
        DiskTriangulation::new(m, out)
    }

    /// Canonical form under the dihedral relabelings of the boundary.
    pub fn dihedral_key(&self) -> Vec<Triangle> {
        let m = self.m;
        let mut best: Option<Vec<Triangle>> = None;
        for r in 0..m {
            for refl in [false, true] {
                let g = |p: u32| {
                    let p = if refl { m + 1 - p } else { p };
                    (p - 1 + r) % m + 1
                };
                let mut ts: Vec<Triangle> = self.triangles.iter().map(|t| rotate_min(t.map(g))).collect();
                ts.sort_unstable();
                if best.as_ref().map_or(true, |b| ts < *b) {
                    best = Some(ts);
                }
            }
        }
        best.expect("m >= 3")
    }

    /// Equal as decorated disks up to rotation and reflection of the boundary.
    pub fn equivalent(&self, other: &DiskTriangulation) -> bool {
        self.m == other.m && self.dihedral_key() == other.dihedral_key()
    }
}

/// The zigzag triangulation with alternating orientations: `(1,2,m)` first,
/// then alternately cutting from the top and the bottom.
pub fn alternating_triangulation(m: u32) -> Result<DiskTriangulation> {
    if m < 3 {
        return Err(Error::InvalidTriangulation("need at least 3 marked points".into()));
    }
    let mut tris = vec![[1, 2, m]];
    let (mut lo, mut hi) = (2, m);
    let mut step = 0;
    while tris.len() < (m - 2) as usize {
        if step % 2 == 0 {
            tris.push([lo, hi - 1, hi]);
            hi -= 1;
        } else {
            tris.push([lo, lo + 1, hi]);
            lo += 1;
        }
        step += 1;
    }
    for (i, t) in tris.iter_mut().enumerate() {
        t.sort_unstable();
        if i % 2 == 1 {
            t.reverse();
        }
    }
    DiskTriangulation::new(m, tris)
}

/// All triangulations of the `m`-gon, every triangle counterclockwise.
pub fn all_triangulations(m: u32) -> Vec<DiskTriangulation> {
    fn go(pts: &[u32]) -> Vec<Vec<Triangle>> {
        if pts.len() < 3 {
            return vec![vec![]];
        }
        let (first, last) = (pts[0], pts[pts.len() - 1]);
        let mut out = Vec::new();
        for k in 1..pts.len() - 1 {
            for left in go(&pts[..=k]) {
                for right in go(&pts[k..]) {
                    let mut ts = vec![[first, pts[k], last]];
                    ts.extend(left.iter().copied());
                    ts.extend(right.iter().copied());
                    out.push(ts);
                }
            }
        }
        out
    }
    let pts: Vec<u32> = (1..=m).collect();
    let mut out: Vec<DiskTriangulation> = go(&pts)
        .into_iter()
        .map(|mut ts| {
            ts.sort_unstable();
            DiskTriangulation::new(m, ts).expect("fan recursion yields triangulations")
        })
        .collect();
    out.sort_by(|a, b| a.triangles.cmp(&b.triangles));
    out
}

/// A glued quiver with, for every vertex, the triangles owning it and its
/// hive coordinates relative to each owner's stored triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluedQuiver {
    pub l: u32,
    pub triangulation: DiskTriangulation,
    pub quiver: IceQuiver,
    pub provenance: Vec<Vec<(usize, [u32; 3])>>,
}

/// The label of hive point `p` in a triangle with stored triple `t`.
pub fn point_label(t: Triangle, p: [u32; 3]) -> Label {
    Label::points((0..3).map(|s| (t[s], p[s])))
}

/// `◇_l(T)`: one `Δ_l` per triangle, seam vertices identified and unfrozen.
/// Along an inconsistent seam traversed `p -> q` by both triangles, an arrow
/// `{p:l-i, q:i} -> {p:l-i-1, q:i+1}` is added for `i = 1..l-2`.
pub fn glue(t: &DiskTriangulation, l: u32) -> Result<GluedQuiver> {
    if l < 2 {
        return Err(Error::SizeTooSmall(l));
    }
    let pts = hive_points(l);
    let mut owners: BTreeMap<Label, Vec<(usize, [u32; 3])>> = BTreeMap::new();
    for (x, &tri) in t.triangles.iter().enumerate() {
        for &p in &pts {
            owners.entry(point_label(tri, p)).or_default().push((x, p));
        }
    }
    let labels: Vec<Label> = owners.keys().cloned().collect();
    let frozen: Vec<bool> = owners.values().map(|o| o.len() == 1 && is_boundary(o[0].1)).collect();
    let mut q = IceQuiver::new(labels.clone(), frozen)?;
    let idx: HashMap<&Label, usize> = labels.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let one = BigInt::one();
    let arrows = hive_arrows(l);
    for &tri in &t.triangles {
        for &(p, r) in &arrows {
            q.add_arrows(idx[&point_label(tri, p)], idx[&point_label(tri, r)], &one);
        }
    }
    for ((a, b), x, y) in t.diagonals() {
        let (s, u) = (t.triangles[x], t.triangles[y]);
        let (p, r) = if traverses(s, a, b) { (a, b) } else { (b, a) };
        if traverses(u, p, r) {
            for i in 1..l.saturating_sub(1) {
                let from = Label::points([(p, l - i), (r, i)]);
                let to = Label::points([(p, l - i - 1), (r, i + 1)]);
                q.add_arrows(idx[&from], idx[&to], &one);
            }
        }
    }
    Ok(GluedQuiver { l, triangulation: t.clone(), quiver: q, provenance: owners.into_values().collect() })
}

impl GluedQuiver {
    pub fn to_json(&self) -> Value {
        let mut v = self.quiver.to_json();
        if let Some(vs) = v.get_mut("vertices").and_then(Value::as_array_mut) {
            for (vert, prov) in vs.iter_mut().zip(&self.provenance) {
                vert["provenance"] = json!(prov.iter().map(|(x, p)| json!([x, p])).collect::<Vec<_>>());
            }
        }
        v["l"] = json!(self.l);
        v["triangulation"] = self.triangulation.to_json();
        v
    }
}

/// Closed-form vertex count of `◇_l(T)` for an `m`-gon.
pub fn glued_vertex_count(m: u32, l: u32) -> u64 {
    let (m, l) = (m as u64, l as u64);
    ((l - 1) * (l + 1) * (m - 2) + (l - 1) * m) / 2
}

/// The quadrilateral around diagonal `d` as `(a, b, c, d)` with the first
/// triangle `[a,b,c]` and the second `[b,d,c]`, plus their indices.
fn quad(t: &DiskTriangulation, d: (u32, u32)) -> Result<([u32; 4], usize, usize)> {
    let ((p, r), x, y) = t.find_diagonal(d)?;
    let (s, u) = (t.triangles[x], t.triangles[y]);
    let (b, c) = if traverses(s, p, r) { (p, r) } else { (r, p) };
    if traverses(u, b, c) {
        return Err(Error::FlipUndefined);
    }
    let a = rotate_to(s, b).expect("b is a corner")[2];
    let dd = rotate_to(u, b).expect("b is a corner")[1];
    Ok(([a, b, c, dd], x, y))
}

/// Re-diagonalize the quadrilateral around `d`: `[a,b,c], [b,d,c]` become
/// `[a,b,d], [a,d,c]`.
pub fn flip(t: &DiskTriangulation, d: (u32, u32)) -> Result<DiskTriangulation> {
    let ([a, b, c, dd], x, y) = quad(t, d)?;
    let mut tris = t.triangles.clone();
    tris[x] = [a, b, dd];
    tris[y] = [a, dd, c];
    DiskTriangulation::new(t.m, tris)
}

fn coord(lab: &Label, p: u32) -> u32 {
    lab.as_points().and_then(|m| m.get(&p).copied()).unwrap_or(0)
}

fn support_within(lab: &Label, pts: &[u32]) -> bool {
    lab.as_points().is_some_and(|m| m.keys().all(|k| pts.contains(k)))
}

/// The layers `μ_1, ..., μ_{l-1}` of the flip sequence, each in label order.
/// Layer `k` holds the mutable vertices of the quadrilateral with
/// `h = a + d <= k - 1`, `k - 1 - h` even and `|c - b| <= l - 1 - k`.
pub fn flip_layers(g: &GluedQuiver, d: (u32, u32)) -> Result<Vec<Vec<Label>>> {
    let ([a, b, c, dd], _, _) = quad(&g.triangulation, d)?;
    let l = g.l as i64;
    let q = &g.quiver;
    let mut layers = Vec::new();
    for k in 1..l {
        let mut layer: Vec<Label> = q
            .mutable_vertices()
            .into_iter()
            .map(|v| q.label(v).clone())
            .filter(|lab| support_within(lab, &[a, b, c]) || support_within(lab, &[b, c, dd]))
            .filter(|lab| {
                let h = (coord(lab, a) + coord(lab, dd)) as i64;
                let x = coord(lab, c) as i64 - coord(lab, b) as i64;
                h <= k - 1 && (k - 1 - h) % 2 == 0 && x.abs() <= l - 1 - k
            })
            .collect();
        layer.sort();
        layers.push(layer);
    }
    Ok(layers)
}

/// `μ^d` in application order: the diagonal layer first.
pub fn flip_sequence(g: &GluedQuiver, d: (u32, u32)) -> Result<Vec<Label>> {
    Ok(flip_layers(g, d)?.concat())
}

/// Label map from `◇_l(T)` to `◇_l(flip(T, d))`.
pub fn flip_relabel(t: &DiskTriangulation, d: (u32, u32)) -> Result<impl Fn(&Label) -> Label> {
    let ([a, b, c, dd], _, _) = quad(t, d)?;
    Ok(move |lab: &Label| {
        let get = |p| coord(lab, p);
        if support_within(lab, &[a, b, c]) {
            let (i, j, k) = (get(a), get(b), get(c));
            if j >= k {
                Label::points([(a, i + k), (b, j - k), (dd, k)])
            } else {
                Label::points([(a, i + j), (dd, j), (c, k - j)])
            }
        } else if support_within(lab, &[b, dd, c]) {
            let (i, j, k) = (get(b), get(dd), get(c));
            if i >= k {
                Label::points([(a, k), (b, i - k), (dd, j + k)])
            } else {
                Label::points([(a, i), (dd, j + i), (c, k - i)])
            }
        } else {
            lab.clone()
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipReport {
    pub layers: Vec<Vec<Label>>,
    pub sequence: Vec<Label>,
    pub matches: bool,
    /// Number of intra-layer orders tried, and whether they all matched.
    pub orders_tried: usize,
    pub all_orders_match: bool,
    pub reversible: bool,
}

fn permutations(items: &[Label]) -> Vec<Vec<Label>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head.clone());
            out.push(p);
        }
    }
    out
}

/// Apply `μ^d` to `◇_l(T)`, relabel, and compare (B-part) with `◇_l(T')`.
/// With `all_orders`, every order inside each layer is tried too, up to
/// `max_orders` sequences.
pub fn flip_verify(t: &DiskTriangulation, d: (u32, u32), l: u32, all_orders: bool, max_orders: usize) -> Result<FlipReport> {
    let g = glue(t, l)?;
    let t2 = flip(t, d)?;
    let want = glue(&t2, l)?.quiver;
    let pi = flip_relabel(t, d)?;
    let layers = flip_layers(&g, d)?;
    let sequence = layers.concat();
    let run = |seq: &[Label]| -> Result<IceQuiver> { g.quiver.mutate_labels(seq)?.relabel(&pi) };
    let got = run(&sequence)?;
    let matches = got.same_as(&want, true);

    let mut orders_tried = 1;
    let mut all_orders_match = matches;
    if all_orders {
        let per_layer: Vec<Vec<Vec<Label>>> = layers.iter().map(|ly| permutations(ly)).collect();
        let total: usize = per_layer.iter().map(Vec::len).product();
        if total > max_orders {
            return Err(Error::InvalidChoice(format!("{total} layer orders exceed the limit {max_orders}")));
        }
        orders_tried = 0;
        let mut choice = vec![0usize; per_layer.len()];
        loop {
            let seq: Vec<Label> = choice.iter().zip(&per_layer).flat_map(|(&c, ps)| ps[c].iter().cloned()).collect();
            orders_tried += 1;
            all_orders_match &= run(&seq)? == got;
            // odometer over the per-layer choices
            let mut pos = 0;
            loop {
                if pos == choice.len() {
                    break;
                }
                choice[pos] += 1;
                if choice[pos] < per_layer[pos].len() {
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
            if pos == choice.len() {
                break;
            }
        }
    }

    let back: Vec<Label> = sequence.iter().rev().map(|lab| pi(lab)).collect();
    let reversible = want.mutate_labels(&back)?.same_as(&g.quiver.relabel(&pi)?, true);
    Ok(FlipReport { layers, sequence, matches, orders_tried, all_orders_match, reversible })
}

/// The listing `μ_2 μ_3 ⋯ μ_{l-1}` on a single `Δ_l`: `μ_k` holds the interior
/// points with `i >= l - k`, each layer in ascending lex order.
pub fn twist_composition(l: u32) -> Vec<Vec<[u32; 3]>> {
    (2..l)
        .map(|k| hive_points(l).into_iter().filter(|&p| !is_boundary(p) && p[0] >= l - k).collect())
        .collect()
}

/// The twist sequence in application order: layer `l-1` first, each layer
/// read right to left.
pub fn twist_sequence(l: u32) -> Vec<[u32; 3]> {
    twist_composition(l).into_iter().rev().flat_map(|ly| ly.into_iter().rev()).collect()
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
    }
}

/// Result of twisting triangle `t` at edge `e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Twist {
    pub triangulation: DiskTriangulation,
    /// The twisted triangle as `(a, b, c)` in old names, `e = bc`.
    pub corners: [u32; 3],
    pub triangle: usize,
    /// New name of corner `p` of each old triangle.
    corner_names: Vec<BTreeMap<u32, u32>>,
}

/// Cut `t = [a,b,c]` along the edges other than `e = bc`, reverse it to
/// `(a', c', b')`, and re-glue: the neighbour across `ab` meets `c'a'`, the
/// neighbour across `ac` meets `a'b'`. Boundary edges stay free. The new
/// boundary cycle is renamed `1..m`.
pub fn twist(tr: &DiskTriangulation, ti: usize, e: (u32, u32)) -> Result<Twist> {
    let n = tr.triangles.len();
    let t = *tr.triangles.get(ti).ok_or_else(|| Error::InvalidChoice(format!("no triangle {ti}")))?;
    let Some(a) = t.iter().copied().find(|&p| p != e.0 && p != e.1).filter(|_| t.contains(&e.0) && t.contains(&e.1) && e.0 != e.1)
    else {
        return Err(Error::InvalidChoice(format!("{}-{} is not an edge of triangle {ti}", e.0, e.1)));
    };
    let [a, b, c] = rotate_to(t, a).expect("a is a corner");

    let slot = |x: usize, p: u32| x * 3 + tr.triangles[x].iter().position(|&q| q == p).expect("corner");
    let mut uf = UnionFind((0..3 * n).collect());
    for ((p, r), x, y) in tr.diagonals() {
        if x != ti && y != ti {
            uf.union(slot(x, p), slot(y, p));
            uf.union(slot(x, r), slot(y, r));
            continue;
        }
        let other = if x == ti { y } else { x };
        let side = edge(p, r);
        if side == edge(b, c) {
            uf.union(slot(ti, b), slot(other, b));
            uf.union(slot(ti, c), slot(other, c));
        } else if side == edge(a, b) {
            uf.union(slot(other, a), slot(ti, c));
            uf.union(slot(other, b), slot(ti, a));
        } else {
            uf.union(slot(other, a), slot(ti, b));
            uf.union(slot(other, c), slot(ti, a));
        }
    }

    let mut tris: Vec<[usize; 3]> = (0..n).map(|x| [0, 1, 2].map(|s| uf.find(3 * x + s))).collect();
    tris[ti] = [uf.find(slot(ti, a)), uf.find(slot(ti, c)), uf.find(slot(ti, b))];
    let topo = || Error::InvalidTriangulation("the twist does not give a triangulated disk".into());
    if tris.iter().any(|t| t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
        return Err(topo());
    }

    // Walk the new boundary cycle, starting at the class of old corner 1.
    let mut uses: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for t in &tris {
        for s in 0..3 {
            let (p, q) = (t[s], t[(s + 1) % 3]);
            *uses.entry((p.min(q), p.max(q))).or_default() += 1;
        }
    }
    let mut nbrs: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (&(p, q), &k) in &uses {
        if k == 1 {
            nbrs.entry(p).or_default().push(q);
            nbrs.entry(q).or_default().push(p);
        }
    }
    if nbrs.len() != tr.m as usize || nbrs.values().any(|v| v.len() != 2) {
        return Err(topo());
    }
    let class_of = |uf: &mut UnionFind, p: u32| (0..n).find(|&x| tr.triangles[x].contains(&p)).map(|x| uf.find(slot(x, p)));
    let start = class_of(&mut uf, 1).expect("point 1 is used");
    let towards = class_of(&mut uf, 2).filter(|c| nbrs[&start].contains(c));
    let mut names: HashMap<usize, u32> = HashMap::from([(start, 1)]);
    let (mut prev, mut cur) = (start, towards.unwrap_or_else(|| nbrs[&start][0]));
    for name in 2..=tr.m {
        if names.insert(cur, name).is_some() {
            return Err(topo());
        }
        let nb = &nbrs[&cur];
        let next = if nb[0] == prev { nb[1] } else { nb[0] };
        prev = cur;
        cur = next;
    }
    if cur != start {
        return Err(topo());
    }
    let new_tris: Vec<Triangle> = tris.iter().map(|t| t.map(|c| names[&c])).collect();
    let triangulation = DiskTriangulation::new(tr.m, new_tris).map_err(|_| topo())?;
    let corner_names = (0..n)
        .map(|x| tr.triangles[x].iter().map(|&p| (p, names[&uf.find(slot(x, p))])).collect())
        .collect();
    Ok(Twist { triangulation, corners: [a, b, c], triangle: ti, corner_names })
}

impl Twist {
    /// Twisted-triangle labels: interior and `e`-edge points keep their
    /// coordinates, `(a:i, b:j) -> (a:j, c:i)` and `(a:i, c:k) -> (a:k, b:i)`.
    /// Other labels are renamed through the new corner names.
    pub fn relabel(&self, tr: &DiskTriangulation, lab: &Label) -> Label {
        let [a, b, c] = self.corners;
        let names = &self.corner_names[self.triangle];
        let pts = lab.as_points().expect("glued labels are point maps");
        if support_within(lab, &[a, b, c]) {
            let (i, j, k) = (coord(lab, a), coord(lab, b), coord(lab, c));
            let moved = if k == 0 {
                [(a, j), (c, i)]
            } else if j == 0 && i > 0 {
                [(a, k), (b, i)]
            } else {
                return Label::points(pts.iter().map(|(&p, &x)| (names[&p], x)));
            };
            return Label::points(moved.map(|(p, x)| (names[&p], x)));
        }
        let x = (0..tr.triangles.len())
            .find(|&x| support_within(lab, &tr.triangles[x]))
            .expect("every glued label lies in a triangle");
        Label::points(pts.iter().map(|(&p, &v)| (self.corner_names[x][&p], v)))
    }

    /// The new names of `e`'s endpoints, for twisting back.
    pub fn edge_after(&self) -> (u32, u32) {
        let names = &self.corner_names[self.triangle];
        (names[&self.corners[1]], names[&self.corners[2]])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistReport {
    pub sequence: Vec<Label>,
    pub twisted: DiskTriangulation,
    pub matches: bool,
}

/// Apply the twist sequence inside triangle `ti` (coordinates relative to
/// `(a, b, c)` with `e = bc`), relabel, and compare (B-part) with the glued
/// quiver of the twisted triangulation.
pub fn twist_verify(tr: &DiskTriangulation, ti: usize, e: (u32, u32), l: u32) -> Result<TwistReport> {
    let tw = twist(tr, ti, e)?;
    let g = glue(tr, l)?;
    let [a, b, c] = tw.corners;
    let sequence: Vec<Label> = twist_sequence(l).into_iter().map(|p| point_label([a, b, c], p)).collect();
    let got = g.quiver.mutate_labels(&sequence)?.relabel(|lab| tw.relabel(tr, lab))?;
    let want = glue(&tw.triangulation, l)?.quiver;
    Ok(TwistReport { sequence, matches: got.same_as(&want, true), twisted: tw.triangulation })
}

/// Twist every triangle that is clockwise in `tr`, each at its first edge.
/// Triangles are tracked by index since twisting renames the boundary.
pub fn twist_all_clockwise(tr: &DiskTriangulation) -> Result<DiskTriangulation> {
    let mut cur = tr.clone();
    for (x, o) in tr.orientations().into_iter().enumerate() {
        if o < 0 {
            let t = cur.triangles[x];
            cur = twist(&cur, x, (t[0], t[1]))?.triangulation;
        }
    }
    Ok(cur)
}

/// Orbit of `t` under all defined flips (consistent diagonals only).
pub fn flip_orbit(t: &DiskTriangulation) -> Vec<DiskTriangulation> {
    let mut seen: BTreeSet<Vec<Triangle>> = BTreeSet::new();
    let mut out = Vec::new();
    let mut queue = std::collections::VecDeque::from([t.clone()]);
    let key = |t: &DiskTriangulation| {
        let mut ts: Vec<Triangle> = t.triangles.iter().map(|&x| rotate_min(x)).collect();
        ts.sort_unstable();
        ts
    };
    seen.insert(key(t));
    while let Some(cur) = queue.pop_front() {
        for (d, _, _) in cur.diagonals() {
            if let Ok(next) = flip(&cur, d) {
                if seen.insert(key(&next)) {
                    queue.push_back(next);
                }
            }
        }
        out.push(cur);
    }
    out
}
