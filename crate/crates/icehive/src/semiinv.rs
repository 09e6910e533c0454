//! Schofield semi-invariants of `m`-tuple flag representations, evaluated
//! exactly over the rationals.
//!
//! The flag quiver has vertices `(a, i)` for `a = 1..=m`, `i = 1..l-1`, and a
//! center of dimension `l`. The semi-invariant of a triple `(a,b,c)` at
//! coordinates `(i,j,k)`, `i + j + k = l`, is the determinant of the `l × l`
//! matrix `[P_a(i) | P_b(j) | P_c(k)]` with zero blocks omitted, where `P_a(i)`
//! is the path map from `(a,i)` to the center.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::label::Label;
use crate::laurent::rat_string;
use crate::linalg::{rat_det, rat_identity, rat_inverse, rat_mul, IntMatrix, RatMatrix};
use crate::quiver::IceQuiver;
use crate::surface::{flip, flip_relabel, flip_sequence, glue, glued_vertex_count, DiskTriangulation, Triangle};
use crate::weight::{check_config, mutate_config};

fn zeros(r: usize, c: usize) -> RatMatrix {
    vec![vec![BigRational::zero(); c]; r]
}

/// `[I_i; 0]`, the arrow matrix of the flag `F^-`.
pub fn lower_flag_arrow(i: usize) -> RatMatrix {
    let mut a = zeros(i + 1, i);
    for r in 0..i {
        a[r][r] = BigRational::one();
    }
    a
}

/// `[0; I_i]`, the arrow matrix of the flag `F^+`.
pub fn upper_flag_arrow(i: usize) -> RatMatrix {
    let mut a = zeros(i + 1, i);
    for r in 0..i {
        a[r + 1][r] = BigRational::one();
    }
    a
}

pub fn random_rational<R: Rng>(rng: &mut R) -> BigRational {
    BigRational::new(BigInt::from(rng.gen_range(-9..=9)), BigInt::from(rng.gen_range(1..=5)))
}

fn random_matrix<R: Rng>(rng: &mut R, r: usize, c: usize) -> RatMatrix {
    (0..r).map(|_| (0..c).map(|_| random_rational(rng)).collect()).collect()
}

/// Determinant of the horizontal concatenation of `blocks`.
pub fn schofield(blocks: &[RatMatrix]) -> Result<BigRational> {
    let blocks: Vec<&RatMatrix> = blocks.iter().filter(|b| b.first().is_some_and(|r| !r.is_empty())).collect();
    let n = blocks.first().map_or(0, |b| b.len());
    if blocks.iter().any(|b| b.len() != n) {
        return Err(Error::DimensionMismatch("blocks must have the same height".into()));
    }
    let m: RatMatrix = (0..n).map(|r| blocks.iter().flat_map(|b| b[r].iter().cloned()).collect()).collect();
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch("blocks must form a square matrix".into()));
    }
    Ok(rat_det(&m))
}

/// A `β_l`-dimensional representation: `arrows[a-1][i-1]` is the `(i+1) × i`
/// matrix on the arrow `(a,i) -> (a,i+1)`, the last one landing at the center.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagRep {
    pub l: u32,
    pub m: u32,
    pub arrows: Vec<Vec<RatMatrix>>,
}

impl FlagRep {
    pub fn random<R: Rng>(l: u32, m: u32, rng: &mut R) -> FlagRep {
        let arrows = (0..m).map(|_| (1..l as usize).map(|i| random_matrix(rng, i + 1, i)).collect()).collect();
        FlagRep { l, m, arrows }
    }

    /// Set flag `a` to `F^+` (`upper`) or `F^-`.
    pub fn set_standard(&mut self, a: u32, upper: bool) {
        self.arrows[a as usize - 1] =
            (1..self.l as usize).map(|i| if upper { upper_flag_arrow(i) } else { lower_flag_arrow(i) }).collect();
    }

    /// `M(a,l-1) ⋯ M(a,i)`, an `l × i` matrix; `i = l` gives the identity.
    pub fn path_matrix(&self, a: u32, i: u32) -> RatMatrix {
        let (l, i) = (self.l as usize, i as usize);
        if i == l {
            return rat_identity(l);
        }
        let arrows = &self.arrows[a as usize - 1];
        let mut acc = rat_identity(i);
        for t in i..l {
            acc = rat_mul(&arrows[t - 1], &acc);
        }
        acc
    }

    /// `s` for the triple `t` (block order as given) at `coords`.
    pub fn value(&self, t: [u32; 3], coords: [u32; 3]) -> Result<BigRational> {
        if coords.iter().sum::<u32>() != self.l {
            return Err(Error::DimensionMismatch("coordinates must sum to l".into()));
        }
        let blocks: Vec<RatMatrix> = (0..3).filter(|&s| coords[s] > 0).map(|s| self.path_matrix(t[s], coords[s])).collect();
        schofield(&blocks)
    }

    /// `(g·N)(a,i) = g_(a,i+1) N(a,i) g_(a,i)^{-1}`.
    pub fn act(&self, g: &GroupElement) -> Result<FlagRep> {
        let l = self.l as usize;
        let mut arrows = self.arrows.clone();
        for (a, flag) in arrows.iter_mut().enumerate() {
            for (idx, arrow) in flag.iter_mut().enumerate() {
                let i = idx + 1;
                let tail = &g.flags[a][i - 1];
                let head = if i + 1 == l { &g.center } else { &g.flags[a][i] };
                let inv = rat_inverse(tail).ok_or_else(|| Error::SingularBlock(format!("({},{})", a + 1, i)))?;
                *arrow = rat_mul(&rat_mul(head, arrow), &inv);
            }
        }
        Ok(FlagRep { l: self.l, m: self.m, arrows })
    }

    pub fn to_json(&self) -> Value {
        let mats: Vec<Vec<Vec<Vec<String>>>> = self
            .arrows
            .iter()
            .map(|flag| flag.iter().map(|m| m.iter().map(|r| r.iter().map(rat_string).collect()).collect()).collect())
            .collect();
        json!({"l": self.l, "m": self.m, "arrows": mats})
    }
}

/// An element of `GL_β`: one `i × i` block per flag vertex and an `l × l`
/// block at the center.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupElement {
    pub flags: Vec<Vec<RatMatrix>>,
    pub center: RatMatrix,
}

/// A random determinant-one matrix: lower unitriangular times upper
/// unitriangular.
fn random_unimodular<R: Rng>(rng: &mut R, n: usize) -> RatMatrix {
    let mut lo = rat_identity(n);
    let mut up = rat_identity(n);
    for r in 0..n {
        for c in 0..r {
            lo[r][c] = random_rational(rng);
            up[c][r] = random_rational(rng);
        }
    }
    rat_mul(&lo, &up)
}

impl GroupElement {
    pub fn identity(l: u32, m: u32) -> GroupElement {
        GroupElement {
            flags: (0..m).map(|_| (1..l as usize).map(rat_identity).collect()).collect(),
            center: rat_identity(l as usize),
        }
    }

    pub fn random_unimodular<R: Rng>(l: u32, m: u32, rng: &mut R) -> GroupElement {
        GroupElement {
            flags: (0..m).map(|_| (1..l as usize).map(|i| random_unimodular(rng, i)).collect()).collect(),
            center: random_unimodular(rng, l as usize),
        }
    }

    /// A random invertible element: unimodular blocks rescaled by nonzero
    /// random factors in their first row.
    pub fn random_invertible<R: Rng>(l: u32, m: u32, rng: &mut R) -> GroupElement {
        let mut g = GroupElement::random_unimodular(l, m, rng);
        let mut scale = |b: &mut RatMatrix| {
            let mut f = random_rational(rng);
            while f.is_zero() {
                f = random_rational(rng);
            }
            for x in b[0].iter_mut() {
                *x *= &f;
            }
        };
        for flag in g.flags.iter_mut() {
            for b in flag.iter_mut() {
                scale(b);
            }
        }
        scale(&mut g.center);
        g
    }

    /// `∏_v det(g_v)^{σ(v)}` for `σ = e_center - Σ e_(t_s, coords_s)`.
    pub fn character(&self, t: [u32; 3], coords: [u32; 3]) -> Result<BigRational> {
        let mut acc = rat_det(&self.center);
        for s in 0..3 {
            if coords[s] == 0 || coords[s] as usize == self.center.len() {
                continue;
            }
            let d = rat_det(&self.flags[t[s] as usize - 1][coords[s] as usize - 1]);
            if d.is_zero() {
                return Err(Error::SingularBlock(format!("({},{})", t[s], coords[s])));
            }
            acc /= d;
        }
        Ok(acc)
    }
}

/// `s(g·N) = χ(g) s(N)`.
pub fn semiinvariance_check(rep: &FlagRep, g: &GroupElement, t: [u32; 3], coords: [u32; 3]) -> Result<bool> {
    Ok(rep.act(g)?.value(t, coords)? == g.character(t, coords)? * rep.value(t, coords)?)
}

/// Index of flag vertex `(a, i)` in a weight vector; the center is last.
pub fn flag_vertex_index(l: u32, a: u32, i: u32) -> usize {
    ((a - 1) * (l - 1) + (i - 1)) as usize
}

/// The weight `e_center - Σ e_(p, coord)` of a glued label.
pub fn label_weight(l: u32, m: u32, lab: &Label) -> Vec<BigInt> {
    let n = (m * (l - 1) + 1) as usize;
    let mut w = vec![BigInt::zero(); n];
    w[n - 1] = BigInt::one();
    for (&p, &c) in lab.as_points().expect("glued labels are point maps") {
        if c > 0 && c < l {
            w[flag_vertex_index(l, p, c)] -= 1;
        }
    }
    w
}

/// The weights of all vertices of a glued quiver, one row per vertex.
pub fn glued_weights(q: &IceQuiver, l: u32, m: u32) -> IntMatrix {
    q.labels().iter().map(|lab| label_weight(l, m, lab)).collect()
}

/// `B σ = 0` for the Schofield weights on `◇_l(T)`.
pub fn weights_form_configuration(t: &DiskTriangulation, l: u32) -> Result<bool> {
    let g = glue(t, l)?;
    check_config(&g.quiver, &glued_weights(&g.quiver, l, t.m()))
}

/// The first triangle whose corners contain the label's support.
fn owner(t: &DiskTriangulation, lab: &Label) -> Triangle {
    let pts = lab.as_points().expect("glued labels are point maps");
    *t.triangles().iter().find(|tri| pts.keys().all(|p| tri.contains(p))).expect("label lies in a triangle")
}

fn coords_in(tri: Triangle, lab: &Label) -> [u32; 3] {
    let pts = lab.as_points().expect("glued labels are point maps");
    tri.map(|p| pts.get(&p).copied().unwrap_or(0))
}

/// The value of the semi-invariant attached to a glued label, using the
/// block order of its owning triangle.
pub fn label_value(rep: &FlagRep, t: &DiskTriangulation, lab: &Label) -> Result<BigRational> {
    let tri = owner(t, lab);
    rep.value(tri, coords_in(tri, lab))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeValues {
    pub s0: BigRational,
    pub s_prime: BigRational,
    pub closed_form: BigRational,
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub table_ok: bool,
}

impl ExchangeValues {
    pub fn ok(&self) -> bool {
        self.s0.is_one() && self.s_prime == self.closed_form && self.lhs == self.rhs && self.table_ok
    }
}

/// The exchange relation `s_{0,j,k} s' = s_{1,j-1,k} s_{j,1,k-1} + s_{1,j,k-1} s_{j-1,1,k}`
/// with `b = F^-`, `c = F^+`, and the paths from `(a,1)` and `(d,1)` the
/// columns `u` and `v`. The extra vertex `s'` is the determinant of
/// `[u | P_b(j-1) | v | P_c(k-1)]`.
pub fn exchange_values(j: u32, k: u32, u: &[BigRational], v: &[BigRational]) -> Result<ExchangeValues> {
    let l = (j + k) as usize;
    if j == 0 || k == 0 || u.len() != l || v.len() != l {
        return Err(Error::DimensionMismatch("need j, k >= 1 and vectors of length j + k".into()));
    }
    let (j, k) = (j as usize, k as usize);
    let col = |x: &[BigRational]| -> RatMatrix { x.iter().map(|e| vec![e.clone()]).collect() };
    let pb = |i: usize| -> RatMatrix { (0..l).map(|r| (0..i).map(|c| if r == c { BigRational::one() } else { BigRational::zero() }).collect()).collect() };
    let pc = |i: usize| -> RatMatrix {
        (0..l).map(|r| (0..i).map(|c| if r == l - i + c { BigRational::one() } else { BigRational::zero() }).collect()).collect()
    };
    let (cu, cv) = (col(u), col(v));
    let s0 = schofield(&[pb(j), pc(k)])?;
    let s_prime = schofield(&[cu.clone(), pb(j - 1), cv.clone(), pc(k - 1)])?;
    let sign = |e: usize| if e % 2 == 0 { BigRational::one() } else { -BigRational::one() };
    let closed_form = sign(j - 1) * (&u[j - 1] * &v[j] - &u[j] * &v[j - 1]);
    let a1 = schofield(&[cu.clone(), pb(j - 1), pc(k)])?;
    let a2 = schofield(&[pb(j), cv.clone(), pc(k - 1)])?;
    let a3 = schofield(&[cu, pb(j), pc(k - 1)])?;
    let a4 = schofield(&[pb(j - 1), cv, pc(k)])?;
    let table_ok = a1 == sign(j - 1) * &u[j - 1] && a2 == v[j];
    Ok(ExchangeValues { lhs: &s0 * &s_prime, rhs: a1 * a2 + a3 * a4, s0, s_prime, closed_form, table_ok })
}

pub fn exchange_identity_check<R: Rng>(l: u32, trials: usize, rng: &mut R) -> Result<bool> {
    for _ in 0..trials {
        let j = rng.gen_range(1..l);
        let u: Vec<BigRational> = (0..l).map(|_| random_rational(rng)).collect();
        let v: Vec<BigRational> = (0..l).map(|_| random_rational(rng)).collect();
        if !exchange_values(j, l - j, &u, &v)?.ok() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipCompatReport {
    /// Per label of `◇_l(T)`: the ratio of the tracked value to the flipped
    /// semi-invariant, `+1` or `-1`.
    pub signs: BTreeMap<Label, i8>,
    pub constant: bool,
    pub all_unit: bool,
    pub weights_ok: bool,
    pub trials: usize,
    pub resamples: usize,
}

impl FlipCompatReport {
    pub fn ok(&self) -> bool {
        self.constant && self.all_unit && self.weights_ok
    }
}

/// One trial: push the values of the cluster of `◇_l(T)` through `μ^d` and
/// compare with the semi-invariants of `T'`.
fn flip_trial(t: &DiskTriangulation, d: (u32, u32), l: u32, rep: &FlagRep) -> Result<Option<BTreeMap<Label, i8>>> {
    let g = glue(t, l)?;
    let t2 = flip(t, d)?;
    let pi = flip_relabel(t, d)?;
    let mut q = g.quiver.clone();
    let mut vals: Vec<BigRational> = q.labels().iter().map(|lab| label_value(rep, t, lab)).collect::<Result<_>>()?;
    for lab in flip_sequence(&g, d)? {
        let u = q.require(&lab)?;
        if vals[u].is_zero() {
            return Err(Error::DegeneratePoint);
        }
        let (mut ins, mut outs) = (BigRational::one(), BigRational::one());
        for w in 0..q.len() {
            let a = q.entry(w, u);
            let e: i32 = a.try_into().expect("small multiplicity");
            if e > 0 {
                ins *= num_traits::pow(vals[w].clone(), e as usize);
            } else if e < 0 {
                outs *= num_traits::pow(vals[w].clone(), (-e) as usize);
            }
        }
        vals[u] = (ins + outs) / &vals[u];
        q = q.mutate(u)?;
    }
    let mut signs = BTreeMap::new();
    for (v, lab) in q.labels().iter().enumerate() {
        let target = label_value(rep, &t2, &pi(lab))?;
        if target.is_zero() {
            return Err(Error::DegeneratePoint);
        }
        let r = &vals[v] / &target;
        let s = if r.is_one() {
            1
        } else if (-r).is_one() {
            -1
        } else {
            return Ok(None);
        };
        signs.insert(lab.clone(), s);
    }
    Ok(Some(signs))
}

/// The weights pushed through `μ^d` agree with the weights of the relabeled
/// target vertices.
pub fn flip_weights_check(t: &DiskTriangulation, d: (u32, u32), l: u32) -> Result<bool> {
    let g = glue(t, l)?;
    let pi = flip_relabel(t, d)?;
    let mut q = g.quiver.clone();
    let mut sigma = glued_weights(&q, l, t.m());
    for lab in flip_sequence(&g, d)? {
        let u = q.require(&lab)?;
        let (q2, s2) = mutate_config(&q, &sigma, u)?;
        q = q2;
        sigma = s2;
    }
    Ok(q.labels().iter().zip(&sigma).all(|(lab, w)| *w == label_weight(l, t.m(), &pi(lab))))
}

/// Values of the flipped cluster agree with the semi-invariants of `T'` up
/// to a sign that does not depend on the representation. Degenerate random
/// points are resampled.
pub fn flip_compatibility_check<R: Rng>(t: &DiskTriangulation, d: (u32, u32), l: u32, trials: usize, rng: &mut R) -> Result<FlipCompatReport> {
    let mut first: Option<BTreeMap<Label, i8>> = None;
    let (mut constant, mut all_unit, mut resamples, mut done) = (true, true, 0, 0);
    while done < trials {
        let rep = FlagRep::random(l, t.m(), rng);
        match flip_trial(t, d, l, &rep) {
            Err(Error::DegeneratePoint) => {
                resamples += 1;
                if resamples > 100 * trials.max(1) {
                    return Err(Error::DegeneratePoint);
                }
                continue;
            }
            Err(e) => return Err(e),
            Ok(None) => all_unit = false,
            Ok(Some(s)) => match &first {
                None => first = Some(s),
                Some(f) => constant &= *f == s,
            },
        }
        done += 1;
    }
    let weights_ok = flip_weights_check(t, d, l)?;
    Ok(FlipCompatReport { signs: first.unwrap_or_default(), constant, all_unit, weights_ok, trials, resamples })
}

/// The glued vertex count agrees with the closed form for the cluster size.
pub fn cardinality_check(t: &DiskTriangulation, l: u32) -> Result<bool> {
    let (m, l64) = (t.m() as u64, l as u64);
    let per_piece = (m - 2) * (l64 - 1) * (l64 - 2) / 2 + (2 * m - 3) * (l64 - 1);
    let n = glue(t, l)?.quiver.len() as u64;
    Ok(n == glued_vertex_count(t.m(), l) && n == per_piece)
}
