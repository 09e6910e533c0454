//! Multivariate Laurent polynomials with rational coefficients.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub type Exponent = Vec<i64>;

/// Terms are kept in lexicographic exponent order and never store zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Exponent, BigRational>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::monomial(vec![0; nvars], BigRational::one())
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, BigRational::one())
    }

    pub fn monomial(exps: Exponent, c: BigRational) -> Self {
        let nvars = exps.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        LaurentPoly { nvars, terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponent, BigRational)>>(nvars: usize, it: I) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in it {
            assert_eq!(e.len(), nvars, "exponent length");
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &[i64]) -> BigRational {
        self.terms.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn as_monomial(&self) -> Option<(&Exponent, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    fn add_term(&mut self, e: Exponent, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Componentwise minimum exponent; zeros for the zero polynomial.
    pub fn min_exponents(&self) -> Exponent {
        let mut m: Option<Exponent> = None;
        for e in self.terms.keys() {
            m = Some(match m {
                None => e.clone(),
                Some(cur) => cur.iter().zip(e).map(|(a, b)| *a.min(b)).collect(),
            });
        }
        m.unwrap_or_else(|| vec![0; self.nvars])
    }

    pub fn max_exponents(&self) -> Exponent {
        let mut m: Option<Exponent> = None;
        for e in self.terms.keys() {
            m = Some(match m {
                None => e.clone(),
                Some(cur) => cur.iter().zip(e).map(|(a, b)| *a.max(b)).collect(),
            });
        }
        m.unwrap_or_else(|| vec![0; self.nvars])
    }

    /// Multiply by the monomial `x^shift`.
    pub fn shift(&self, shift: &[i64]) -> Self {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.iter().zip(shift).map(|(a, b)| a + b).collect(), c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        LaurentPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Monomial `prod x_i^{e_i}` with coefficient 1.
    pub fn x_pow(exps: &[i64]) -> Self {
        Self::monomial(exps.to_vec(), BigRational::one())
    }

    /// True when every exponent of variable `i` is nonnegative for `i` in `vars`.
    pub fn is_polynomial_in(&self, vars: &[usize]) -> bool {
        self.terms.keys().all(|e| vars.iter().all(|&i| e[i] >= 0))
    }

    /// Exact quotient `self / d` in the Laurent ring, or `ExactDivisionFailure`.
    ///
    /// Both sides are shifted into the polynomial ring with `d` free of
    /// monomial factors; then plain lex division decides divisibility.
    pub fn div_exact(&self, d: &LaurentPoly) -> Result<LaurentPoly> {
        if d.is_zero() {
            return Err(Error::ExactDivisionFailure);
        }
        if self.is_zero() {
            return Ok(Self::zero(self.nvars));
        }
        if let Some((e, c)) = d.as_monomial() {
            let neg: Vec<i64> = e.iter().map(|x| -x).collect();
            return Ok(self.shift(&neg).scale(&c.recip()));
        }
        let pm = self.min_exponents();
        let dm = d.min_exponents();
        let neg = |v: &[i64]| -> Vec<i64> { v.iter().map(|x| -x).collect() };
        let back: Vec<i64> = pm.iter().zip(&dm).map(|(a, b)| a - b).collect();
        let mut r = self.shift(&neg(&pm));
        let d0 = d.shift(&neg(&dm));
        let (lt_e, lt_c) = d0.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone())).expect("nonzero divisor");
        if lt_c.is_integer() && lt_c.numer().magnitude().is_one() {
            if let Some(res) = packed_division(&r, &d0) {
                return res.map(|q| q.shift(&back));
            }
        }
        if let (Some(num), Some(den)) = (r.integer_terms(), d0.integer_terms()) {
            if lt_c.numer().magnitude().is_one() {
                return integer_division(self.nvars, num, &den, &lt_e, lt_c.numer()).map(|q| q.shift(&back));
            }
        }
        let mut q = Self::zero(self.nvars);
        while let Some((e, c)) = r.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
            if e.iter().zip(&lt_e).any(|(a, b)| a < b) {
                return Err(Error::ExactDivisionFailure);
            }
            let te: Vec<i64> = e.iter().zip(&lt_e).map(|(a, b)| a - b).collect();
            let tc = c / &lt_c;
            for (de, dc) in &d0.terms {
                let ne: Vec<i64> = de.iter().zip(&te).map(|(a, b)| a + b).collect();
                r.add_term(ne, -(dc * &tc));
            }
            q.add_term(te, tc);
        }
        Ok(q.shift(&back))
    }

    /// The terms with integer coefficients, or `None` if some coefficient is
    /// not an integer.
    fn integer_terms(&self) -> Option<BTreeMap<Exponent, BigInt>> {
        self.terms.iter().map(|(e, c)| c.is_integer().then(|| (e.clone(), c.numer().clone()))).collect()
    }

    fn from_integer_terms<I: IntoIterator<Item = (Exponent, BigInt)>>(nvars: usize, it: I) -> Self {
        let terms = it.into_iter().filter(|(_, c)| !c.is_zero()).map(|(e, c)| (e, BigRational::from_integer(c))).collect();
        LaurentPoly { nvars, terms }
    }

    /// Apply a monomial change of variables: `x^e` becomes `x^{f(e)}` where
    /// `f` is linear; `map[i]` is the image exponent of `x_i` (length `nvars_out`).
    pub fn monomial_map(&self, map: &[Vec<i64>], nvars_out: usize) -> Self {
        let mut out = Self::zero(nvars_out);
        for (e, c) in &self.terms {
            let mut ne = vec![0i64; nvars_out];
            for (i, &k) in e.iter().enumerate() {
                if k != 0 {
                    for (t, m) in map[i].iter().enumerate() {
                        ne[t] += k * m;
                    }
                }
            }
            out.add_term(ne, c.clone());
        }
        out
    }

    /// Evaluate at a rational point with nonzero coordinates where negative
    /// exponents occur.
    pub fn eval(&self, point: &[BigRational]) -> Result<BigRational> {
        let mut s = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k < 0 && x.is_zero() {
                    return Err(Error::DegeneratePoint);
                }
                t *= num_traits::pow::Pow::pow(x, k as i32);
            }
            s += t;
        }
        Ok(s)
    }

    /// Serialized as sorted `[[exponents], "num/den"]` pairs.
    pub fn to_json(&self) -> Value {
        Value::Array(self.terms.iter().map(|(e, c)| json!([e, rat_string(c)])).collect())
    }

    pub fn from_json(nvars: usize, v: &Value) -> Result<LaurentPoly> {
        let bad = || Error::Parse("bad Laurent polynomial".into());
        let arr = v.as_array().ok_or_else(bad)?;
        let mut p = LaurentPoly::zero(nvars);
        for t in arr {
            let pair = t.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
            let e: Exponent = serde_json::from_value(pair[0].clone()).map_err(|_| bad())?;
            if e.len() != nvars {
                return Err(Error::DimensionMismatch(format!("exponent of length {} for {} variables", e.len(), nvars)));
            }
            let c = parse_rat(pair[1].as_str().ok_or_else(bad)?)?;
            p.add_term(e, c);
        }
        Ok(p)
    }
}

pub fn rat_string(c: &BigRational) -> String {
    format!("{}/{}", c.numer(), c.denom())
}

pub fn parse_rat(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n.trim().parse().map_err(|_| bad())?, d))
        }
        None => Ok(BigRational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, o: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.nvars, o.nvars, "variable count");
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, o: &LaurentPoly) -> LaurentPoly {
        self + &(-o)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, o: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.nvars, o.nvars, "variable count");
        if let Some(p) = packed_product(self, o) {
            return p;
        }
        if let (Some(a), Some(b)) = (self.integer_terms(), o.integer_terms()) {
            return integer_product(self.nvars, &a, &b);
        }
        let mut r = LaurentPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                r.add_term(e1.iter().zip(e2).map(|(a, b)| a + b).collect(), c1 * c2);
            }
        }
        r
    }
}

// Integer coefficients avoid the gcd normalization of every rational product.

const DENSE_LIMIT: u64 = 1 << 21;

/// Multiplicative hash for packed exponent keys.
#[derive(Default)]
struct KeyHasher(u64);

impl std::hash::Hasher for KeyHasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0.rotate_left(5) ^ b as u64).wrapping_mul(0x51_7c_c1_b7_27_22_0a_95);
        }
    }
    fn write_u64(&mut self, k: u64) {
        self.0 = (k ^ (k >> 29)).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    }
}

/// Product with exponents packed into one key over the bounding box of the
/// result and `i128` coefficients. `None` when a coefficient is not a small
/// integer, the box does not fit in `u64`, or an accumulator overflows.
fn packed_product(a: &LaurentPoly, b: &LaurentPoly) -> Option<LaurentPoly> {
    if a.is_zero() || b.is_zero() {
        return Some(LaurentPoly::zero(a.nvars));
    }
    let small = |p: &LaurentPoly| -> Option<Vec<i128>> {
        p.terms.values().map(|c| if c.is_integer() { c.numer().to_i128() } else { None }).collect()
    };
    let (ca, cb) = (small(a)?, small(b)?);
    let (amin, amax, bmin, bmax) = (a.min_exponents(), a.max_exponents(), b.min_exponents(), b.max_exponents());
    let n = a.nvars;
    let mut strides = vec![0u64; n];
    let mut size = 1u64;
    for i in (0..n).rev() {
        strides[i] = size;
        let width = u64::try_from(amax[i] - amin[i] + bmax[i] - bmin[i] + 1).ok()?;
        size = size.checked_mul(width)?;
    }
    let pack = |e: &[i64], lo: &[i64]| -> u64 { e.iter().zip(lo).zip(&strides).map(|((x, l), s)| (x - l) as u64 * s).sum() };
    let ka: Vec<u64> = a.terms.keys().map(|e| pack(e, &amin)).collect();
    let kb: Vec<u64> = b.terms.keys().map(|e| pack(e, &bmin)).collect();
    let mut out: Vec<(u64, i128)> = Vec::new();
    if size <= DENSE_LIMIT {
        let mut acc = vec![0i128; size as usize];
        for (x, &c1) in ka.iter().zip(&ca) {
            for (y, &c2) in kb.iter().zip(&cb) {
                let slot = &mut acc[(x + y) as usize];
                *slot = slot.checked_add(c1.checked_mul(c2)?)?;
            }
        }
        out.extend(acc.into_iter().enumerate().filter(|(_, c)| *c != 0).map(|(k, c)| (k as u64, c)));
    } else {
        let cap = (ka.len() * kb.len()).min(size as usize).min(1 << 22);
        let mut acc: HashMap<u64, i128, std::hash::BuildHasherDefault<KeyHasher>> = HashMap::with_capacity_and_hasher(cap, Default::default());
        for (x, &c1) in ka.iter().zip(&ca) {
            for (y, &c2) in kb.iter().zip(&cb) {
                let slot = acc.entry(x + y).or_insert(0);
                *slot = slot.checked_add(c1.checked_mul(c2)?)?;
            }
        }
        out.extend(acc.into_iter().filter(|(_, c)| *c != 0));
    }
    let lo: Vec<i64> = amin.iter().zip(&bmin).map(|(x, y)| x + y).collect();
    let unpack = |mut k: u64| -> Exponent {
        let mut e = lo.clone();
        for (x, s) in e.iter_mut().zip(&strides) {
            *x += (k / s) as i64;
            k %= s;
        }
        e
    };
    Some(LaurentPoly::from_integer_terms(n, out.into_iter().map(|(k, c)| (unpack(k), BigInt::from(c)))))
}

/// Lex division of polynomials in packed form, for a divisor with leading
/// coefficient `±1`. Quotient exponents are bounded by the Newton polytopes,
/// so a quotient term outside `[0, max(r) - max(d)]` proves non-divisibility.
/// `None` when coefficients do not fit in `i128`.
fn packed_division(r: &LaurentPoly, d: &LaurentPoly) -> Option<Result<LaurentPoly>> {
    let n = r.nvars;
    let (rmax, dmax) = (r.max_exponents(), d.max_exponents());
    if rmax.iter().zip(&dmax).any(|(a, b)| a < b) {
        return Some(Err(Error::ExactDivisionFailure));
    }
    let mut strides = vec![0u64; n];
    let mut size = 1u64;
    for i in (0..n).rev() {
        strides[i] = size;
        size = size.checked_mul(u64::try_from(rmax[i] + 1).ok()?)?;
    }
    let pack = |e: &[i64]| -> u64 { e.iter().zip(&strides).map(|(x, s)| *x as u64 * s).sum() };
    let small = |c: &BigRational| if c.is_integer() { c.numer().to_i128() } else { None };
    let mut rem: BTreeMap<u64, i128> = BTreeMap::new();
    for (e, c) in &r.terms {
        rem.insert(pack(e), small(c)?);
    }
    let mut div: Vec<(u64, i128)> = Vec::with_capacity(d.len());
    for (e, c) in d.terms.iter().rev() {
        div.push((pack(e), small(c)?));
    }
    let (lead, lead_c) = div[0];
    let lead_e = d.terms.keys().next_back().expect("nonzero divisor");
    let qmax: Vec<i64> = rmax.iter().zip(&dmax).map(|(a, b)| a - b).collect();
    let mut quotient = Vec::new();
    while let Some((k, c)) = rem.pop_last() {
        let Some(tk) = k.checked_sub(lead) else { return Some(Err(Error::ExactDivisionFailure)) };
        let mut te = vec![0i64; n];
        let mut rest = k;
        for i in 0..n {
            let digit = (rest / strides[i]) as i64;
            rest %= strides[i];
            te[i] = digit - lead_e[i];
            if te[i] < 0 || te[i] > qmax[i] {
                return Some(Err(Error::ExactDivisionFailure));
            }
        }
        let tc = if lead_c < 0 { -c } else { c };
        for &(dk, dc) in &div[1..] {
            let key = dk + tk;
            let delta = dc.checked_mul(tc)?;
            match rem.entry(key) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(-delta);
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    let x = o.get().checked_sub(delta)?;
                    if x == 0 {
                        o.remove();
                    } else {
                        *o.get_mut() = x;
                    }
                }
            }
        }
        quotient.push((te, BigInt::from(tc)));
    }
    Some(Ok(LaurentPoly::from_integer_terms(n, quotient)))
}

fn integer_product(nvars: usize, a: &BTreeMap<Exponent, BigInt>, b: &BTreeMap<Exponent, BigInt>) -> LaurentPoly {
    let mut acc: HashMap<Exponent, BigInt> = HashMap::with_capacity((a.len() * b.len()).min(1 << 16));
    for (e1, c1) in a {
        for (e2, c2) in b {
            let e: Exponent = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
            *acc.entry(e).or_default() += c1 * c2;
        }
    }
    LaurentPoly::from_integer_terms(nvars, acc)
}

/// Lex division of polynomials (all exponents nonnegative) by a divisor with
/// leading coefficient `±1`, so every quotient coefficient is an integer.
fn integer_division(
    nvars: usize,
    mut r: BTreeMap<Exponent, BigInt>,
    d: &BTreeMap<Exponent, BigInt>,
    lt_e: &[i64],
    lt_c: &BigInt,
) -> Result<LaurentPoly> {
    let mut q = Vec::new();
    while let Some((e, c)) = r.pop_last() {
        if e.iter().zip(lt_e).any(|(a, b)| a < b) {
            return Err(Error::ExactDivisionFailure);
        }
        let te: Exponent = e.iter().zip(lt_e).map(|(a, b)| a - b).collect();
        let tc = if lt_c.is_negative() { -c } else { c };
        for (de, dc) in d.iter().rev().skip(1) {
            let ne: Exponent = de.iter().zip(&te).map(|(a, b)| a + b).collect();
            match r.entry(ne) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(-(dc * &tc));
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    *o.get_mut() -= dc * &tc;
                    if o.get().is_zero() {
                        o.remove();
                    }
                }
            }
        }
        q.push((te, tc));
    }
    Ok(LaurentPoly::from_integer_terms(nvars, q))
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k != 0)
                .map(|(i, &k)| if k == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, k) })
                .collect();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (a.is_one(), mono.is_empty()) {
                (true, true) => write!(f, "1")?,
                (true, false) => write!(f, "{}", mono.join("*"))?,
                (false, true) => write!(f, "{a}")?,
                (false, false) => write!(f, "{a}*{}", mono.join("*"))?,
            }
        }
        Ok(())
    }
}
