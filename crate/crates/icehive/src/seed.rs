//! Seeds over the initial cluster: every cluster variable is a Laurent
//! polynomial in the initial variables `x_0, ..., x_{q-1}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::linalg::{rat_solve, to_rat};
use crate::quiver::IceQuiver;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seed {
    quiver: IceQuiver,
    vars: Vec<LaurentPoly>,
}

fn small(m: &BigInt) -> u32 {
    m.to_u32().expect("arrow multiplicity fits in u32")
}

/// Product of `vars[v]^{mult}` over the given pairs.
fn product(n: usize, vars: &[LaurentPoly], factors: &[(usize, u32)]) -> LaurentPoly {
    let mut acc = LaurentPoly::one(n);
    for &(v, k) in factors {
        acc = &acc * &vars[v].pow(k);
    }
    acc
}

impl Seed {
    /// The initial seed: `vars[v] = x_v`.
    pub fn initial(quiver: IceQuiver) -> Seed {
        let n = quiver.len();
        let vars = (0..n).map(|v| LaurentPoly::var(n, v)).collect();
        Seed { quiver, vars }
    }

    pub fn from_parts(quiver: IceQuiver, vars: Vec<LaurentPoly>) -> Result<Seed> {
        if vars.len() != quiver.len() {
            return Err(Error::DimensionMismatch("one variable per vertex".into()));
        }
        Ok(Seed { quiver, vars })
    }

    pub fn quiver(&self) -> &IceQuiver {
        &self.quiver
    }

    pub fn vars(&self) -> &[LaurentPoly] {
        &self.vars
    }

    pub fn var(&self, v: usize) -> &LaurentPoly {
        &self.vars[v]
    }

    /// In- and out-monomials of the exchange relation at `u`.
    pub fn exchange_monomials(&self, u: usize) -> (LaurentPoly, LaurentPoly) {
        let q = &self.quiver;
        let n = self.vars.first().map_or(q.len(), |p| p.nvars());
        let mut ins = Vec::new();
        let mut outs = Vec::new();
        for v in 0..q.len() {
            let a = q.entry(v, u);
            if a.is_positive() {
                ins.push((v, small(a)));
            } else if a.is_negative() {
                outs.push((v, small(&-a)));
            }
        }
        (product(n, &self.vars, &ins), product(n, &self.vars, &outs))
    }

    /// `x_u x_u' = prod_{v->u} x_v + prod_{u->w} x_w`, divided exactly.
    pub fn mutate(&self, u: usize) -> Result<Seed> {
        let quiver = self.quiver.mutate(u)?;
        let (ins, outs) = self.exchange_monomials(u);
        let new = (&ins + &outs).div_exact(&self.vars[u])?;
        let mut vars = self.vars.clone();
        vars[u] = new;
        Ok(Seed { quiver, vars })
    }

    pub fn mutate_seq(&self, us: &[usize]) -> Result<Seed> {
        let mut s = self.clone();
        for &u in us {
            s = s.mutate(u)?;
        }
        Ok(s)
    }

    /// `y_u = x^{-b_u}` as monomials in this seed's own cluster coordinates.
    pub fn y_vars(&self) -> Vec<(usize, LaurentPoly)> {
        y_monomials(&self.quiver)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "quiver": self.quiver.to_json(),
            "vars": self.vars.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Seed> {
        let q = IceQuiver::from_json(v.get("quiver").ok_or_else(|| Error::Parse("missing quiver".into()))?)?;
        match v.get("vars") {
            None => Ok(Seed::initial(q)),
            Some(arr) => {
                let arr = arr.as_array().ok_or_else(|| Error::Parse("vars must be an array".into()))?;
                let vars = arr.iter().map(|p| LaurentPoly::from_json(q.len(), p)).collect::<Result<Vec<_>>>()?;
                Seed::from_parts(q, vars)
            }
        }
    }
}

/// `y_u = x^{-b_u}` for each mutable `u`, in the quiver's own variables.
pub fn y_monomials(q: &IceQuiver) -> Vec<(usize, LaurentPoly)> {
    q.mutable_vertices()
        .into_iter()
        .map(|u| {
            let e: Vec<i64> = (0..q.len()).map(|v| -q.entry(u, v).to_i64().expect("small entry")).collect();
            (u, LaurentPoly::x_pow(&e))
        })
        .collect()
}

/// The exponent `g` with `z = x^g F(y)`, `F` having a nonzero constant term.
/// Every exponent of `z` must be `g - eB` with `e` a nonnegative integer row.
pub fn g_vector(z: &LaurentPoly, q: &IceQuiver) -> Result<Vec<i64>> {
    if !q.has_full_rank() {
        return Err(Error::RankDeficient);
    }
    if z.is_zero() {
        return Err(Error::NoGVector);
    }
    let bt: Vec<Vec<BigRational>> = {
        let b = to_rat(&q.b_matrix());
        let (p, n) = (b.len(), q.len());
        (0..n).map(|c| (0..p).map(|r| b[r][c].clone()).collect()).collect()
    };
    let exps: Vec<&Vec<i64>> = z.terms().map(|(e, _)| e).collect();
    'candidates: for g in &exps {
        for m in &exps {
            let rhs: Vec<Vec<BigRational>> = g.iter().zip(m.iter()).map(|(a, b)| vec![BigRational::from_integer(BigInt::from(a - b))]).collect();
            let Some(e) = rat_solve(&bt, &rhs) else { continue 'candidates };
            if e.iter().any(|r| !r[0].is_integer() || r[0].is_negative()) {
                continue 'candidates;
            }
        }
        return Ok(g.to_vec());
    }
    Err(Error::NoGVector)
}

/// The exchange binomial at `u` in the initial variables; it does not
/// involve `x_u`.
fn exchange_binomial(q: &IceQuiver, u: usize) -> LaurentPoly {
    let s = Seed::initial(q.clone());
    let (a, b) = s.exchange_monomials(u);
    &a + &b
}

/// Membership of `z` (given in the initial cluster of `q`) in the upper bound
/// `U = L(x) ∩ ⋂_u L(x_u)`, each ring Laurent in mutable and polynomial in
/// frozen variables.
pub fn upper_bound_member(z: &LaurentPoly, q: &IceQuiver) -> bool {
    let frozen = q.frozen_vertices();
    if !z.is_polynomial_in(&frozen) {
        return false;
    }
    let n = q.len();
    for u in q.mutable_vertices() {
        let rho = exchange_binomial(q, u);
        // split z = sum_k A_k x_u^k
        let mut parts: std::collections::BTreeMap<i64, LaurentPoly> = Default::default();
        for (e, c) in z.terms() {
            let mut e2 = e.clone();
            let k = std::mem::replace(&mut e2[u], 0);
            let t = LaurentPoly::monomial(e2, c.clone());
            let entry = parts.entry(k).or_insert_with(|| LaurentPoly::zero(n));
            *entry = &*entry + &t;
        }
        for (k, a) in parts {
            // after x_u = rho / x_u', the coefficient of x_u'^{-k} is A_k rho^k
            let coeff = if k >= 0 {
                &a * &rho.pow(k as u32)
            } else {
                match a.div_exact(&rho.pow((-k) as u32)) {
                    Ok(c) => c,
                    Err(_) => return false,
                }
            };
            if !coeff.is_polynomial_in(&frozen) {
                return false;
            }
        }
    }
    true
}

/// Rational-function variant: `num / den` must first be Laurent in `x`.
pub fn upper_bound_member_fraction(num: &LaurentPoly, den: &LaurentPoly, q: &IceQuiver) -> bool {
    if den.is_zero() {
        return false;
    }
    match num.div_exact(den) {
        Ok(z) => upper_bound_member(&z, q),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn a2() -> IceQuiver {
        IceQuiver::from_arrows(2, &[], &[(0, 1, 1)])
    }

    #[test]
    fn single_exchange() {
        let s = Seed::initial(a2()).mutate(0).unwrap();
        let want = &LaurentPoly::x_pow(&[-1, 1]) + &LaurentPoly::x_pow(&[-1, 0]);
        assert_eq!(s.var(0), &want);
        assert_eq!(s.quiver(), &a2().mutate(0).unwrap());
    }

    #[test]
    fn mutation_is_involutive_on_seeds() {
        let s = Seed::initial(a2());
        assert_eq!(s.mutate_seq(&[1, 1]).unwrap(), s);
    }

    #[test]
    fn y_variable_of_a2() {
        let ys = Seed::initial(a2()).y_vars();
        assert_eq!(ys, vec![(0, LaurentPoly::x_pow(&[0, -1])), (1, LaurentPoly::x_pow(&[1, 0]))]);
    }

    #[test]
    fn g_vectors() {
        let q = a2();
        assert_eq!(g_vector(&LaurentPoly::var(2, 1), &q).unwrap(), vec![0, 1]);
        let x1p = Seed::initial(q.clone()).mutate(0).unwrap().var(0).clone();
        // x_1' = x_1^{-1} x_2 (1 + y_1) with y_1 = x_2^{-1}
        assert_eq!(g_vector(&x1p, &q).unwrap(), vec![-1, 1]);
        // x_1 + x_2 = x_2 (1 + y_1 y_2) has one, x_1 + x_2^{-1} does not
        let sum = &LaurentPoly::var(2, 0) + &LaurentPoly::var(2, 1);
        assert_eq!(g_vector(&sum, &q).unwrap(), vec![0, 1]);
        let not_g = &LaurentPoly::var(2, 0) + &LaurentPoly::x_pow(&[0, -1]);
        assert_eq!(g_vector(&not_g, &q), Err(Error::NoGVector));
    }

    #[test]
    fn upper_bound_examples() {
        let q = a2();
        assert!(upper_bound_member(&LaurentPoly::x_pow(&[2, 3]), &q));
        assert!(!upper_bound_member(&LaurentPoly::x_pow(&[-2, 3]), &q));
        let x1p = Seed::initial(q.clone()).mutate(0).unwrap().var(0).clone();
        assert!(upper_bound_member(&x1p, &q));
        let one = LaurentPoly::one(2);
        let s = &LaurentPoly::var(2, 0) + &LaurentPoly::var(2, 1);
        assert!(!upper_bound_member_fraction(&one, &s, &q));
        // 1/x_1 alone is Laurent in x but not in the cluster mutated at 0.
        let inv = LaurentPoly::monomial(vec![-1, 0], BigRational::one());
        assert!(!upper_bound_member(&inv, &q));
    }

    #[test]
    fn frozen_variables_must_stay_polynomial() {
        let q = IceQuiver::from_arrows(2, &[1], &[(0, 1, 1)]);
        assert!(!upper_bound_member(&LaurentPoly::x_pow(&[0, -1]), &q));
        assert!(upper_bound_member(&LaurentPoly::x_pow(&[0, 2]), &q));
    }
}
