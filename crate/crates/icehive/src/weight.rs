//! Weight configurations and balanced extensions.
//!
//! A weight configuration assigns an integer row `sigma[v]` to every vertex
//! with `B sigma = 0`. A balanced extension of `Δ` by frozen vertices `e`
//! is described by `Θ` with `B Θ = -B_e`; then `x̄(v) = x(v) x̄(e)^{Θ(v)}`.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::linalg::{bareiss_rank, int_solve, IntMatrix};
use crate::quiver::IceQuiver;
use crate::seed::{y_monomials, Seed};

/// Rows indexed by vertex.
pub type Weights = IntMatrix;

fn check_dims(q: &IceQuiver, sigma: &Weights) -> Result<usize> {
    if sigma.len() != q.len() {
        return Err(Error::DimensionMismatch(format!("{} weight rows for {} vertices", sigma.len(), q.len())));
    }
    let w = sigma.first().map_or(0, |r| r.len());
    if sigma.iter().any(|r| r.len() != w) {
        return Err(Error::DimensionMismatch("ragged weight rows".into()));
    }
    Ok(w)
}

/// `B sigma` row for mutable `u`.
fn residual(q: &IceQuiver, sigma: &Weights, u: usize, w: usize) -> Vec<BigInt> {
    let mut acc = vec![BigInt::zero(); w];
    for v in 0..q.len() {
        let a = q.entry(u, v);
        if a.is_zero() {
            continue;
        }
        for (t, s) in acc.iter_mut().enumerate() {
            *s += a * &sigma[v][t];
        }
    }
    acc
}

pub fn check_config(q: &IceQuiver, sigma: &Weights) -> Result<bool> {
    let w = check_dims(q, sigma)?;
    Ok(q.mutable_vertices().into_iter().all(|u| residual(q, sigma, u, w).iter().all(Zero::is_zero)))
}

/// `σ'(u) = Σ_{u→w} σ(w) − σ(u)` together with `μ_u(Q)`.
pub fn mutate_config(q: &IceQuiver, sigma: &Weights, u: usize) -> Result<(IceQuiver, Weights)> {
    if !check_config(q, sigma)? {
        return Err(Error::InvalidConfig("B sigma is not zero".into()));
    }
    let w = check_dims(q, sigma)?;
    let q2 = q.mutate(u)?;
    let mut new = vec![BigInt::zero(); w];
    for v in 0..q.len() {
        let a = q.entry(u, v);
        if a.is_positive() {
            for (t, s) in new.iter_mut().enumerate() {
                *s += a * &sigma[v][t];
            }
        }
    }
    for (t, s) in new.iter_mut().enumerate() {
        *s -= &sigma[u][t];
    }
    let mut s2 = sigma.clone();
    s2[u] = new;
    Ok((q2, s2))
}

/// Balanced extension data: `delta` and `e` partition the vertices of the
/// extended quiver; `theta` has one row per vertex and one column per `e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    pub delta: Vec<usize>,
    pub e: Vec<usize>,
    pub theta: IntMatrix,
}

/// Solve `B Θ = −B_e` over the integers. `Θ` restricted to `e` is the
/// identity; on `Δ` it is the particular solution from the column echelon
/// form with zero free coordinates.
pub fn solve_balanced_extension(bar: &IceQuiver, delta: &[usize], e: &[usize]) -> Result<Extension> {
    let n = bar.len();
    let mut seen = vec![false; n];
    for &v in delta.iter().chain(e) {
        if v >= n || seen[v] {
            return Err(Error::DimensionMismatch("delta and e must partition the vertices".into()));
        }
        seen[v] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::DimensionMismatch("delta and e must partition the vertices".into()));
    }
    if let Some(&f) = e.iter().find(|&&f| !bar.is_frozen(f)) {
        return Err(Error::InvalidConfig(format!("extension vertex {} is mutable", bar.label(f))));
    }
    let rows: Vec<usize> = delta.iter().copied().filter(|&v| !bar.is_frozen(v)).collect();
    let b = bar.submatrix(&rows, delta)?;
    if bareiss_rank(&b) < rows.len() {
        return Err(Error::RankDeficient);
    }
    let be = bar.submatrix(&rows, e)?;
    let rhs: IntMatrix = be.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
    let x = if rows.is_empty() { vec![vec![BigInt::zero(); e.len()]; delta.len()] } else { int_solve(&b, &rhs)? };
    let mut theta = vec![vec![BigInt::zero(); e.len()]; n];
    for (i, &v) in delta.iter().enumerate() {
        theta[v] = x[i].clone();
    }
    for (j, &f) in e.iter().enumerate() {
        theta[f][j] = BigInt::from(1);
    }
    Ok(Extension { delta: delta.to_vec(), e: e.to_vec(), theta })
}

impl Extension {
    fn theta_i64(&self, v: usize) -> Vec<i64> {
        self.theta[v].iter().map(|x| x.to_i64().expect("small theta")).collect()
    }

    /// Exponent map of `x̄(v) ↦ x(v) x̄(e)^{Θ(v)}` on the extended variables.
    pub fn substitution(&self, n: usize) -> Vec<Vec<i64>> {
        let mut map = vec![vec![0i64; n]; n];
        for &v in &self.delta {
            map[v][v] = 1;
            for (j, t) in self.theta_i64(v).into_iter().enumerate() {
                map[v][self.e[j]] += t;
            }
        }
        for &f in &self.e {
            map[f][f] = 1;
        }
        map
    }

    /// Exponent map sending the variables of `Δ` (indexed by position in
    /// `delta`) into the extended index space.
    pub fn embedding(&self, n: usize) -> Vec<Vec<i64>> {
        self.delta
            .iter()
            .map(|&v| {
                let mut r = vec![0i64; n];
                r[v] = 1;
                r
            })
            .collect()
    }

    /// `x̄(e)^{Θ(v)}` written in the extended variables.
    pub fn e_monomial(&self, n: usize, theta_row: &[BigInt]) -> LaurentPoly {
        let mut ex = vec![0i64; n];
        for (j, t) in theta_row.iter().enumerate() {
            ex[self.e[j]] += t.to_i64().expect("small theta");
        }
        LaurentPoly::x_pow(&ex)
    }

    pub fn satisfies_equation(&self, bar: &IceQuiver) -> bool {
        check_config(bar, &self.theta).unwrap_or(false)
    }

    /// The balanced product identity: at every mutable `u` the exchange
    /// binomial of the extension, after substitution, is the binomial of `Δ`
    /// times a monomial in `x̄(e)`.
    pub fn verify_balanced_product(&self, bar: &IceQuiver) -> Result<bool> {
        let n = bar.len();
        let sub = self.substitution(n);
        let small = bar.induced(&self.delta);
        let emb = self.embedding(n);
        let sbar = Seed::initial(bar.clone());
        let sd = Seed::initial(small.clone());
        for (i, &u) in self.delta.iter().enumerate() {
            if bar.is_frozen(u) {
                continue;
            }
            let (a, b) = sbar.exchange_monomials(u);
            let lhs = (&a + &b).monomial_map(&sub, n);
            let (c, d) = sd.exchange_monomials(i);
            let rhs = (&c + &d).monomial_map(&emb, n);
            let Ok(ratio) = lhs.div_exact(&rhs) else { return Ok(false) };
            let Some((ex, _)) = ratio.as_monomial() else { return Ok(false) };
            if self.delta.iter().any(|&v| ex[v] != 0) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `ȳ_u` after substitution equals `y_u` for every mutable `u`.
    pub fn y_vars_agree(&self, bar: &IceQuiver) -> bool {
        let n = bar.len();
        let sub = self.substitution(n);
        let emb = self.embedding(n);
        let small = bar.induced(&self.delta);
        let ybar = y_monomials(bar);
        let y = y_monomials(&small);
        ybar.iter().zip(&y).all(|((_, a), (_, b))| a.monomial_map(&sub, n) == b.monomial_map(&emb, n))
    }

    /// `x^g = x̄^{(g, −gΘ)}` under the substitution, for `g` indexed by `delta`.
    pub fn monomial_identity(&self, n: usize, g: &[i64]) -> bool {
        let mut ex = vec![0i64; n];
        for (i, &v) in self.delta.iter().enumerate() {
            ex[v] = g[i];
            for (j, t) in self.theta_i64(v).into_iter().enumerate() {
                ex[self.e[j]] -= g[i] * t;
            }
        }
        let lhs = LaurentPoly::x_pow(&ex).monomial_map(&self.substitution(n), n);
        let rhs = LaurentPoly::x_pow(g).monomial_map(&self.embedding(n), n);
        lhs == rhs
    }

    /// Mutate both seeds along `seq` (indices into the extended quiver, all
    /// in `delta`) and check `x̄'(u) = x'(u) x̄(e)^{Θ'(u)}` after every step.
    pub fn verify_commutation(&self, bar: &IceQuiver, seq: &[usize]) -> Result<bool> {
        let n = bar.len();
        let sub = self.substitution(n);
        let emb = self.embedding(n);
        let pos = |v: usize| self.delta.iter().position(|&d| d == v);
        let mut sbar = Seed::initial(bar.clone());
        let mut sd = Seed::initial(bar.induced(&self.delta));
        let mut theta = self.theta.clone();
        let check = |sbar: &Seed, sd: &Seed, theta: &IntMatrix| {
            self.delta.iter().enumerate().all(|(i, &v)| {
                let lhs = sbar.var(v).monomial_map(&sub, n);
                let rhs = &sd.var(i).monomial_map(&emb, n) * &self.e_monomial(n, &theta[v]);
                lhs == rhs
            })
        };
        if !check(&sbar, &sd, &theta) {
            return Ok(false);
        }
        for &u in seq {
            let i = pos(u).ok_or_else(|| Error::InvalidConfig(format!("vertex {} is not in delta", bar.label(u))))?;
            let (_, t2) = mutate_config(sbar.quiver(), &theta, u)?;
            theta = t2;
            sbar = sbar.mutate(u)?;
            sd = sd.mutate(i)?;
            if !check(&sbar, &sd, &theta) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(r: &[&[i64]]) -> Weights {
        r.iter().map(|x| x.iter().map(|&v| BigInt::from(v)).collect()).collect()
    }

    #[test]
    fn zero_and_single_constraint() {
        let q = IceQuiver::from_arrows(2, &[1], &[(0, 1, 1)]);
        assert!(check_config(&q, &rows(&[&[0, 0], &[0, 0]])).unwrap());
        assert!(check_config(&q, &rows(&[&[5, -2], &[0, 0]])).unwrap());
        assert!(!check_config(&q, &rows(&[&[5, -2], &[1, 0]])).unwrap());
        assert!(check_config(&q, &rows(&[&[1]])).is_err());
    }

    #[test]
    fn mutate_config_formula_and_involution() {
        let q = IceQuiver::from_arrows(2, &[1], &[(0, 1, 1)]);
        let s = rows(&[&[3], &[0]]);
        let (q2, s2) = mutate_config(&q, &s, 0).unwrap();
        assert_eq!(s2, rows(&[&[-3], &[0]]));
        let (q3, s3) = mutate_config(&q2, &s2, 0).unwrap();
        assert_eq!((q3, s3), (q, s));
    }

    #[test]
    fn minimal_extension() {
        // u -> f, extended by frozen e with e -> u.
        let bar = IceQuiver::from_arrows(3, &[1, 2], &[(0, 1, 1), (2, 0, 1)]);
        let ext = solve_balanced_extension(&bar, &[0, 1], &[2]).unwrap();
        assert_eq!(ext.theta, rows(&[&[0], &[1], &[1]]));
        assert!(ext.satisfies_equation(&bar));
        assert!(ext.verify_balanced_product(&bar).unwrap());
        assert!(ext.verify_commutation(&bar, &[]).unwrap());
        assert!(ext.verify_commutation(&bar, &[0]).unwrap());
        assert!(ext.y_vars_agree(&bar));
    }

    #[test]
    fn disconnected_extension_is_zero() {
        let bar = IceQuiver::from_arrows(3, &[1, 2], &[(0, 1, 1)]);
        let ext = solve_balanced_extension(&bar, &[0, 1], &[2]).unwrap();
        assert_eq!(ext.theta, rows(&[&[0], &[0], &[1]]));
    }

    #[test]
    fn rank_deficient_is_reported() {
        let bar = IceQuiver::from_arrows(3, &[2], &[(0, 2, 1), (1, 2, 1)]);
        assert_eq!(solve_balanced_extension(&bar, &[0, 1], &[2]), Err(Error::RankDeficient));
    }
}
