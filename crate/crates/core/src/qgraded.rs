//! Truncated power series in `q` with Laurent-polynomial coefficients, and
//! the plethystic exponential / logarithm on them.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactpoly::{Exponent, Poly};

/// `sum_{r=0}^{r_max} coeffs[r] q^r`, exact modulo `q^{r_max+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSeries<E>", bound = "E: Exponent")]
pub struct QSeries<E: Exponent> {
    r_max: usize,
    coeffs: Vec<Poly<E>>,
}

#[derive(Deserialize)]
#[serde(bound = "E: Exponent")]
struct RawSeries<E: Exponent> {
    r_max: usize,
    coeffs: Vec<Poly<E>>,
}

impl<E: Exponent> TryFrom<RawSeries<E>> for QSeries<E> {
    type Error = Error;
    fn try_from(raw: RawSeries<E>) -> Result<Self> {
        QSeries::new(raw.r_max, raw.coeffs)
    }
}

impl<E: Exponent> QSeries<E> {
    /// Fails unless exactly `r_max + 1` coefficients are given.
    pub fn new(r_max: usize, coeffs: Vec<Poly<E>>) -> Result<Self> {
        if coeffs.len() != r_max + 1 {
            return Err(Error::Schema(format!(
                "series with r_max {r_max} needs {} coefficients, got {}",
                r_max + 1,
                coeffs.len()
            )));
        }
        Ok(QSeries { r_max, coeffs })
    }

    pub fn zero(r_max: usize) -> Self {
        QSeries {
            r_max,
            coeffs: vec![Poly::zero(); r_max + 1],
        }
    }

    pub fn one(r_max: usize) -> Self {
        let mut s = Self::zero(r_max);
        s.coeffs[0] = Poly::one();
        s
    }

    /// `c q^r`, or zero when `r` exceeds the truncation order.
    pub fn monomial(r_max: usize, r: usize, c: Poly<E>) -> Self {
        let mut s = Self::zero(r_max);
        if r <= r_max {
            s.coeffs[r] = c;
        }
        s
    }

    pub fn r_max(&self) -> usize {
        self.r_max
    }

    pub fn coeff(&self, r: usize) -> &Poly<E> {
        &self.coeffs[r]
    }

    pub fn coeffs(&self) -> &[Poly<E>] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, r: usize, c: Poly<E>) {
        self.coeffs[r] = c;
    }

    /// Same series at a lower truncation order.
    pub fn truncated(&self, r_max: usize) -> Self {
        let r_max = r_max.min(self.r_max);
        QSeries {
            r_max,
            coeffs: self.coeffs[..=r_max].to_vec(),
        }
    }

    /// Applies `f` to every coefficient.
    pub fn map(&self, f: impl Fn(&Poly<E>) -> Poly<E>) -> Self {
        QSeries {
            r_max: self.r_max,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.r_max != other.r_max {
            return Err(Error::usage(format!(
                "truncation orders differ: {} vs {}",
                self.r_max, other.r_max
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(QSeries {
            r_max: self.r_max,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(QSeries {
            r_max: self.r_max,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    /// Cauchy product truncated at `q^{r_max}`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::zero(self.r_max);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=self.r_max - i].iter().enumerate() {
                if !b.is_zero() {
                    out.coeffs[i + j] += &(a * b);
                }
            }
        }
        Ok(out)
    }

    /// Multiplies in place by `(1 - x^e q^r)^{-a}`.
    fn mul_by_factor(&mut self, e: E, r: usize, a: &BigInt) {
        let m_max = self.r_max / r;
        // coefficients C(a+m-1, m) of the generalized binomial series
        let mut c = Vec::with_capacity(m_max + 1);
        c.push(BigInt::one());
        for m in 1..=m_max {
            let next = &c[m - 1] * (a + BigInt::from(m - 1)) / BigInt::from(m);
            if next.is_zero() {
                break;
            }
            c.push(next);
        }
        for n in (r..=self.r_max).rev() {
            let mut acc = Poly::zero();
            for (m, cm) in c.iter().enumerate().skip(1) {
                if m * r > n {
                    break;
                }
                let src = &self.coeffs[n - m * r];
                if !src.is_zero() {
                    acc += &src.shift(e.scale(m as i64)).scale(cm);
                }
            }
            self.coeffs[n] += &acc;
        }
    }

    /// Plethystic exponential `prod_{r, e} (1 - x^e q^r)^{-a_{r,e}}`.
    pub fn pleth_exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::usage("plethystic exponential needs a zero constant term"));
        }
        let mut out = Self::one(self.r_max);
        for r in 1..=self.r_max {
            for (e, a) in self.coeffs[r].terms() {
                out.mul_by_factor(e, r, a);
            }
        }
        Ok(out)
    }

    /// Inverse of [`QSeries::pleth_exp`], solved one `q`-degree at a time.
    pub fn pleth_log(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::usage("plethystic logarithm needs constant term 1"));
        }
        let mut out = Self::zero(self.r_max);
        let mut partial = Self::one(self.r_max);
        for r in 1..=self.r_max {
            let a_r = &self.coeffs[r] - &partial.coeffs[r];
            for (e, a) in a_r.terms() {
                partial.mul_by_factor(e, r, a);
            }
            out.coeffs[r] = a_r;
        }
        Ok(out)
    }
}

/// Finite-dimensional bigraded space: `(t-degree, q-degree) -> dimension`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BigradedDims {
    dims: BTreeMap<(i64, u32), u64>,
}

impl BigradedDims {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fails for `q`-degree 0.
    pub fn insert(&mut self, t_deg: i64, q_deg: u32, dim: u64) -> Result<()> {
        if q_deg == 0 {
            return Err(Error::usage("bigraded generators need q-degree >= 1"));
        }
        if dim > 0 {
            *self.dims.entry((t_deg, q_deg)).or_insert(0) += dim;
        }
        Ok(())
    }

    pub fn total_dim(&self) -> u64 {
        self.dims.values().sum()
    }

    /// `sum dim * (-t)^i q^j` truncated at `q^{r_max}`.
    pub fn hilb_neg_t(&self, r_max: usize) -> QSeries<i64> {
        let mut s = QSeries::zero(r_max);
        for (&(i, j), &d) in &self.dims {
            if (j as usize) <= r_max {
                let sign = if i.rem_euclid(2) == 1 { -1 } else { 1 };
                s.coeffs[j as usize].add_term(i, BigInt::from(d) * sign);
            }
        }
        s
    }
}

/// Hilbert series of the free graded-commutative algebra on `dims` (even
/// `t`-degree symmetric, odd `t`-degree exterior), counted monomial by
/// monomial up to `q^{r_max}`, then with `t -> -t`.
pub fn graded_invariant_oracle(dims: &BigradedDims, r_max: usize) -> QSeries<i64> {
    let mut gens = Vec::new();
    for (&(i, j), &d) in &dims.dims {
        for _ in 0..d {
            gens.push((i, j as usize));
        }
    }
    let mut counts: BTreeMap<(i64, usize), u64> = BTreeMap::new();
    count_monomials(&gens, 0, 0, 0, r_max, &mut counts);
    let mut s = QSeries::zero(r_max);
    for ((i, j), n) in counts {
        let sign = if i.rem_euclid(2) == 1 { -1 } else { 1 };
        s.coeffs[j].add_term(i, BigInt::from(n) * sign);
    }
    s
}

fn count_monomials(
    gens: &[(i64, usize)],
    idx: usize,
    t_deg: i64,
    q_deg: usize,
    r_max: usize,
    counts: &mut BTreeMap<(i64, usize), u64>,
) {
    if idx == gens.len() {
        *counts.entry((t_deg, q_deg)).or_insert(0) += 1;
        return;
    }
    let (i, j) = gens[idx];
    let max_power = if i.rem_euclid(2) == 1 { 1 } else { usize::MAX };
    let mut power = 0;
    while power <= max_power && q_deg + power * j <= r_max {
        count_monomials(gens, idx + 1, t_deg + power as i64 * i, q_deg + power * j, r_max, counts);
        power += 1;
    }
}
