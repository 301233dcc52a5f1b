//! Exact Laurent polynomials with arbitrary-precision integer coefficients.
//!
//! A single generic container [`Poly`] is instantiated for one variable `t`
//! ([`LaurentPoly`]) and for two variables `u, v` ([`BiLaurentPoly`]). The
//! arity is part of the type, so mixing the two is a compile error rather
//! than a runtime check.
//!
//! Terms are kept in a sparse exponent map; zero coefficients are never
//! stored.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exponent of a monomial: an integer for one variable, a pair for two.
///
/// The derived `Ord` must be a monomial order (lexicographic here), which
/// exact division relies on.
pub trait Exponent:
    Copy + Ord + Hash + fmt::Debug + Send + Sync + Serialize + DeserializeOwned + 'static
{
    const ZERO: Self;

    fn add(self, other: Self) -> Self;
    fn sub(self, other: Self) -> Self;
    fn scale(self, n: i64) -> Self;
    /// Sum of the components. Truncation and sign twists use this.
    fn total(self) -> i64;
    fn component_min(self, other: Self) -> Self;
    /// Componentwise `self <= other`.
    fn divides(self, other: Self) -> bool;
    fn write_monomial(self, f: &mut fmt::Formatter<'_>) -> fmt::Result;
}

impl Exponent for i64 {
    const ZERO: Self = 0;

    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn scale(self, n: i64) -> Self {
        self * n
    }
    fn total(self) -> i64 {
        self
    }
    fn component_min(self, other: Self) -> Self {
        self.min(other)
    }
    fn divides(self, other: Self) -> bool {
        self <= other
    }
    fn write_monomial(self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_power(f, "t", self)
    }
}

impl Exponent for [i64; 2] {
    const ZERO: Self = [0, 0];

    fn add(self, other: Self) -> Self {
        [self[0] + other[0], self[1] + other[1]]
    }
    fn sub(self, other: Self) -> Self {
        [self[0] - other[0], self[1] - other[1]]
    }
    fn scale(self, n: i64) -> Self {
        [self[0] * n, self[1] * n]
    }
    fn total(self) -> i64 {
        self[0] + self[1]
    }
    fn component_min(self, other: Self) -> Self {
        [self[0].min(other[0]), self[1].min(other[1])]
    }
    fn divides(self, other: Self) -> bool {
        self[0] <= other[0] && self[1] <= other[1]
    }
    fn write_monomial(self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_power(f, "u", self[0])?;
        write_power(f, "v", self[1])
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly<E: Exponent> {
    terms: BTreeMap<E, BigInt>,
}

/// Univariate Laurent polynomial in `t`.
pub type LaurentPoly = Poly<i64>;
/// Bivariate Laurent polynomial in `u, v`; exponent `[p, q]` is `u^p v^q`.
pub type BiLaurentPoly = Poly<[i64; 2]>;

impl<E: Exponent> Poly<E> {
    pub fn zero() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::monomial(E::ZERO, 1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(E::ZERO, c)
    }

    pub fn monomial(e: E, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c.into());
        p
    }

    /// Builds a polynomial from possibly repeated, possibly zero terms.
    pub fn from_terms<C: Into<BigInt>>(terms: impl IntoIterator<Item = (E, C)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c.into());
        }
        p
    }

    pub fn add_term(&mut self, e: E, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.coeff(E::ZERO).is_one()
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (E, &BigInt)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, e: E) -> BigInt {
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<(E, &BigInt)> {
        self.terms.iter().next_back().map(|(e, c)| (*e, c))
    }

    pub fn max_total(&self) -> Option<i64> {
        self.terms.keys().map(|e| e.total()).max()
    }

    pub fn min_total(&self) -> Option<i64> {
        self.terms.keys().map(|e| e.total()).min()
    }

    /// Value at the point where every variable equals 1.
    pub fn sum_coefficients(&self) -> BigInt {
        self.terms.values().sum()
    }

    pub fn all_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    /// Multiplication by the monomial with exponent `e`.
    pub fn shift(&self, e: E) -> Self {
        Poly {
            terms: self.terms.iter().map(|(x, c)| (x.add(e), c.clone())).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Adams operation: every exponent multiplied by `n` (`t -> t^n`).
    pub fn adams(&self, n: u32) -> Self {
        assert!(n >= 1, "Adams operation needs n >= 1");
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.scale(n as i64), c.clone()))
                .collect(),
        }
    }

    /// Substitutes every variable by its negative, i.e. multiplies the
    /// coefficient of each monomial by `(-1)^{total degree}`.
    pub fn negate_vars(&self) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    if e.total().rem_euclid(2) == 1 {
                        (*e, -c)
                    } else {
                        (*e, c.clone())
                    }
                })
                .collect(),
        }
    }

    /// Drops every term of total degree above `max_total`.
    pub fn truncate(&self, max_total: i64) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.total() <= max_total)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    /// Product with all terms of total degree above `max_total` discarded.
    pub fn mul_truncated(&self, other: &Self, max_total: i64) -> Self {
        let mut out = Self::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.add(*eb);
                if e.total() <= max_total {
                    out.add_term(e, ca * cb);
                }
            }
        }
        out
    }

    pub fn div_exact_scalar(&self, d: &BigInt) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::InexactDivision("division by zero scalar".into()));
        }
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let q = c / d;
            if &(&q * d) != c {
                return Err(Error::InexactDivision(format!(
                    "coefficient {c} at {e:?} not divisible by {d}"
                )));
            }
            terms.insert(*e, q);
        }
        Ok(Poly { terms })
    }

    /// Exact division; fails unless the remainder is zero.
    ///
    /// Both operands are shifted to have non-negative exponents, then long
    /// division runs in the lexicographic monomial order.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self> {
        let Some(d_low) = divisor.low_corner() else {
            return Err(Error::InexactDivision("division by the zero polynomial".into()));
        };
        let Some(n_low) = self.low_corner() else {
            return Ok(Self::zero());
        };
        let d = divisor.shift(E::ZERO.sub(d_low));
        let mut rem = self.shift(E::ZERO.sub(n_low));
        let (lead_e, lead_c) = d.leading().map(|(e, c)| (e, c.clone())).expect("nonzero");
        let mut quot = Self::zero();
        while let Some((e, c)) = rem.leading() {
            if !lead_e.divides(e) {
                return Err(Error::InexactDivision(format!(
                    "leading exponent {lead_e:?} does not divide {e:?}"
                )));
            }
            let qc = c / &lead_c;
            if &(&qc * &lead_c) != c {
                return Err(Error::InexactDivision(format!(
                    "leading coefficient {lead_c} does not divide {c}"
                )));
            }
            let qe = e.sub(lead_e);
            let step = d.shift(qe).scale(&qc);
            rem -= &step;
            quot.add_term(qe, qc);
        }
        Ok(quot.shift(n_low.sub(d_low)))
    }

    /// Componentwise minimum over all exponents.
    fn low_corner(&self) -> Option<E> {
        self.terms.keys().copied().reduce(|a, b| a.component_min(b))
    }
}

impl LaurentPoly {
    /// The variable `t`.
    pub fn t() -> Self {
        Self::monomial(1, 1)
    }

    /// `c_0 + c_1 t + c_2 t^2 + ...` from small coefficients.
    pub fn from_coeffs(coeffs: &[i64]) -> Self {
        Self::from_terms(coeffs.iter().enumerate().map(|(i, &c)| (i as i64, c)))
    }

    pub fn degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn low_degree(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Dense coefficient list from `t^0` through the degree. Fails on
    /// negative exponents.
    pub fn to_dense(&self) -> Result<Vec<BigInt>> {
        match self.low_degree() {
            None => Ok(Vec::new()),
            Some(lo) if lo < 0 => Err(Error::usage("not a polynomial: negative exponent")),
            Some(_) => {
                let deg = self.degree().unwrap_or(0);
                Ok((0..=deg).map(|i| self.coeff(i)).collect())
            }
        }
    }

    /// True iff the coefficient of `t^{center-j}` equals that of
    /// `t^{center+j}` for all `j`.
    pub fn is_palindromic(&self, center: i64) -> bool {
        self.is_reflection_symmetric(2 * center)
    }

    /// True iff the coefficient of `t^k` equals that of `t^{sum-k}` for all
    /// `k`. Allows half-integer centers.
    pub fn is_reflection_symmetric(&self, sum: i64) -> bool {
        self.terms.iter().all(|(e, c)| self.terms.get(&(sum - e)) == Some(c))
    }

    /// `a(t + c)`, expanded by Horner's rule. Only defined for polynomials.
    pub fn taylor_shift(&self, c: i64) -> Result<Self> {
        let dense = self.to_dense()?;
        let step = Self::from_terms([(1, BigInt::one()), (0, BigInt::from(c))]);
        let mut acc = Self::zero();
        for coeff in dense.into_iter().rev() {
            acc = &acc * &step;
            acc.add_term(0, coeff);
        }
        Ok(acc)
    }

    pub fn eval(&self, x: i64) -> Result<BigInt> {
        let x = BigInt::from(x);
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            if *e < 0 {
                if x.is_zero() {
                    return Err(Error::usage("evaluation of a Laurent term at 0"));
                }
                if !x.abs().is_one() {
                    return Err(Error::usage("non-integral value of a Laurent term"));
                }
            }
            acc += c * x.pow(e.unsigned_abs() as u32);
        }
        Ok(acc)
    }
}

impl BiLaurentPoly {
    pub fn u() -> Self {
        Self::monomial([1, 0], 1)
    }

    pub fn v() -> Self {
        Self::monomial([0, 1], 1)
    }

    /// Substitutes `u = v = t`.
    pub fn specialize_diagonal(&self) -> LaurentPoly {
        LaurentPoly::from_terms(self.terms.iter().map(|(e, c)| (e[0] + e[1], c.clone())))
    }

    /// Exchanges `u` and `v`.
    pub fn swap_uv(&self) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| ([e[1], e[0]], c.clone()))
                .collect(),
        }
    }

    pub fn is_uv_symmetric(&self) -> bool {
        *self == self.swap_uv()
    }

    /// Embeds a polynomial in `t` as a polynomial in `w = uv`.
    pub fn in_uv(p: &LaurentPoly) -> Self {
        Self::from_terms(p.terms().map(|(e, c)| ([e, e], c.clone())))
    }
}

/// `1 + t + ... + t^{n-1}`.
pub fn p_series(n: u32) -> Result<LaurentPoly> {
    if n == 0 {
        return Err(Error::usage("p(n; t) needs n >= 1"));
    }
    Ok(LaurentPoly::from_terms((0..n as i64).map(|i| (i, 1))))
}

/// Gaussian binomial coefficient `[m choose n]_t`; zero when `n > m`.
pub fn gauss_binomial(m: u32, n: u32) -> LaurentPoly {
    if n > m {
        return LaurentPoly::zero();
    }
    // q-Pascal: [j, i] = [j-1, i-1] + t^i [j-1, i]
    let mut row = vec![LaurentPoly::one()];
    for j in 1..=m as usize {
        let mut next = Vec::with_capacity(j + 1);
        for i in 0..=j {
            let mut entry = if i > 0 {
                row[i - 1].clone()
            } else {
                LaurentPoly::zero()
            };
            if i < j {
                entry += &row[i].shift(i as i64);
            }
            next.push(entry);
        }
        row = next;
    }
    row.swap_remove(n as usize)
}

/// `C(n, k)` as a big integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

// ----- arithmetic operators -----

impl<E: Exponent> AddAssign<&Poly<E>> for Poly<E> {
    fn add_assign(&mut self, rhs: &Poly<E>) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl<E: Exponent> SubAssign<&Poly<E>> for Poly<E> {
    fn sub_assign(&mut self, rhs: &Poly<E>) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, -c);
        }
    }
}

impl<E: Exponent> Add for &Poly<E> {
    type Output = Poly<E>;
    fn add(self, rhs: &Poly<E>) -> Poly<E> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<E: Exponent> Sub for &Poly<E> {
    type Output = Poly<E>;
    fn sub(self, rhs: &Poly<E>) -> Poly<E> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<E: Exponent> Mul for &Poly<E> {
    type Output = Poly<E>;
    fn mul(self, rhs: &Poly<E>) -> Poly<E> {
        let mut out = Poly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea.add(*eb), ca * cb);
            }
        }
        out
    }
}

impl<E: Exponent> Neg for &Poly<E> {
    type Output = Poly<E>;
    fn neg(self) -> Poly<E> {
        Poly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident) => {
        impl<E: Exponent> $tr for Poly<E> {
            type Output = Poly<E>;
            fn $method(self, rhs: Poly<E>) -> Poly<E> {
                (&self).$method(&rhs)
            }
        }
        impl<E: Exponent> $tr<&Poly<E>> for Poly<E> {
            type Output = Poly<E>;
            fn $method(self, rhs: &Poly<E>) -> Poly<E> {
                (&self).$method(rhs)
            }
        }
        impl<E: Exponent> $tr<Poly<E>> for &Poly<E> {
            type Output = Poly<E>;
            fn $method(self, rhs: Poly<E>) -> Poly<E> {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl<E: Exponent> Neg for Poly<E> {
    type Output = Poly<E>;
    fn neg(self) -> Poly<E> {
        -&self
    }
}

// ----- display -----

fn write_power(f: &mut fmt::Formatter<'_>, var: &str, e: i64) -> fmt::Result {
    match e {
        0 => Ok(()),
        1 => write!(f, "{var}"),
        _ => write!(f, "{var}^{e}"),
    }
}

impl<E: Exponent> fmt::Display for Poly<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mag = c.abs();
            let is_const = *e == E::ZERO;
            if is_const || !mag.is_one() {
                write!(f, "{mag}")?;
            }
            e.write_monomial(f)?;
        }
        Ok(())
    }
}

impl<E: Exponent> fmt::Debug for Poly<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

// ----- canonical JSON: [[exponent, "coefficient"], ...] ascending -----

impl<E: Exponent> Serialize for Poly<E> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            seq.serialize_element(&(e, c.to_string()))?;
        }
        seq.end()
    }
}

impl<'de, E: Exponent> Deserialize<'de> for Poly<E> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw: Vec<(E, String)> = Vec::deserialize(deserializer)?;
        let mut terms = BTreeMap::new();
        for (e, s) in raw {
            let c: BigInt = s
                .parse()
                .map_err(|_| D::Error::custom(format!("bad coefficient string {s:?}")))?;
            if terms.insert(e, c).is_some() {
                return Err(D::Error::custom(format!("duplicate exponent {e:?}")));
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(Poly { terms })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t_poly(c: &[i64]) -> LaurentPoly {
        LaurentPoly::from_coeffs(c)
    }

    #[test]
    fn ring_examples() {
        assert_eq!(t_poly(&[1, 1]) * t_poly(&[1, -1]), t_poly(&[1, 0, -1]));
        let laurent = LaurentPoly::from_terms([(-1, 1), (0, 1)]);
        assert_eq!(&laurent * &LaurentPoly::t(), t_poly(&[1, 1]));
        assert_eq!(t_poly(&[1, -1]).pow(4), t_poly(&[1, -4, 6, -4, 1]));
    }

    #[test]
    fn zero_coefficients_are_never_stored() {
        let p = t_poly(&[1, 1]) - t_poly(&[1, 1]);
        assert!(p.is_zero());
        assert_eq!(p.len(), 0);
        assert_eq!(LaurentPoly::from_coeffs(&[0, 0, 3]).len(), 1);
    }

    #[test]
    fn p_series_examples() {
        assert_eq!(p_series(1).unwrap(), LaurentPoly::one());
        assert_eq!(p_series(3).unwrap(), t_poly(&[1, 1, 1]));
        assert_eq!(p_series(2).unwrap().adams(2), t_poly(&[1, 0, 1]));
        assert!(p_series(0).unwrap_err().is_usage());
    }

    #[test]
    fn gauss_binomial_examples() {
        assert_eq!(gauss_binomial(3, 1), t_poly(&[1, 1, 1]));
        for m in 0..6 {
            assert_eq!(gauss_binomial(m, 0), LaurentPoly::one());
        }
        assert_eq!(gauss_binomial(4, 2), t_poly(&[1, 1, 2, 1, 1]));
        assert!(gauss_binomial(2, 3).is_zero());
    }

    /// Oracle: the defining quotient prod (1 - t^{m-i}) / prod (1 - t^{i+1}),
    /// evaluated by exact division.
    #[test]
    fn gauss_binomial_matches_rational_expression() {
        for m in 0..=9u32 {
            for n in 0..=m {
                let mut num = LaurentPoly::one();
                let mut den = LaurentPoly::one();
                for i in 0..n as i64 {
                    num = &num * &LaurentPoly::from_terms([(0, 1), (m as i64 - i, -1)]);
                    den = &den * &LaurentPoly::from_terms([(0, 1), (i + 1, -1)]);
                }
                assert_eq!(num.div_exact(&den).unwrap(), gauss_binomial(m, n), "m={m} n={n}");
            }
        }
    }

    #[test]
    fn gauss_binomial_is_symmetric() {
        for m in 0..=10u32 {
            for n in 0..=m {
                let gb = gauss_binomial(m, n);
                assert!(gb.is_reflection_symmetric((n * (m - n)) as i64));
                assert_eq!(gb.sum_coefficients(), binomial(m as u64, n as u64));
            }
        }
    }

    #[test]
    fn adams_examples() {
        assert_eq!(t_poly(&[1, 1]).adams(2), t_poly(&[1, 0, 1]));
        assert_eq!(
            LaurentPoly::monomial(-1, 1).adams(3),
            LaurentPoly::monomial(-3, 1)
        );
    }

    #[test]
    fn palindromic_examples() {
        assert!(t_poly(&[1, 2, 1]).is_palindromic(1));
        assert!(!t_poly(&[1, 0, 0, 1]).is_palindromic(1));
        for g in 2..6 {
            assert!(t_poly(&[1, 1]).pow(2 * g).is_palindromic(g as i64));
        }
    }

    #[test]
    fn diagonal_examples() {
        let one = BiLaurentPoly::one();
        let a = (&one - &BiLaurentPoly::u()) * (&one - &BiLaurentPoly::v());
        assert_eq!(a.specialize_diagonal(), t_poly(&[1, -1]).pow(2));
        let uv = BiLaurentPoly::u() * BiLaurentPoly::v();
        assert_eq!(uv.specialize_diagonal(), LaurentPoly::monomial(2, 1));
        for g in 2..5u32 {
            let h = (&one - &BiLaurentPoly::u()).pow(g) * (&one - &BiLaurentPoly::v()).pow(g);
            assert_eq!(h.specialize_diagonal(), t_poly(&[1, -1]).pow(2 * g));
        }
    }

    #[test]
    fn exact_division() {
        let a = t_poly(&[1, 1, 1]);
        let b = LaurentPoly::from_terms([(-2, 3), (0, -1), (1, 5)]);
        assert_eq!((&a * &b).div_exact(&a).unwrap(), b);
        assert!(matches!(
            t_poly(&[1, 0, 1]).div_exact(&t_poly(&[1, 1])),
            Err(Error::InexactDivision(_))
        ));
        let x = BiLaurentPoly::from_terms([([0, 0], 1), ([1, 1], 1)]);
        let y = BiLaurentPoly::from_terms([([-1, 2], 2), ([3, 0], -1), ([0, 0], 7)]);
        assert_eq!((&x * &y).div_exact(&x).unwrap(), y);
        assert!((BiLaurentPoly::u() + BiLaurentPoly::one())
            .div_exact(&(BiLaurentPoly::v() + BiLaurentPoly::one()))
            .is_err());
    }

    #[test]
    fn taylor_shift_matches_expansion() {
        // (t+1)^3 - 1 evaluated through a shift of t^3 - 1
        let p = t_poly(&[-1, 0, 0, 1]);
        assert_eq!(p.taylor_shift(1).unwrap(), t_poly(&[0, 3, 3, 1]));
        assert_eq!(p.taylor_shift(1).unwrap().taylor_shift(-1).unwrap(), p);
        assert!(LaurentPoly::monomial(-1, 1).taylor_shift(1).is_err());
    }

    #[test]
    fn json_form() {
        let p = LaurentPoly::from_terms([(-1, 2), (3, -5)]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"[[-1,"2"],[3,"-5"]]"#);
        assert_eq!(serde_json::from_str::<LaurentPoly>(&s).unwrap(), p);
        let big = LaurentPoly::monomial(0, BigInt::from(u64::MAX) * 10);
        let s = serde_json::to_string(&big).unwrap();
        assert_eq!(s, r#"[[0,"184467440737095516150"]]"#);
        let h = BiLaurentPoly::from_terms([([1, 0], -1), ([0, 0], 1)]);
        assert_eq!(serde_json::to_string(&h).unwrap(), r#"[[[0,0],"1"],[[1,0],"-1"]]"#);
        assert!(serde_json::from_str::<LaurentPoly>(r#"[[1,"2"],[1,"3"]]"#).is_err());
        assert!(serde_json::from_str::<LaurentPoly>(r#"[[1,"x"]]"#).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(t_poly(&[1, -2, 0, 1]).to_string(), "1 - 2t + t^3");
        assert_eq!(LaurentPoly::monomial(-2, -3).to_string(), "-3t^-2");
        assert_eq!((BiLaurentPoly::u() * BiLaurentPoly::v()).to_string(), "uv");
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec((-4i64..6, -9i64..10), 0..6).prop_map(LaurentPoly::from_terms)
    }

    fn arb_bipoly() -> impl Strategy<Value = BiLaurentPoly> {
        prop::collection::vec(((-2i64..3, -2i64..3), -5i64..6), 0..5)
            .prop_map(|v| BiLaurentPoly::from_terms(v.into_iter().map(|((p, q), c)| ([p, q], c))))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
        }

        #[test]
        fn bivariate_ring_axioms(a in arb_bipoly(), b in arb_bipoly(), c in arb_bipoly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn adams_composes(a in arb_poly(), m in 1u32..4, n in 1u32..4) {
            prop_assert_eq!(a.adams(m).adams(n), a.adams(m * n));
        }

        #[test]
        fn adams_is_multiplicative(a in arb_poly(), b in arb_poly(), n in 1u32..4) {
            prop_assert_eq!((&a * &b).adams(n), &a.adams(n) * &b.adams(n));
        }

        #[test]
        fn division_inverts_multiplication(a in arb_poly(), b in arb_poly()) {
            prop_assume!(!b.is_zero());
            prop_assert_eq!((&a * &b).div_exact(&b).unwrap(), a);
        }

        #[test]
        fn bivariate_division_inverts_multiplication(a in arb_bipoly(), b in arb_bipoly()) {
            prop_assume!(!b.is_zero());
            prop_assert_eq!((&a * &b).div_exact(&b).unwrap(), a);
        }

        #[test]
        fn json_roundtrip(a in arb_poly(), b in arb_bipoly()) {
            let s = serde_json::to_string(&a).unwrap();
            prop_assert_eq!(serde_json::from_str::<LaurentPoly>(&s).unwrap(), a);
            let s = serde_json::to_string(&b).unwrap();
            prop_assert_eq!(serde_json::from_str::<BiLaurentPoly>(&s).unwrap(), b);
        }

        #[test]
        fn p_series_at_one(n in 1u32..40) {
            prop_assert_eq!(p_series(n).unwrap().sum_coefficients(), BigInt::from(n));
        }
    }
}
