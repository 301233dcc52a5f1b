//! Local data attached to a stratum of type `rho`: fiber polynomials
//! `f(rho; t)`, stalk polynomials `g(rho; t)` and the Hilbert functions of
//! the local systems `L_rho`, each available through more than one
//! algorithm.

use std::collections::HashMap;
use std::sync::RwLock;

use crate::combinat::{compose, d_rho, set_decompositions, Partition};
use crate::error::{Error, Result};
use crate::exactpoly::{p_series, LaurentPoly};
use crate::graphkernel::g_via_graphs;
use crate::Genus;

type Memo = RwLock<HashMap<Partition, LaurentPoly>>;

/// Memoizing evaluator for one genus. Safe to share between threads:
/// concurrent writers of the same key store equal values.
#[derive(Debug)]
pub struct LocalContext {
    genus: Genus,
    fiber: Memo,
    stalk: Memo,
    lhilb: Memo,
}

fn lookup(memo: &Memo, rho: &Partition) -> Option<LaurentPoly> {
    memo.read().expect("memo lock").get(rho).cloned()
}

fn store(memo: &Memo, rho: &Partition, value: &LaurentPoly) {
    memo.write().expect("memo lock").insert(rho.clone(), value.clone());
}

impl LocalContext {
    pub fn new(genus: Genus) -> Self {
        LocalContext {
            genus,
            fiber: Memo::default(),
            stalk: Memo::default(),
            lhilb: Memo::default(),
        }
    }

    pub fn genus(&self) -> Genus {
        self.genus
    }

    /// Fiber polynomial by inclusion-exclusion over nonempty `J ⊆ {1..k}`:
    ///
    /// ```text
    /// f(rho) = sum_J (-1)^{|J|-1} f(rho_{J^c}) prod_{j in J} p(r_j r_{J^c} (g-1) + r_j)
    /// ```
    pub fn f_recursive(&self, rho: &Partition) -> Result<LaurentPoly> {
        if rho.is_empty() {
            return Ok(LaurentPoly::one());
        }
        if let Some(hit) = lookup(&self.fiber, rho) {
            return Ok(hit);
        }
        let k = rho.len();
        let parts = rho.parts();
        let gm1 = self.genus.gm1() as u64;
        let mut total = LaurentPoly::zero();
        for subset in 1u32..(1 << k) {
            let complement: Vec<usize> = (0..k).filter(|i| subset >> i & 1 == 0).collect();
            let r_comp: u64 = complement.iter().map(|&i| parts[i] as u64).sum();
            let mut term = self.f_recursive(&rho.select(complement))?;
            for j in (0..k).filter(|j| subset >> j & 1 == 1) {
                let r_j = parts[j] as u64;
                term = &term * &p_series(checked_u32(r_j * r_comp * gm1 + r_j)?)?;
            }
            if subset.count_ones() % 2 == 1 {
                total += &term;
            } else {
                total -= &term;
            }
        }
        store(&self.fiber, rho, &total);
        Ok(total)
    }

    /// Stalk polynomial `g(rho; t)` from the graph model, rooted at the
    /// first vertex.
    pub fn g(&self, rho: &Partition) -> Result<LaurentPoly> {
        if let Some(hit) = lookup(&self.stalk, rho) {
            return Ok(hit);
        }
        let value = g_via_graphs(rho, self.genus, 0)?;
        store(&self.stalk, rho, &value);
        Ok(value)
    }

    /// `t^{2 d(rho)} prod p(r_i; t^2)`.
    pub fn hilb_l_closed(&self, rho: &Partition) -> Result<LaurentPoly> {
        let mut out = LaurentPoly::monomial(2 * d_rho(rho, self.genus) as i64, 1);
        for &r in rho.parts() {
            out = &out * &p_series(r)?.adams(2);
        }
        Ok(out)
    }

    /// Subtraction algorithm: the fiber polynomial `f(rho; t^2)` minus the
    /// contributions `Hilb(L_mu) prod_j g(rho|lambda_j; t^2)` of every
    /// coarser stratum `mu = lambda o rho`, `lambda` ranging over set
    /// decompositions other than the one into singletons.
    pub fn hilb_l_subtraction(&self, rho: &Partition) -> Result<LaurentPoly> {
        if rho.is_empty() {
            return Err(Error::usage("Hilb(L) needs a nonempty partition"));
        }
        if let Some(hit) = lookup(&self.lhilb, rho) {
            return Ok(hit);
        }
        let mut out = self.f_recursive(rho)?.adams(2);
        for lambda in set_decompositions(rho.len())? {
            if lambda.is_all_singletons() {
                continue;
            }
            let (mu, restricted) = compose(&lambda, rho)?;
            let mut term = self.hilb_l_subtraction(&mu)?;
            for block in &restricted {
                term = &term * &self.g(block)?.adams(2);
            }
            out -= &term;
        }
        if !out.all_nonnegative() {
            return Err(Error::Invariant(format!(
                "subtraction for Hilb(L_[{rho}]) produced negative coefficients: {out}"
            )));
        }
        store(&self.lhilb, rho, &out);
        Ok(out)
    }

    /// Right-hand side of the stratification identity
    ///
    /// ```text
    /// f(rho; t) = sum_lambda t^{d(lambda o rho)} prod_i g(rho|lambda_i; t) p(r_{lambda_i}; t)
    /// ```
    ///
    /// summed over all set decompositions `lambda` of `{1..k}`.
    pub fn f_via_identity(&self, rho: &Partition) -> Result<LaurentPoly> {
        if rho.is_empty() {
            return Err(Error::usage("f needs a nonempty partition"));
        }
        let mut out = LaurentPoly::zero();
        for lambda in set_decompositions(rho.len())? {
            let (mu, restricted) = compose(&lambda, rho)?;
            let mut term = LaurentPoly::monomial(d_rho(&mu, self.genus) as i64, 1);
            for block in &restricted {
                term = &term * &self.g(block)?;
                term = &term * &p_series(block.rank())?;
            }
            out += &term;
        }
        Ok(out)
    }

    /// Whether the recursion and the stratification identity agree.
    pub fn f_cross_identity(&self, rho: &Partition) -> Result<bool> {
        Ok(self.f_recursive(rho)? == self.f_via_identity(rho)?)
    }
}

fn checked_u32(n: u64) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::usage(format!("exponent {n} too large")))
}

pub fn f_recursive(rho: &Partition, g: Genus) -> Result<LaurentPoly> {
    LocalContext::new(g).f_recursive(rho)
}

pub fn hilb_l_closed(rho: &Partition, g: Genus) -> Result<LaurentPoly> {
    LocalContext::new(g).hilb_l_closed(rho)
}

pub fn hilb_l_subtraction(rho: &Partition, g: Genus) -> Result<LaurentPoly> {
    LocalContext::new(g).hilb_l_subtraction(rho)
}

pub fn f_cross_identity(rho: &Partition, g: Genus) -> Result<bool> {
    LocalContext::new(g).f_cross_identity(rho)
}

/// Poincaré polynomial of an iterated projective bundle whose `i`-th step
/// has fiber `P^{n_i - 1}`, `n_i = r_i (r_1 + ... + r_{i-1}) (g-1) + r_i`:
/// the product of `(t^{2 n_i} - 1) / (t^2 - 1)`.
pub fn tower_poincare(ranks: &[u32], g: Genus) -> Result<LaurentPoly> {
    if ranks.contains(&0) {
        return Err(Error::usage("tower ranks must be positive"));
    }
    let t2_minus_1 = LaurentPoly::from_terms([(2, 1), (0, -1)]);
    let mut out = LaurentPoly::one();
    let mut before = 0u64;
    for &r in ranks {
        let n = r as u64 * before * g.gm1() as u64 + r as u64;
        let numerator = LaurentPoly::from_terms([(2 * n as i64, 1), (0, -1)]);
        let step = numerator
            .div_exact(&t2_minus_1)
            .map_err(|e| Error::Invariant(format!("tower step for rank {r}: {e}")))?;
        out = &out * &step;
        before += r as u64;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::partitions_of;
    use crate::graphkernel::f_via_graphs;

    fn part(p: &[u32]) -> Partition {
        Partition::new(p.to_vec()).unwrap()
    }

    fn genus(g: u32) -> Genus {
        Genus::new(g).unwrap()
    }

    fn t(c: &[i64]) -> LaurentPoly {
        LaurentPoly::from_coeffs(c)
    }

    #[test]
    fn f_recursive_examples() {
        assert_eq!(f_recursive(&part(&[1, 1]), genus(2)).unwrap(), t(&[1, 2]));
        for g in 2..7 {
            for r in 1..6 {
                assert_eq!(f_recursive(&part(&[r]), genus(g)).unwrap(), p_series(r).unwrap());
            }
            let expected = &p_series(g).unwrap().scale(&2.into()) - &LaurentPoly::one();
            assert_eq!(f_recursive(&part(&[1, 1]), genus(g)).unwrap(), expected);
        }
    }

    /// The ring with generators `x_1, x_2` and relations `x_1 x_2`,
    /// `x_1^g`, `x_2^g` has the monomial basis `1, x_i^a` for `0 < a < g`.
    #[test]
    fn rank_two_fiber_matches_monomial_count() {
        for g in 2..7 {
            let mut counts = vec![0i64; g as usize];
            for a in 0..g as usize {
                for b in 0..g as usize {
                    if a == 0 || b == 0 {
                        counts[a + b] += 1;
                    }
                }
            }
            assert_eq!(f_recursive(&part(&[1, 1]), genus(g)).unwrap(), t(&counts));
        }
    }

    #[test]
    fn tower_examples() {
        assert_eq!(tower_poincare(&[1, 1], genus(2)).unwrap(), t(&[1, 0, 1]));
        for r in 1..5 {
            assert_eq!(
                tower_poincare(&[r], genus(3)).unwrap(),
                p_series(r).unwrap().adams(2)
            );
        }
        for g in 2..6 {
            let rho = part(&[1, 1, 1]);
            let tower = tower_poincare(&[1, 1, 1], genus(g)).unwrap();
            let d = d_rho(&rho, genus(g)) as i64;
            assert_eq!(tower.degree(), Some(2 * (d + 3 - 3)));
        }
    }

    #[test]
    fn hilb_examples() {
        let ctx2 = LocalContext::new(genus(2));
        let ctx3 = LocalContext::new(genus(3));
        assert_eq!(ctx2.hilb_l_closed(&part(&[1, 1])).unwrap(), t(&[0, 0, 1]));
        assert_eq!(ctx2.hilb_l_subtraction(&part(&[1, 1])).unwrap(), t(&[0, 0, 1]));
        assert_eq!(ctx3.hilb_l_subtraction(&part(&[1, 1])).unwrap(), t(&[0, 0, 0, 0, 1]));
        assert_eq!(ctx2.hilb_l_closed(&part(&[2, 1])).unwrap(), t(&[0, 0, 0, 0, 1, 0, 1]));
        for r in 1..5 {
            let expected = p_series(r).unwrap().adams(2);
            assert_eq!(ctx3.hilb_l_closed(&part(&[r])).unwrap(), expected);
            assert_eq!(ctx3.hilb_l_subtraction(&part(&[r])).unwrap(), expected);
        }
    }

    #[test]
    fn identity_examples() {
        let ctx = LocalContext::new(genus(2));
        assert_eq!(ctx.f_via_identity(&part(&[1, 1])).unwrap(), t(&[1, 2]));
        for g in 2..5 {
            for r in 1..5 {
                assert!(f_cross_identity(&part(&[r]), genus(g)).unwrap());
            }
        }
    }

    #[test]
    fn recursion_matches_graphs_small() {
        for g in 2..=3 {
            let ctx = LocalContext::new(genus(g));
            for r in 1..=3 {
                for rho in partitions_of(r).unwrap() {
                    assert_eq!(ctx.f_recursive(&rho).unwrap(), f_via_graphs(&rho, genus(g)).unwrap());
                }
            }
        }
    }

    #[test]
    fn hilb_is_palindromic() {
        for g in 2..=4 {
            let ctx = LocalContext::new(genus(g));
            for r in 1..=5 {
                for rho in partitions_of(r).unwrap() {
                    let h = ctx.hilb_l_closed(&rho).unwrap();
                    let d = d_rho(&rho, genus(g)) as i64;
                    let shift: i64 = rho.parts().iter().map(|&x| x as i64 - 1).sum();
                    assert!(h.is_palindromic(2 * d + shift), "{rho:?} g={g}");
                }
            }
        }
    }

    fn permutations(items: &[u32]) -> Vec<Vec<u32>> {
        if items.len() <= 1 {
            return vec![items.to_vec()];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.to_vec();
            let head = rest.remove(i);
            for mut tail in permutations(&rest) {
                tail.insert(0, head);
                out.push(tail);
            }
        }
        out
    }

    #[test]
    fn fiber_injects_into_towers() {
        for g in 2..=3 {
            let ctx = LocalContext::new(genus(g));
            for r in 1..=5 {
                for rho in partitions_of(r).unwrap() {
                    let f2 = ctx.f_recursive(&rho).unwrap().adams(2);
                    let mut towers = LaurentPoly::zero();
                    for order in permutations(rho.parts()) {
                        towers += &tower_poincare(&order, genus(g)).unwrap();
                    }
                    let gap = &towers - &f2;
                    assert!(gap.all_nonnegative(), "{rho:?} g={g}: {gap}");
                }
            }
        }
    }

    #[test]
    fn context_is_shareable() {
        fn assert_sync<T: Sync + Send>() {}
        assert_sync::<LocalContext>();
        let ctx = LocalContext::new(genus(2));
        let rho = part(&[2, 1, 1]);
        let results: Vec<LaurentPoly> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..4).map(|_| s.spawn(|| ctx.hilb_l_subtraction(&rho).unwrap())).collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        assert!(results.windows(2).all(|w| w[0] == w[1]));
    }
}
