//! Cohomology of the smooth moduli spaces `M_1(r)` of stable bundles of
//! rank `r` and degree 1, computed by the Harder-Narasimhan recursion, and
//! tables of such polynomials (built in or read from disk).

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactpoly::{p_series, BiLaurentPoly, Exponent, LaurentPoly, Poly};
use crate::{moduli_dim, Genus};

/// Variable conventions for the HN recursion: the stack series of all
/// bundles of rank `n` is
///
/// ```text
/// prod_{k=1}^{n} odd(k) / ( prod_{k=1}^{n-1} (1 - x^{2k})^2 (1 - x^{2n}) )
/// ```
///
/// and an HN stratum of codimension `c` is shifted by `x^{2c}`.
trait HnModel {
    type E: Exponent;
    fn odd_factor(k: i64, g: Genus) -> Poly<Self::E>;
    /// Exponent of `x^{2k}`.
    fn even(k: i64) -> Self::E;
}

/// Poincaré series in `t`.
struct Betti;

impl HnModel for Betti {
    type E = i64;
    fn odd_factor(k: i64, g: Genus) -> LaurentPoly {
        LaurentPoly::from_terms([(0, 1), (2 * k - 1, 1)]).pow(2 * g.get())
    }
    fn even(k: i64) -> i64 {
        2 * k
    }
}

/// Signed Hodge series in `u, v`; its diagonal is the Poincaré series in
/// `-t`.
struct Hodge;

impl HnModel for Hodge {
    type E = [i64; 2];
    fn odd_factor(k: i64, g: Genus) -> BiLaurentPoly {
        let a = BiLaurentPoly::from_terms([([0, 0], 1), ([k, k - 1], -1)]);
        let b = BiLaurentPoly::from_terms([([0, 0], 1), ([k - 1, k], -1)]);
        (&a * &b).pow(g.get())
    }
    fn even(k: i64) -> [i64; 2] {
        [k, k]
    }
}

/// One HN type: pieces `(rank, degree)` with strictly decreasing slopes.
type HnType = Vec<(i64, i64)>;

struct HnSolver<M: HnModel> {
    genus: Genus,
    /// Terms of total degree above this are discarded.
    trunc: i64,
    all: HashMap<i64, Poly<M::E>>,
    semistable: HashMap<(i64, i64), Poly<M::E>>,
}

impl<M: HnModel> HnSolver<M> {
    fn new(genus: Genus, trunc: i64) -> Self {
        HnSolver {
            genus,
            trunc,
            all: HashMap::new(),
            semistable: HashMap::new(),
        }
    }

    fn geometric(&self, step: M::E) -> Poly<M::E> {
        let len = step.total();
        Poly::from_terms((0..=self.trunc / len).map(|j| (step.scale(j), 1)))
    }

    fn all_bundles(&mut self, n: i64) -> Poly<M::E> {
        if let Some(hit) = self.all.get(&n) {
            return hit.clone();
        }
        let mut out = Poly::one();
        for k in 1..=n {
            out = out.mul_truncated(&M::odd_factor(k, self.genus), self.trunc);
        }
        for k in 1..=n {
            let geo = self.geometric(M::even(k));
            out = out.mul_truncated(&geo, self.trunc);
            if k < n {
                out = out.mul_truncated(&geo, self.trunc);
            }
        }
        self.all.insert(n, out.clone());
        out
    }

    fn codim(&self, pieces: &[(i64, i64)]) -> i64 {
        let mut c = 0;
        for i in 0..pieces.len() {
            for j in i + 1..pieces.len() {
                let (ni, di) = pieces[i];
                let (nj, dj) = pieces[j];
                c += di * nj - dj * ni + self.genus.gm1() * ni * nj;
            }
        }
        c
    }

    /// Stack series of semistable bundles of rank `n`, degree `d`. Depends on
    /// `d` only modulo `n`.
    fn semistable(&mut self, n: i64, d: i64) -> Poly<M::E> {
        let d = d.rem_euclid(n);
        if let Some(hit) = self.semistable.get(&(n, d)) {
            return hit.clone();
        }
        let mut out = self.all_bundles(n);
        let mut types = Vec::new();
        self.collect_types(&mut Vec::new(), n, d, &mut types);
        for (pieces, c) in types {
            let budget = self.trunc - 2 * c;
            let mut term = Poly::one();
            for &(ni, di) in &pieces {
                let factor = self.semistable(ni, di);
                term = term.mul_truncated(&factor, budget);
            }
            out -= &term.shift(M::even(c));
        }
        self.semistable.insert((n, d), out.clone());
        out
    }

    /// Appends every HN type with at least two pieces, total rank `n`,
    /// total degree `d` and codimension small enough to matter.
    ///
    /// `prefix` holds the pieces chosen so far; `(rest_n, rest_d)` what is
    /// left. Treating the rest as one block underestimates the codimension
    /// of every refinement, and that estimate grows with the degree of the
    /// next piece, which bounds the otherwise infinite degree range.
    fn collect_types(&self, prefix: &mut HnType, rest_n: i64, rest_d: i64, out: &mut Vec<(HnType, i64)>) {
        let half = self.trunc / 2;
        let prev = prefix.last().copied();
        if let Some((pn, pd)) = prev {
            if rest_d * pn < pd * rest_n {
                prefix.push((rest_n, rest_d));
                let c = self.codim(prefix);
                if c <= half {
                    out.push((prefix.clone(), c));
                }
                prefix.pop();
            }
        }
        for m in 1..rest_n {
            let mut e = (rest_d * m).div_euclid(rest_n) + 1;
            loop {
                if let Some((pn, pd)) = prev {
                    if e * pn >= pd * m {
                        break;
                    }
                }
                prefix.push((m, e));
                prefix.push((rest_n - m, rest_d - e));
                let bound = self.codim(prefix);
                prefix.pop();
                if bound > half {
                    prefix.pop();
                    break;
                }
                self.collect_types(prefix, rest_n - m, rest_d - e, out);
                prefix.pop();
                e += 1;
            }
        }
    }

    /// `(1 - x^2) * semistable(r, 1)`, checked to be a polynomial of top
    /// degree at most `top`.
    fn coprime(&mut self, r: i64, top: i64) -> Result<Poly<M::E>> {
        let ss = self.semistable(r, 1);
        let one_minus = Poly::from_terms([(M::E::ZERO, 1), (M::even(1), -1)]);
        let full = ss.mul_truncated(&one_minus, self.trunc);
        let result = full.truncate(top);
        if result != full {
            return Err(Error::Invariant(format!(
                "HN series for rank {r} has nonzero terms between degree {top} and {}",
                self.trunc
            )));
        }
        Ok(result)
    }
}

fn check_rank(r: u32) -> Result<i64> {
    if r == 0 {
        return Err(Error::usage("rank must be at least 1"));
    }
    Ok(r as i64)
}

/// Truncation degree for rank `r`: a few degrees past the top so that a
/// nonvanishing tail is detected.
fn hn_truncation(r: u32, g: Genus) -> i64 {
    2 * moduli_dim(r, g) + 4
}

/// Poincaré polynomial of `M_1(r)`.
pub fn hn_poincare_m1(r: u32, g: Genus) -> Result<LaurentPoly> {
    let n = check_rank(r)?;
    let mut solver = HnSolver::<Betti>::new(g, hn_truncation(r, g));
    solver.coprime(n, 2 * moduli_dim(r, g))
}

/// Signed Hodge polynomial `sum (-1)^{p+q} h^{p,q} u^p v^q` of `M_1(r)`,
/// checked against [`hn_poincare_m1`] on the diagonal.
pub fn hn_hodge_m1(r: u32, g: Genus) -> Result<BiLaurentPoly> {
    let n = check_rank(r)?;
    let mut solver = HnSolver::<Hodge>::new(g, hn_truncation(r, g));
    let hodge = solver.coprime(n, 2 * moduli_dim(r, g))?;
    let betti = hn_poincare_m1(r, g)?;
    if hodge.specialize_diagonal() != betti.negate_vars() {
        return Err(Error::Invariant(format!(
            "Hodge polynomial of M_1({r}) does not specialize to its Poincaré polynomial"
        )));
    }
    Ok(hodge)
}

/// Poincaré polynomial of the parabolic space, a `P^{r-1}`-bundle over
/// `M_1(r)`.
pub fn parabolic_poincare(r: u32, g: Genus) -> Result<LaurentPoly> {
    Ok(&hn_poincare_m1(r, g)? * &p_series(r)?.adams(2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "builtin-HN")]
    BuiltinHn,
    #[serde(rename = "user-file")]
    UserFile,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothEntry {
    pub betti: LaurentPoly,
    /// Signed Hodge polynomial, when known.
    pub hodge: Option<BiLaurentPoly>,
    pub provenance: Provenance,
}

/// Poincaré (and optionally signed Hodge) polynomials of `M_1(r)` for one
/// genus, keyed by rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothTable {
    genus: Genus,
    entries: BTreeMap<u32, SmoothEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryKind {
    Betti,
    Hodge,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    schema_version: u32,
    genus: u32,
    entries: Vec<FileEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileEntry {
    rank: u32,
    kind: EntryKind,
    poly: serde_json::Value,
}

pub const SMOOTH_SCHEMA_VERSION: u32 = 1;

impl SmoothTable {
    pub fn empty(genus: Genus) -> Self {
        SmoothTable {
            genus,
            entries: BTreeMap::new(),
        }
    }

    /// HN values for ranks `1..=r_max`, with Hodge polynomials if asked.
    pub fn builtin(genus: Genus, r_max: u32, hodge: bool) -> Result<Self> {
        let mut table = Self::empty(genus);
        for r in 1..=r_max {
            let entry = SmoothEntry {
                betti: hn_poincare_m1(r, genus)?,
                hodge: if hodge { Some(hn_hodge_m1(r, genus)?) } else { None },
                provenance: Provenance::BuiltinHn,
            };
            table.entries.insert(r, entry);
        }
        Ok(table)
    }

    pub fn genus(&self) -> Genus {
        self.genus
    }

    pub fn entries(&self) -> &BTreeMap<u32, SmoothEntry> {
        &self.entries
    }

    pub fn get(&self, rank: u32) -> Option<&SmoothEntry> {
        self.entries.get(&rank)
    }

    pub fn betti(&self, rank: u32) -> Result<&LaurentPoly> {
        self.get(rank)
            .map(|e| &e.betti)
            .ok_or_else(|| Error::usage(format!("smooth table has no entry for rank {rank}")))
    }

    pub fn hodge(&self, rank: u32) -> Result<&BiLaurentPoly> {
        self.get(rank)
            .and_then(|e| e.hodge.as_ref())
            .ok_or_else(|| Error::usage(format!("smooth table has no Hodge entry for rank {rank}")))
    }

    /// Entries of `user` replace whole entries (Betti and Hodge together) of
    /// `self` rank by rank.
    pub fn overlay(&mut self, user: &SmoothTable) -> Result<()> {
        if user.genus != self.genus {
            return Err(Error::usage(format!(
                "smooth table is for genus {}, expected {}",
                user.genus, self.genus
            )));
        }
        for (&r, entry) in &user.entries {
            self.entries.insert(r, entry.clone());
        }
        Ok(())
    }

    /// Replaces the Betti polynomial of one rank without validation and
    /// drops its Hodge polynomial.
    pub fn set_betti_unchecked(&mut self, rank: u32, betti: LaurentPoly) {
        self.entries.insert(
            rank,
            SmoothEntry {
                betti,
                hodge: None,
                provenance: Provenance::UserFile,
            },
        );
    }

    /// Validates and inserts an entry.
    pub fn insert(&mut self, rank: u32, entry: SmoothEntry) -> Result<()> {
        validate_entry(rank, self.genus, &entry)?;
        self.entries.insert(rank, entry);
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut entries = Vec::new();
        for (&rank, e) in &self.entries {
            entries.push(FileEntry {
                rank,
                kind: EntryKind::Betti,
                poly: serde_json::to_value(&e.betti)?,
            });
            if let Some(h) = &e.hodge {
                entries.push(FileEntry {
                    rank,
                    kind: EntryKind::Hodge,
                    poly: serde_json::to_value(h)?,
                });
            }
        }
        let file = TableFile {
            schema_version: SMOOTH_SCHEMA_VERSION,
            genus: self.genus.get(),
            entries,
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    /// Parses and validates the JSON table format.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: TableFile = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        if file.schema_version != SMOOTH_SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported schema_version {} (expected {SMOOTH_SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        let genus = Genus::new(file.genus).map_err(|e| Error::Schema(e.to_string()))?;
        let mut betti: BTreeMap<u32, LaurentPoly> = BTreeMap::new();
        let mut hodge: BTreeMap<u32, BiLaurentPoly> = BTreeMap::new();
        for entry in file.entries {
            if entry.rank == 0 {
                return Err(Error::Schema("rank must be at least 1".into()));
            }
            let duplicate = match entry.kind {
                EntryKind::Betti => {
                    let p = serde_json::from_value(entry.poly).map_err(|e| Error::Ingestion {
                        rank: entry.rank,
                        check: format!("schema: {e}"),
                    })?;
                    betti.insert(entry.rank, p).is_some()
                }
                EntryKind::Hodge => {
                    let p = serde_json::from_value(entry.poly).map_err(|e| Error::Ingestion {
                        rank: entry.rank,
                        check: format!("schema: {e}"),
                    })?;
                    hodge.insert(entry.rank, p).is_some()
                }
            };
            if duplicate {
                return Err(Error::Ingestion {
                    rank: entry.rank,
                    check: format!("schema: duplicate {:?} entry", entry.kind),
                });
            }
        }
        let mut table = SmoothTable::empty(genus);
        let ranks: std::collections::BTreeSet<u32> = betti.keys().chain(hodge.keys()).copied().collect();
        for rank in ranks {
            let h = hodge.remove(&rank);
            let b = match (betti.remove(&rank), &h) {
                (Some(b), _) => b,
                (None, Some(h)) => h.specialize_diagonal().negate_vars(),
                (None, None) => unreachable!("rank came from one of the maps"),
            };
            table.insert(
                rank,
                SmoothEntry {
                    betti: b,
                    hodge: h,
                    provenance: Provenance::UserFile,
                },
            )?;
        }
        Ok(table)
    }
}

fn validate_entry(rank: u32, g: Genus, entry: &SmoothEntry) -> Result<()> {
    let fail = |check: &str| {
        Err(Error::Ingestion {
            rank,
            check: check.to_string(),
        })
    };
    let dim = moduli_dim(rank, g);
    let b = &entry.betti;
    if !b.all_nonnegative() || b.low_degree().is_some_and(|d| d < 0) {
        return fail("positivity: coefficients and exponents must be nonnegative");
    }
    if b.coeff(0) != 1.into() {
        return fail("constant term must be 1");
    }
    if b.degree() != Some(2 * dim) {
        return fail(&format!("degree must be {}", 2 * dim));
    }
    if !b.is_palindromic(dim) {
        return fail(&format!("palindromicity about {dim}"));
    }
    if let Some(h) = &entry.hodge {
        if !h.is_uv_symmetric() {
            return fail("u-v symmetry of the Hodge polynomial");
        }
        if h.specialize_diagonal() != b.negate_vars() {
            return fail("diagonal consistency: Hodge polynomial at u=v=t must equal the Betti polynomial at -t");
        }
    }
    Ok(())
}

/// Reads a table in the JSON format
/// `{"schema_version":1,"genus":g,"entries":[{"rank":r,"kind":"betti"|"hodge","poly":...}]}`.
/// Hodge entries hold signed Hodge polynomials.
pub fn load_smooth_table(path: &Path) -> Result<SmoothTable> {
    let text = std::fs::read_to_string(path)?;
    SmoothTable::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::binomial;

    fn genus(g: u32) -> Genus {
        Genus::new(g).unwrap()
    }

    fn jacobian(g: u32) -> LaurentPoly {
        LaurentPoly::from_coeffs(&[1, 1]).pow(2 * g)
    }

    #[test]
    fn rank_one_is_the_jacobian() {
        for g in 2..7 {
            assert_eq!(hn_poincare_m1(1, genus(g)).unwrap(), jacobian(g));
            let h = hn_hodge_m1(1, genus(g)).unwrap();
            let one = BiLaurentPoly::one();
            let expected = (&one - &BiLaurentPoly::u()).pow(g) * (&one - &BiLaurentPoly::v()).pow(g);
            assert_eq!(h, expected);
            for p in 0..=g as i64 {
                for q in 0..=g as i64 {
                    let mag = binomial(g as u64, p as u64) * binomial(g as u64, q as u64);
                    let sign = if (p + q) % 2 == 0 { 1 } else { -1 };
                    assert_eq!(h.coeff([p, q]), mag * sign);
                }
            }
        }
    }

    #[test]
    fn rank_two_genus_two_values() {
        assert_eq!(
            hn_poincare_m1(2, genus(2)).unwrap(),
            LaurentPoly::from_coeffs(&[1, 4, 7, 12, 24, 32, 24, 12, 7, 4, 1])
        );
    }

    #[test]
    fn structural_properties() {
        for g in 2..=4 {
            for r in 1..=4 {
                let p = hn_poincare_m1(r, genus(g)).unwrap();
                let dim = moduli_dim(r, genus(g));
                assert_eq!(p.coeff(0), 1.into());
                assert!(p.all_nonnegative());
                assert_eq!(p.degree(), Some(2 * dim));
                assert!(p.is_palindromic(dim), "r={r} g={g}");
                assert!(p.sum_coefficients() > 0.into());
            }
        }
    }

    #[test]
    fn hodge_diagonal_and_symmetry() {
        for g in 2..=3 {
            for r in 1..=3 {
                let h = hn_hodge_m1(r, genus(g)).unwrap();
                assert!(h.is_uv_symmetric());
                assert_eq!(h.specialize_diagonal(), hn_poincare_m1(r, genus(g)).unwrap().negate_vars());
            }
        }
    }

    #[test]
    fn parabolic_examples() {
        let g2 = genus(2);
        assert_eq!(
            parabolic_poincare(2, g2).unwrap(),
            &hn_poincare_m1(2, g2).unwrap() * &LaurentPoly::from_coeffs(&[1, 0, 1])
        );
        assert_eq!(parabolic_poincare(1, genus(3)).unwrap(), jacobian(3));
        for g in 2..=3 {
            for r in 1..=3 {
                let p = parabolic_poincare(r, genus(g)).unwrap();
                assert_eq!(p.degree(), Some(2 * moduli_dim(r, genus(g)) + 2 * (r as i64 - 1)));
            }
        }
    }

    #[test]
    fn hn_type_enumeration_small() {
        let solver = HnSolver::<Betti>::new(genus(2), 100);
        let mut types = Vec::new();
        solver.collect_types(&mut Vec::new(), 2, 1, &mut types);
        // (1, d1) + (1, 1 - d1) with d1 >= 1; codim 2 d1 - 1 + 1 <= 50
        assert_eq!(types.len(), 25);
        for (pieces, c) in &types {
            assert_eq!(pieces.len(), 2);
            assert_eq!(*c, 2 * pieces[0].1 - 1 + 1);
        }
    }

    fn table_json(g: u32, entries: &str) -> String {
        format!(r#"{{"schema_version":1,"genus":{g},"entries":[{entries}]}}"#)
    }

    #[test]
    fn table_loading() {
        let jac = serde_json::to_string(&jacobian(2)).unwrap();
        let ok = table_json(2, &format!(r#"{{"rank":1,"kind":"betti","poly":{jac}}}"#));
        let table = SmoothTable::from_json(&ok).unwrap();
        assert_eq!(table.betti(1).unwrap(), &jacobian(2));
        assert_eq!(table.get(1).unwrap().provenance, Provenance::UserFile);

        let bad = LaurentPoly::from_coeffs(&[1, 4, 6, 5, 1]);
        let text = table_json(2, &format!(r#"{{"rank":1,"kind":"betti","poly":{}}}"#, serde_json::to_string(&bad).unwrap()));
        let err = SmoothTable::from_json(&text).unwrap_err();
        assert!(matches!(&err, Error::Ingestion { rank: 1, check } if check.contains("palindromicity")), "{err}");

        let neg = LaurentPoly::from_coeffs(&[1, -4, 6, -4, 1]);
        let text = table_json(2, &format!(r#"{{"rank":1,"kind":"betti","poly":{}}}"#, serde_json::to_string(&neg).unwrap()));
        let err = SmoothTable::from_json(&text).unwrap_err();
        assert!(matches!(&err, Error::Ingestion { rank: 1, check } if check.contains("positivity")), "{err}");

        assert!(matches!(SmoothTable::from_json("{}"), Err(Error::Schema(_))));
        let wrong_version = ok.replace(r#""schema_version":1"#, r#""schema_version":7"#);
        assert!(matches!(SmoothTable::from_json(&wrong_version), Err(Error::Schema(_))));
    }

    #[test]
    fn table_roundtrip_and_hodge_consistency() {
        let table = SmoothTable::builtin(genus(2), 2, true).unwrap();
        let text = table.to_json().unwrap();
        let back = SmoothTable::from_json(&text).unwrap();
        for r in 1..=2 {
            assert_eq!(back.betti(r).unwrap(), table.betti(r).unwrap());
            assert_eq!(back.hodge(r).unwrap(), table.hodge(r).unwrap());
        }

        let h = serde_json::to_string(table.hodge(1).unwrap()).unwrap();
        let wrong_betti = serde_json::to_string(&LaurentPoly::from_coeffs(&[1, 3, 8, 3, 1])).unwrap();
        let text = table_json(
            2,
            &format!(r#"{{"rank":1,"kind":"betti","poly":{wrong_betti}}},{{"rank":1,"kind":"hodge","poly":{h}}}"#),
        );
        let err = SmoothTable::from_json(&text).unwrap_err();
        assert!(matches!(&err, Error::Ingestion { rank: 1, check } if check.contains("diagonal")), "{err}");
    }

    #[test]
    fn overlay_replaces_entries() {
        let mut base = SmoothTable::builtin(genus(2), 2, false).unwrap();
        let mut user = SmoothTable::empty(genus(2));
        user.insert(
            1,
            SmoothEntry {
                betti: jacobian(2),
                hodge: None,
                provenance: Provenance::UserFile,
            },
        )
        .unwrap();
        base.overlay(&user).unwrap();
        assert_eq!(base.get(1).unwrap().provenance, Provenance::UserFile);
        assert_eq!(base.get(2).unwrap().provenance, Provenance::BuiltinHn);
        assert!(base.overlay(&SmoothTable::empty(genus(3))).is_err());
    }
}
