//! Partitions, multipartitions and set decompositions.
//!
//! Enumeration orders are fixed so that anything built on top (cached
//! tables, CLI output) is reproducible byte for byte.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Genus;

/// A weakly decreasing sequence of positive integers.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Sorts the parts decreasingly; fails on a zero part.
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::usage("partition parts must be positive"));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Number of parts `k`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Sum of the parts `r`.
    pub fn rank(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// The parts at positions `idx` (0-based), re-sorted.
    pub fn select(&self, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut parts: Vec<u32> = idx.into_iter().map(|i| self.parts[i]).collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;
    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Vec<u32> {
        p.parts
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Parses the comma-separated form `2,1,1`.
    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::usage(format!("bad partition {s:?}: expected e.g. 2,1,1")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// All partitions of `r`, in decreasing lexicographic order.
pub fn partitions_of(r: u32) -> Result<Vec<Partition>> {
    if r == 0 {
        return Err(Error::usage("partitions_of needs r >= 1"));
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    push_partitions(r, r, &mut current, &mut out);
    Ok(out)
}

fn push_partitions(rest: u32, max_part: u32, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if rest == 0 {
        out.push(Partition {
            parts: current.clone(),
        });
        return;
    }
    for part in (1..=rest.min(max_part)).rev() {
        current.push(part);
        push_partitions(rest - part, part, current, out);
        current.pop();
    }
}

/// Ranks with multiplicities: `[(rank, multiplicity), ...]`.
///
/// Ranks are weakly decreasing; pairs with equal rank have weakly
/// decreasing multiplicities.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct MultiPartition {
    pairs: Vec<(u32, u32)>,
}

impl MultiPartition {
    /// Sorts the pairs into canonical order; fails on zero entries.
    pub fn new(mut pairs: Vec<(u32, u32)>) -> Result<Self> {
        if pairs.iter().any(|&(r, m)| r == 0 || m == 0) {
            return Err(Error::usage("multipartition entries must be positive"));
        }
        pairs.sort_unstable_by(|a, b| b.cmp(a));
        Ok(MultiPartition { pairs })
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    /// `sum m_i r_i`.
    pub fn rank(&self) -> u32 {
        self.pairs.iter().map(|&(r, m)| r * m).sum()
    }

    /// Each rank repeated by its multiplicity.
    pub fn induced_partition(&self) -> Partition {
        let parts = self
            .pairs
            .iter()
            .flat_map(|&(r, m)| std::iter::repeat_n(r, m as usize))
            .collect();
        Partition { parts }
    }
}

/// All multipartitions of `r`.
///
/// Order: grouped by induced partition, groups in the order of
/// [`partitions_of`]. Inside a group, every distinct rank occurring `c` times
/// carries a partition of `c` as its multiplicities; these run from the
/// finest (`1,1,...`) to the coarsest (`c`), with the largest rank varying
/// slowest. For `r = 2` this gives `[(2,1)]`, `[(1,1),(1,1)]`, `[(1,2)]`.
pub fn multipartitions_of(r: u32) -> Result<Vec<MultiPartition>> {
    let mut out = Vec::new();
    for rho in partitions_of(r)? {
        let mut groups: Vec<(u32, u32)> = Vec::new();
        for &p in rho.parts() {
            match groups.last_mut() {
                Some((rank, count)) if *rank == p => *count += 1,
                _ => groups.push((p, 1)),
            }
        }
        let mut combos: Vec<Vec<(u32, u32)>> = vec![Vec::new()];
        for &(rank, count) in &groups {
            let mut options = partitions_of(count).expect("count is positive");
            options.reverse();
            combos = combos
                .into_iter()
                .flat_map(|prefix| {
                    options.iter().map(move |mults| {
                        let mut pairs = prefix.clone();
                        pairs.extend(mults.parts().iter().map(|&m| (rank, m)));
                        pairs
                    })
                })
                .collect();
        }
        out.extend(combos.into_iter().map(|pairs| MultiPartition { pairs }));
    }
    Ok(out)
}

/// A set partition of `{0, ..., k-1}` (displayed 1-based). Blocks are sorted
/// internally and ordered by their minimum.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SetDecomposition {
    k: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetDecomposition {
    /// Builds a decomposition from 1-based blocks, validating disjointness
    /// and coverage of `{1, ..., k}`.
    pub fn from_blocks(k: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; k];
        let mut out = Vec::with_capacity(blocks.len());
        for block in blocks {
            if block.is_empty() {
                return Err(Error::usage("empty block in set decomposition"));
            }
            let mut b = Vec::with_capacity(block.len());
            for i in block {
                if i == 0 || i > k || seen[i - 1] {
                    return Err(Error::usage(format!(
                        "block element {i} repeated or outside 1..={k}"
                    )));
                }
                seen[i - 1] = true;
                b.push(i - 1);
            }
            b.sort_unstable();
            out.push(b);
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::usage(format!("blocks do not cover 1..={k}")));
        }
        out.sort_unstable_by_key(|b| b[0]);
        Ok(SetDecomposition { k, blocks: out })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// 0-based blocks.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn is_all_singletons(&self) -> bool {
        self.blocks.len() == self.k
    }
}

impl fmt::Display for SetDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (bi, b) in self.blocks.iter().enumerate() {
            if bi > 0 {
                write!(f, ",")?;
            }
            let items: Vec<String> = b.iter().map(|i| (i + 1).to_string()).collect();
            write!(f, "{{{}}}", items.join(","))?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for SetDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// All set decompositions of `{1..k}`, in lexicographic order of restricted
/// growth strings (the one-block decomposition first, all singletons last).
pub fn set_decompositions(k: usize) -> Result<Vec<SetDecomposition>> {
    if k == 0 {
        return Err(Error::usage("set_decompositions needs k >= 1"));
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize; k];
    push_rgs(1, 0, &mut rgs, &mut out);
    Ok(out)
}

fn push_rgs(pos: usize, max_label: usize, rgs: &mut [usize], out: &mut Vec<SetDecomposition>) {
    if pos == rgs.len() {
        let mut blocks = vec![Vec::new(); max_label + 1];
        for (i, &label) in rgs.iter().enumerate() {
            blocks[label].push(i);
        }
        out.push(SetDecomposition {
            k: rgs.len(),
            blocks,
        });
        return;
    }
    for label in 0..=max_label + 1 {
        rgs[pos] = label;
        push_rgs(pos + 1, max_label.max(label), rgs, out);
    }
}

/// `lambda o rho`: block sums (sorted decreasingly), plus the restriction of
/// `rho` to every block, in block order.
pub fn compose(lambda: &SetDecomposition, rho: &Partition) -> Result<(Partition, Vec<Partition>)> {
    if lambda.k() != rho.len() {
        return Err(Error::usage(format!(
            "decomposition of {} indices applied to a partition with {} parts",
            lambda.k(),
            rho.len()
        )));
    }
    let restricted: Vec<Partition> = lambda
        .blocks()
        .iter()
        .map(|b| rho.select(b.iter().copied()))
        .collect();
    let mu = Partition::new(restricted.iter().map(Partition::rank).collect())?;
    Ok((mu, restricted))
}

/// Order of the permutation group of equal parts: `prod (multiplicity)!`.
pub fn aut_order(rho: &Partition) -> u64 {
    let mut total = 1u64;
    let mut run = 0u64;
    let mut prev = None;
    for &p in rho.parts() {
        if prev == Some(p) {
            run += 1;
        } else {
            run = 1;
            prev = Some(p);
        }
        total *= run;
    }
    total
}

/// `d(rho) = sum_{i<j} r_i r_j (g-1)`.
pub fn d_rho(rho: &Partition, g: Genus) -> u64 {
    let p = rho.parts();
    let mut sum = 0u64;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            sum += p[i] as u64 * p[j] as u64;
        }
    }
    sum * g.gm1() as u64
}

/// `sum (r_i^2 (g-1) + 1)`, one term per (rank, multiplicity) pair.
pub fn stratum_dim(mp: &MultiPartition, g: Genus) -> u64 {
    mp.pairs()
        .iter()
        .map(|&(r, _)| (r as u64).pow(2) * g.gm1() as u64 + 1)
        .sum()
}
