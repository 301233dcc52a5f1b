//! Weighted digraphs `F_rho`, `F°_rho` and generating polynomials of their
//! rooted acyclic spanning subgraphs.
//!
//! A spanning subgraph picks, for each ordered pair `(i, j)`, a subset of the
//! `mult(i, j)` parallel arcs. It is rooted acyclic when it has no directed
//! cycle and every vertex reaches the root. Grouping subgraphs by their
//! support (the set of pairs with at least one arc chosen) gives
//!
//! ```text
//! sum_H t^{e(H)} = sum_S prod_{(i,j) in S} ((1 + t)^{mult(i,j)} - 1).
//! ```

use std::collections::HashMap;

use crate::combinat::Partition;
use crate::error::{Error, Result};
use crate::exactpoly::LaurentPoly;
use crate::Genus;

/// Largest vertex count accepted; vertex sets are handled as bitmasks and
/// the subset recursion is exponential anyway.
pub const MAX_VERTICES: usize = 16;

/// Above this many non-root vertices the support enumeration gives way to
/// the source-peeling recursion.
pub const ENUMERATION_LIMIT: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedDigraph {
    n: usize,
    mult: Vec<Vec<u64>>,
    root: Option<usize>,
}

impl WeightedDigraph {
    /// `n` vertices and no arcs.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::usage(format!(
                "digraph needs between 1 and {MAX_VERTICES} vertices, got {n}"
            )));
        }
        Ok(WeightedDigraph {
            n,
            mult: vec![vec![0; n]; n],
            root: None,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    pub fn set_root(&mut self, root: usize) -> Result<()> {
        self.check_vertex(root)?;
        self.root = Some(root);
        Ok(())
    }

    pub fn mult(&self, i: usize, j: usize) -> u64 {
        self.mult[i][j]
    }

    pub fn set_mult(&mut self, i: usize, j: usize, m: u64) -> Result<()> {
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        if i == j {
            return Err(Error::usage("self-loops are not allowed"));
        }
        self.mult[i][j] = m;
        Ok(())
    }

    /// Sum of all arc multiplicities.
    pub fn total_mult(&self) -> u64 {
        self.mult.iter().flatten().sum()
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            return Err(Error::usage(format!(
                "vertex {v} out of range for a graph on {} vertices",
                self.n
            )));
        }
        Ok(())
    }
}

/// `F_rho`: vertex 0 is the root, vertex `i` stands for part `r_i`;
/// `mult(i, 0) = r_i` and `mult(i, j) = r_i r_j (g-1)`.
pub fn build_f_rho(rho: &Partition, g: Genus) -> Result<WeightedDigraph> {
    let k = rho.len();
    let mut graph = WeightedDigraph::new(k + 1)?;
    let r = rho.parts();
    for i in 1..=k {
        graph.set_mult(i, 0, r[i - 1] as u64)?;
        for j in 1..=k {
            if i != j {
                graph.set_mult(i, j, r[i - 1] as u64 * r[j - 1] as u64 * g.gm1() as u64)?;
            }
        }
    }
    graph.set_root(0)?;
    Ok(graph)
}

/// `F°_rho`: `F_rho` without vertex 0. Vertex `i` here stands for part
/// `r_{i+1}`, so indices are 0-based.
pub fn build_f_circ(rho: &Partition, g: Genus) -> Result<WeightedDigraph> {
    let k = rho.len();
    let mut graph = WeightedDigraph::new(k)?;
    let r = rho.parts();
    for i in 0..k {
        for j in 0..k {
            if i != j {
                graph.set_mult(i, j, r[i] as u64 * r[j] as u64 * g.gm1() as u64)?;
            }
        }
    }
    Ok(graph)
}

/// `(1 + t)^m - 1` for every multiplicity that occurs, cached.
struct ArcWeights {
    cache: HashMap<u64, LaurentPoly>,
}

impl ArcWeights {
    fn new() -> Self {
        ArcWeights {
            cache: HashMap::new(),
        }
    }

    fn get(&mut self, m: u64) -> &LaurentPoly {
        self.cache.entry(m).or_insert_with(|| {
            let one_plus_t = LaurentPoly::from_coeffs(&[1, 1]);
            &one_plus_t.pow(m as u32) - &LaurentPoly::one()
        })
    }
}

/// Generating polynomial of rooted acyclic spanning subgraphs, choosing
/// the algorithm by graph size.
pub fn acyc_rooted_genpoly(graph: &WeightedDigraph, root: usize) -> Result<LaurentPoly> {
    graph.check_vertex(root)?;
    if graph.n - 1 <= ENUMERATION_LIMIT {
        acyc_rooted_genpoly_enumerate(graph, root)
    } else {
        acyc_rooted_genpoly_dp(graph, root)
    }
}

/// Support enumeration. Every non-root vertex picks a nonempty set of
/// out-neighbours; reachability sets reject choices closing a cycle. A DAG
/// in which only the root lacks out-arcs is automatically rooted.
pub fn acyc_rooted_genpoly_enumerate(graph: &WeightedDigraph, root: usize) -> Result<LaurentPoly> {
    graph.check_vertex(root)?;
    let n = graph.n;
    let mut distinct: Vec<u64> = graph.mult.iter().flatten().copied().filter(|&m| m > 0).collect();
    distinct.sort_unstable();
    distinct.dedup();

    let order: Vec<usize> = (0..n).filter(|&v| v != root).collect();
    // per vertex: every nonempty out-set as (target mask, multiplicity indices)
    let mut choices: Vec<Vec<(u32, Vec<usize>)>> = Vec::with_capacity(order.len());
    for &v in &order {
        let targets: Vec<usize> = (0..n).filter(|&w| graph.mult[v][w] > 0).collect();
        let mut opts = Vec::new();
        for subset in 1u32..(1 << targets.len()) {
            let mut mask = 0u32;
            let mut idx = Vec::new();
            for (bit, &w) in targets.iter().enumerate() {
                if subset >> bit & 1 == 1 {
                    mask |= 1 << w;
                    idx.push(distinct.binary_search(&graph.mult[v][w]).expect("listed"));
                }
            }
            opts.push((mask, idx));
        }
        if opts.is_empty() {
            return Ok(LaurentPoly::zero());
        }
        choices.push(opts);
    }

    let mut walk = Walk {
        order: &order,
        choices: &choices,
        reach: vec![0u32; n],
        counts: vec![0u32; distinct.len()],
        histogram: HashMap::new(),
    };
    walk.run(0);

    let mut weights = ArcWeights::new();
    let mut keys: Vec<_> = walk.histogram.into_iter().collect();
    keys.sort_unstable();
    let mut total = LaurentPoly::zero();
    for (counts, times) in keys {
        let mut term = LaurentPoly::constant(times);
        for (i, &c) in counts.iter().enumerate() {
            if c > 0 {
                term = &term * &weights.get(distinct[i]).pow(c);
            }
        }
        total += &term;
    }
    Ok(total)
}

struct Walk<'a> {
    order: &'a [usize],
    choices: &'a [Vec<(u32, Vec<usize>)>],
    /// `reach[v]`: vertices reachable from `v` along chosen arcs.
    reach: Vec<u32>,
    counts: Vec<u32>,
    histogram: HashMap<Vec<u32>, u64>,
}

impl Walk<'_> {
    fn run(&mut self, pos: usize) {
        if pos == self.order.len() {
            *self.histogram.entry(self.counts.clone()).or_insert(0) += 1;
            return;
        }
        let v = self.order[pos];
        for (mask, idx) in &self.choices[pos] {
            let mut closure = *mask;
            let mut targets = *mask;
            while targets != 0 {
                let w = targets.trailing_zeros() as usize;
                targets &= targets - 1;
                closure |= self.reach[w];
            }
            if closure >> v & 1 == 1 {
                continue;
            }
            let saved = self.reach.clone();
            for u in 0..self.reach.len() {
                if u == v || self.reach[u] >> v & 1 == 1 {
                    self.reach[u] |= closure;
                }
            }
            for &i in idx {
                self.counts[i] += 1;
            }
            self.run(pos + 1);
            for &i in idx {
                self.counts[i] -= 1;
            }
            self.reach = saved;
        }
    }
}

/// Source-peeling recursion over vertex subsets. With `D(S)` the
/// polynomial for the subgraph induced on `S` (which contains the root),
///
/// ```text
/// D(S) = sum_{T nonempty, T ⊆ S - root} (-1)^{|T|+1} D(S - T)
///        prod_{v in T} ((1 + t)^{m(v, S - T)} - 1)
/// ```
///
/// where `m(v, X)` sums the multiplicities of arcs from `v` into `X`.
pub fn acyc_rooted_genpoly_dp(graph: &WeightedDigraph, root: usize) -> Result<LaurentPoly> {
    graph.check_vertex(root)?;
    let n = graph.n;
    let full = (1usize << n) - 1;
    let root_bit = 1usize << root;
    let mut weights = ArcWeights::new();
    let mut table: Vec<Option<LaurentPoly>> = vec![None; 1 << n];
    table[root_bit] = Some(LaurentPoly::one());

    // subsets containing the root, by increasing size
    let mut sets: Vec<usize> = (0..=full).filter(|s| s & root_bit != 0 && *s != root_bit).collect();
    sets.sort_by_key(|s| s.count_ones());
    for s in sets {
        let others = s & !root_bit;
        let mut acc = LaurentPoly::zero();
        let mut t = others;
        while t != 0 {
            let rest = s & !t;
            let mut term = table[rest].clone().expect("smaller subsets solved first");
            if !term.is_zero() {
                let mut bits = t;
                while bits != 0 && !term.is_zero() {
                    let v = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let m: u64 = (0..n).filter(|w| rest >> w & 1 == 1).map(|w| graph.mult[v][w]).sum();
                    term = &term * weights.get(m);
                }
                if t.count_ones() % 2 == 1 {
                    acc += &term;
                } else {
                    acc -= &term;
                }
            }
            t = (t - 1) & others;
        }
        table[s] = Some(acc);
    }
    Ok(table[full].take().expect("full set solved"))
}

/// `f(rho; t) = A(t - 1)` with `A(t) = Acyc(F_rho, 0) / t^k`.
pub fn f_via_graphs(rho: &Partition, g: Genus) -> Result<LaurentPoly> {
    if rho.is_empty() {
        return Err(Error::usage("f needs a nonempty partition"));
    }
    let graph = build_f_rho(rho, g)?;
    let a = acyc_rooted_genpoly(&graph, 0)?;
    normalize(a, rho.len() as i64)
}

/// `g(rho; t) = A(t - 1)` with `A(t) = Acyc(F°_rho, root) / t^{k-1}`.
/// `root` is a 0-based vertex of `F°_rho`. For a single part the answer is 1.
pub fn g_via_graphs(rho: &Partition, g: Genus, root: usize) -> Result<LaurentPoly> {
    if rho.is_empty() {
        return Err(Error::usage("g needs a nonempty partition"));
    }
    if root >= rho.len() {
        return Err(Error::usage(format!(
            "root {root} out of range for a partition with {} parts",
            rho.len()
        )));
    }
    if rho.len() == 1 {
        return Ok(LaurentPoly::one());
    }
    let graph = build_f_circ(rho, g)?;
    let a = acyc_rooted_genpoly(&graph, root)?;
    normalize(a, rho.len() as i64 - 1)
}

fn normalize(a: LaurentPoly, edges: i64) -> Result<LaurentPoly> {
    match a.low_degree() {
        Some(low) if low >= edges => a.shift(-edges).taylor_shift(-1),
        _ => Err(Error::Invariant(format!(
            "edge generating polynomial {a} is not divisible by t^{edges}"
        ))),
    }
}
