use std::collections::BTreeMap;
use std::fs;
use std::ops::RangeInclusive;
use std::path::Path;

use anyhow::{Context, Result};
use moduli_core::combinat::{partitions_of, Partition};
use moduli_core::engine::{ip_m0_rank2_closed, solve, solve_hodge, verify_global};
use moduli_core::graphkernel::{f_via_graphs, g_via_graphs};
use moduli_core::localdata::LocalContext;
use moduli_core::smoothmoduli::{hn_hodge_m1, hn_poincare_m1, load_smooth_table, SmoothTable};
use moduli_core::{moduli_dim, BiLaurentPoly, BigInt, Genus, LaurentPoly};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::cache::{Cache, Lookup};
use crate::output::{Format, Key, PolyValue, Record, Report};
use crate::{Common, FiberMethod, LhilbMethod, UsageError};

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn check_rank(rank: u32) -> Result<()> {
    if rank == 0 {
        return Err(usage("rank must be at least 1"));
    }
    Ok(())
}

fn rho_key(rho: &Partition) -> String {
    let parts: Vec<String> = rho.parts().iter().map(|p| p.to_string()).collect();
    format!("rho{}", parts.join("_"))
}

#[derive(Debug, Default, Serialize)]
struct CacheStats {
    hits: usize,
    misses: usize,
    recomputed: Vec<String>,
}

/// Serves `kind/key` from the cache when possible, otherwise computes and
/// stores it. Damaged entries are reported on stderr and replaced.
fn cached<T, F>(cache: Option<&Cache>, g: Genus, kind: &str, key: &str, compute: F) -> Result<T>
where
    T: Serialize + DeserializeOwned,
    F: FnOnce() -> Result<T>,
{
    let Some(cache) = cache else {
        return compute();
    };
    match cache.get(g.get(), kind, key) {
        Lookup::Hit(v) => return Ok(v),
        Lookup::Miss => {}
        Lookup::Corrupt(why) => eprintln!("warning: discarding cache entry ({why})"),
    }
    let v = compute()?;
    cache.put(g.get(), kind, key, &v)?;
    Ok(v)
}

fn smooth_table(g: Genus, r_max: u32, hodge: bool, user: Option<&SmoothTable>) -> Result<SmoothTable> {
    let mut table = SmoothTable::builtin(g, r_max, hodge)?;
    if let Some(user) = user {
        table.overlay(user)?;
    }
    Ok(table)
}

/// `IP_t(M_0(r))` for `r = 1..=max_rank`, from the cache where possible.
/// A single solve fills every missing or damaged rank.
fn ip_series(
    g: Genus,
    max_rank: u32,
    cache: Option<&Cache>,
    stats: &mut CacheStats,
) -> Result<BTreeMap<u32, LaurentPoly>> {
    let mut found = BTreeMap::new();
    let mut stale = Vec::new();
    if let Some(cache) = cache {
        for r in 1..=max_rank {
            match cache.get::<LaurentPoly>(g.get(), "ip", &format!("r{r}")) {
                Lookup::Hit(p) => {
                    stats.hits += 1;
                    found.insert(r, p);
                }
                Lookup::Miss => stats.misses += 1,
                Lookup::Corrupt(why) => {
                    eprintln!("warning: discarding cache entry ({why})");
                    stale.push(cache.path(g.get(), "ip", &format!("r{r}")).display().to_string());
                }
            }
        }
    }
    if found.len() == max_rank as usize {
        return Ok(found);
    }
    let bundle = solve(g, max_rank, &smooth_table(g, max_rank, false, None)?)?;
    for (&r, p) in bundle.solved() {
        if found.contains_key(&r) {
            continue;
        }
        if let Some(cache) = cache {
            cache.put(g.get(), "ip", &format!("r{r}"), p)?;
        }
        found.insert(r, p.clone());
    }
    stats.recomputed.extend(stale);
    Ok(found)
}

fn emit(report: &Report, format: Format) {
    print!("{}", report.render(format));
}

fn single(kind: &str, genus: Genus, key: Key, poly: PolyValue) -> Report {
    let mut report = Report::new(kind);
    report.records.push(Record {
        genus: genus.get(),
        key,
        method: None,
        poly,
    });
    report
}

pub fn ip(genus: u32, rank: u32, hodge: bool, smooth_path: Option<&Path>, common: &Common) -> Result<bool> {
    let g = Genus::new(genus)?;
    check_rank(rank)?;
    let user = smooth_path
        .map(|p| load_smooth_table(p).with_context(|| format!("loading {}", p.display())))
        .transpose()?;
    // Cache keys do not encode a user table, so a user table bypasses the cache.
    let cache = match user {
        Some(_) => None,
        None => Cache::resolve(common.cache_dir.as_deref()),
    };
    let key = format!("r{rank}");
    let poly = if hodge {
        let h: BiLaurentPoly = cached(cache.as_ref(), g, "ip-hodge", &key, || {
            let table = smooth_table(g, rank, true, user.as_ref())?;
            let mut all = solve_hodge(g, rank, &table)?;
            if let Some(c) = &cache {
                for (r, p) in &all {
                    c.put(g.get(), "ip-hodge", &format!("r{r}"), p)?;
                }
            }
            Ok(all.remove(&rank).expect("rank solved"))
        })?;
        PolyValue::Bi(h)
    } else {
        let p: LaurentPoly = cached(cache.as_ref(), g, "ip", &key, || {
            let table = smooth_table(g, rank, false, user.as_ref())?;
            let bundle = solve(g, rank, &table)?;
            if let Some(c) = &cache {
                for (r, p) in bundle.solved() {
                    c.put(g.get(), "ip", &format!("r{r}"), p)?;
                }
            }
            Ok(bundle.solved()[&rank].clone())
        })?;
        PolyValue::Uni(p)
    };
    let kind = if hodge { "ip-hodge" } else { "ip" };
    emit(&single(kind, g, Key::Rank(rank), poly), common.format);
    Ok(true)
}

/// Adds one record per method and an agreement verdict when more than one
/// method ran.
fn method_report(kind: &str, g: Genus, rho: &Partition, results: Vec<(&str, LaurentPoly)>) -> (Report, bool) {
    let mut report = Report::new(kind);
    let agree = results.windows(2).all(|w| w[0].1 == w[1].1);
    let several = results.len() > 1;
    for (method, p) in results {
        report.records.push(Record {
            genus: g.get(),
            key: Key::Rho(rho.clone()),
            method: several.then(|| method.to_string()),
            poly: PolyValue::Uni(p),
        });
    }
    if several {
        report.verdict = Some(agree);
    }
    (report, agree)
}

pub fn fiber(genus: u32, rho: &Partition, method: FiberMethod, common: &Common) -> Result<bool> {
    let g = Genus::new(genus)?;
    let cache = Cache::resolve(common.cache_dir.as_deref());
    let ctx = LocalContext::new(g);
    let mut results = Vec::new();
    if matches!(method, FiberMethod::Recursion | FiberMethod::All) {
        let p = cached(cache.as_ref(), g, "fiber", &rho_key(rho), || Ok(ctx.f_recursive(rho)?))?;
        results.push(("recursion", p));
    }
    if matches!(method, FiberMethod::Graphs | FiberMethod::All) {
        results.push(("graphs", f_via_graphs(rho, g)?));
    }
    if matches!(method, FiberMethod::Identity | FiberMethod::All) {
        results.push(("identity", ctx.f_via_identity(rho)?));
    }
    // The library works in t^2 -> t; report cohomological degrees.
    let results = results.into_iter().map(|(m, p)| (m, p.adams(2))).collect();
    let (report, agree) = method_report("fiber", g, rho, results);
    emit(&report, common.format);
    if !agree {
        eprintln!("error: methods disagree for fiber rho={rho}, g={genus}");
    }
    Ok(agree)
}

pub fn stalk(genus: u32, rho: &Partition, root: usize, common: &Common) -> Result<bool> {
    let g = Genus::new(genus)?;
    if root == 0 || root > rho.len() {
        return Err(usage(format!("root must lie in 1..={} for rho={rho}", rho.len())));
    }
    let cache = Cache::resolve(common.cache_dir.as_deref());
    let key = format!("{}-root{root}", rho_key(rho));
    let p = cached(cache.as_ref(), g, "stalk", &key, || Ok(g_via_graphs(rho, g, root - 1)?))?;
    emit(&single("stalk", g, Key::Rho(rho.clone()), PolyValue::Uni(p.adams(2))), common.format);
    Ok(true)
}

pub fn lhilb(genus: u32, rho: &Partition, method: LhilbMethod, common: &Common) -> Result<bool> {
    let g = Genus::new(genus)?;
    let cache = Cache::resolve(common.cache_dir.as_deref());
    let ctx = LocalContext::new(g);
    let mut results = Vec::new();
    if matches!(method, LhilbMethod::Closed | LhilbMethod::All) {
        let p = cached(cache.as_ref(), g, "L-hilb", &rho_key(rho), || Ok(ctx.hilb_l_closed(rho)?))?;
        results.push(("closed", p));
    }
    if matches!(method, LhilbMethod::Subtraction | LhilbMethod::All) {
        results.push(("subtraction", ctx.hilb_l_subtraction(rho)?));
    }
    let (report, agree) = method_report("L-hilb", g, rho, results);
    emit(&report, common.format);
    if !agree {
        eprintln!("error: methods disagree for L-hilb rho={rho}, g={genus}");
    }
    Ok(agree)
}

pub fn smooth(genus: u32, rank: u32, hodge: bool, export: bool, common: &Common) -> Result<bool> {
    let g = Genus::new(genus)?;
    check_rank(rank)?;
    if export {
        if common.format != Format::Json {
            return Err(usage("--export writes the smooth-table file format, which is JSON only"));
        }
        println!("{}", SmoothTable::builtin(g, rank, hodge)?.to_json()?);
        return Ok(true);
    }
    let cache = Cache::resolve(common.cache_dir.as_deref());
    let key = format!("r{rank}");
    let (kind, poly) = if hodge {
        let h: BiLaurentPoly =
            cached(cache.as_ref(), g, "smooth-hodge", &key, || Ok(hn_hodge_m1(rank, g)?.negate_vars()))?;
        ("smooth-hodge", PolyValue::Bi(h))
    } else {
        let p = cached(cache.as_ref(), g, "smooth-betti", &key, || Ok(hn_poincare_m1(rank, g)?))?;
        ("smooth-betti", PolyValue::Uni(p))
    };
    emit(&single(kind, g, Key::Rank(rank), poly), common.format);
    Ok(true)
}

#[derive(Debug, Serialize)]
struct CheckOutcome {
    check: &'static str,
    genus: u32,
    input: String,
    passed: bool,
    detail: String,
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    genus_min: u32,
    genus_max: u32,
    max_rank: u32,
    passed: bool,
    checks: Vec<CheckOutcome>,
    cache: CacheStats,
}

struct Checks {
    genus: u32,
    out: Vec<CheckOutcome>,
}

impl Checks {
    fn record(&mut self, check: &'static str, input: String, outcome: std::result::Result<String, String>) {
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.out.push(CheckOutcome {
            check,
            genus: self.genus,
            input,
            passed,
            detail,
        });
    }

    fn compare(&mut self, check: &'static str, input: String, a: &LaurentPoly, b: &LaurentPoly) {
        let outcome = if a == b { Ok(format!("{a}")) } else { Err(format!("{a} != {b}")) };
        self.record(check, input, outcome);
    }
}

fn structure(p: &LaurentPoly, r: u32, g: Genus) -> std::result::Result<String, String> {
    let dim = moduli_dim(r, g);
    if p.coeff(0) != BigInt::from(1) {
        return Err(format!("constant term of {p} is not 1"));
    }
    if !p.all_nonnegative() {
        return Err(format!("negative coefficient in {p}"));
    }
    if p.low_degree() != Some(0) || p.degree() != Some(2 * dim) {
        return Err(format!("{p} does not span degrees 0..={}", 2 * dim));
    }
    if !p.is_palindromic(dim) {
        return Err(format!("{p} is not palindromic about {dim}"));
    }
    Ok(format!("degree {}, palindromic about {dim}", 2 * dim))
}

fn verify_genus(g: Genus, max_rank: u32, cache: Option<&Cache>, stats: &mut CacheStats) -> Result<Vec<CheckOutcome>> {
    let mut checks = Checks {
        genus: g.get(),
        out: Vec::new(),
    };
    let table = smooth_table(g, max_rank, false, None)?;
    let fresh = solve(g, max_rank, &table)?;
    let served = ip_series(g, max_rank, cache, stats)?;

    for r in 1..=max_rank {
        let input = format!("r={r}");
        checks.compare("cache-consistency", input.clone(), &served[&r], &fresh.solved()[&r]);
        checks.record("structure", input, structure(&served[&r], r, g));
    }

    let report = verify_global(max_rank, g, &table)?;
    for rc in report.ranks {
        let outcome = if rc.passed { Ok(rc.detail) } else { Err(rc.detail) };
        checks.record("global-roundtrip", format!("r={}", rc.rank), outcome);
    }

    let jac = LaurentPoly::from_coeffs(&[1, 1]).pow(2 * g.get());
    checks.compare("jacobian", "r=1".into(), &fresh.solved()[&1], &jac);

    if max_rank >= 2 {
        let outcome = ip_m0_rank2_closed(g, &table).map_err(|e| e.to_string());
        match outcome {
            Ok(closed) => checks.compare("rank2-closed-form", "r=2".into(), &fresh.solved()[&2], &closed),
            Err(e) => checks.record("rank2-closed-form", "r=2".into(), Err(e)),
        }
    }

    let hodge_max = max_rank.min(3);
    let hodge_table = SmoothTable::builtin(g, hodge_max, true)?;
    match solve_hodge(g, hodge_max, &hodge_table) {
        Ok(all) => {
            for (r, h) in all {
                let outcome = if h.is_uv_symmetric() {
                    Ok("diagonal matches IP, nonnegative, u-v symmetric".to_string())
                } else {
                    Err(format!("{h} is not u-v symmetric"))
                };
                checks.record("hodge", format!("r={r}"), outcome);
            }
        }
        Err(e) => checks.record("hodge", format!("r<={hodge_max}"), Err(e.to_string())),
    }

    let ctx = LocalContext::new(g);
    for r in 1..=max_rank.min(5) {
        for rho in partitions_of(r)? {
            let input = format!("rho={rho}");
            if r <= 4 {
                let a = ctx.f_recursive(&rho)?;
                match f_via_graphs(&rho, g) {
                    Ok(b) => checks.compare("fiber-graphs", input.clone(), &a, &b),
                    Err(e) => checks.record("fiber-graphs", input.clone(), Err(e.to_string())),
                }
            }
            let ok = ctx.f_cross_identity(&rho)?;
            let outcome = if ok { Ok("agree".into()) } else { Err("recursion and identity differ".into()) };
            checks.record("fiber-identity", input.clone(), outcome);

            match ctx.hilb_l_subtraction(&rho) {
                Ok(b) => checks.compare("L-hilb", input.clone(), &ctx.hilb_l_closed(&rho)?, &b),
                Err(e) => checks.record("L-hilb", input.clone(), Err(e.to_string())),
            }

            let first = g_via_graphs(&rho, g, 0)?;
            let mut outcome = Ok(format!("{first}"));
            for root in 1..rho.len() {
                let other = g_via_graphs(&rho, g, root)?;
                if other != first {
                    outcome = Err(format!("root 1 gives {first}, root {} gives {other}", root + 1));
                    break;
                }
            }
            checks.record("root-independence", input, outcome);
        }
    }
    Ok(checks.out)
}

pub fn verify(genus: RangeInclusive<u32>, max_rank: u32, cache_dir: Option<&Path>) -> Result<bool> {
    check_rank(max_rank)?;
    let genera = genus.clone().map(Genus::new).collect::<moduli_core::Result<Vec<_>>>()?;
    let cache = Cache::resolve(cache_dir);
    let mut stats = CacheStats::default();
    let mut checks = Vec::new();
    for g in genera {
        checks.extend(verify_genus(g, max_rank, cache.as_ref(), &mut stats)?);
    }
    let passed = checks.iter().all(|c| c.passed);
    let report = VerifyReport {
        genus_min: *genus.start(),
        genus_max: *genus.end(),
        max_rank,
        passed,
        checks,
        cache: stats,
    };
    println!("{}", serde_json::to_string_pretty(&report)?);

    let failed: Vec<&CheckOutcome> = report.checks.iter().filter(|c| !c.passed).collect();
    for c in &failed {
        eprintln!("FAIL {} g={} {}: {}", c.check, c.genus, c.input, c.detail);
    }
    eprintln!(
        "verify: {} checks, {} failed; cache: {} hits, {} misses, {} recomputed",
        report.checks.len(),
        failed.len(),
        report.cache.hits,
        report.cache.misses,
        report.cache.recomputed.len()
    );
    Ok(passed)
}

pub fn table(genus: RangeInclusive<u32>, max_rank: u32, out_dir: &Path, common: &Common) -> Result<bool> {
    check_rank(max_rank)?;
    let genera = genus.map(Genus::new).collect::<moduli_core::Result<Vec<_>>>()?;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let cache = Cache::resolve(common.cache_dir.as_deref());
    let mut stats = CacheStats::default();
    for g in genera {
        let ips = ip_series(g, max_rank, cache.as_ref(), &mut stats)?;
        let mut ip_report = Report::new("ip");
        let mut smooth_report = Report::new("smooth-betti");
        for (r, p) in ips {
            ip_report.records.push(Record {
                genus: g.get(),
                key: Key::Rank(r),
                method: None,
                poly: PolyValue::Uni(p),
            });
            let s = cached(cache.as_ref(), g, "smooth-betti", &format!("r{r}"), || Ok(hn_poincare_m1(r, g)?))?;
            smooth_report.records.push(Record {
                genus: g.get(),
                key: Key::Rank(r),
                method: None,
                poly: PolyValue::Uni(s),
            });
        }
        for report in [&ip_report, &smooth_report] {
            let path = out_dir.join(format!("g{}-{}.{}", g, report.kind, common.format.extension()));
            fs::write(&path, report.render(common.format)).with_context(|| format!("writing {}", path.display()))?;
            println!("{}", path.display());
        }
    }
    Ok(true)
}
