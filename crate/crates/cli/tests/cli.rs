use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn moduli(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_moduli"));
    cmd.args(args).env_remove("MODULI_CACHE_DIR");
    if let Some(dir) = cache {
        cmd.env("MODULI_CACHE_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn ip_rank_one_is_the_jacobian() {
    let out = moduli(&["ip", "--genus", "2", "--rank", "1", "--format", "json"], None);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["kind"], "ip");
    assert_eq!(
        v["results"][0]["poly"],
        json!([[0, "1"], [1, "4"], [2, "6"], [3, "4"], [4, "1"]])
    );
}

#[test]
fn second_run_is_served_from_cache_with_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["ip", "--genus", "2", "--rank", "2"];
    let first = moduli(&args, Some(dir.path()));
    assert!(dir.path().join("g2/ip/r2.json").exists());
    let second = moduli(&args, Some(dir.path()));
    let uncached = moduli(&args, None);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stdout, uncached.stdout);
}

#[test]
fn cache_dir_flag_overrides_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let flag = flag_dir.path().to_str().unwrap();
    let out = moduli(&["ip", "--genus", "3", "--rank", "1", "--cache-dir", flag], Some(env_dir.path()));
    assert_eq!(code(&out), 0);
    assert!(flag_dir.path().join("g3/ip/r1.json").exists());
    assert!(!env_dir.path().join("g3").exists());
}

#[test]
fn genus_one_is_a_usage_error() {
    let out = moduli(&["ip", "--genus", "1", "--rank", "2"], None);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("g >= 2"));
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(code(&moduli(&["ip", "--genus", "2", "--rank", "0"], None)), 2);
    assert_eq!(code(&moduli(&["ip", "--genus", "2", "--rank", "2", "--format", "xml"], None)), 2);
    assert_eq!(code(&moduli(&["fiber", "--genus", "2", "--rho", "1,0"], None)), 2);
    assert_eq!(code(&moduli(&["stalk", "--genus", "2", "--rho", "1,1", "--root", "3"], None)), 2);
    assert_eq!(code(&moduli(&["verify", "--genus", "3..2", "--max-rank", "2"], None)), 2);
}

#[test]
fn fiber_methods_agree() {
    let out = moduli(&["fiber", "--genus", "2", "--rho", "1,1", "--method", "all"], None);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "agree");
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 3);
    for r in results {
        assert_eq!(r["poly"], json!([[0, "1"], [2, "2"]]));
    }
}

#[test]
fn stalk_of_two_lines_in_genus_three() {
    let out = moduli(&["stalk", "--genus", "3", "--rho", "1,1"], None);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["results"][0]["poly"], json!([[0, "1"], [2, "1"]]));
    let other_root = moduli(&["stalk", "--genus", "3", "--rho", "1,1", "--root", "2"], None);
    assert_eq!(other_root.stdout, out.stdout);
}

#[test]
fn lhilb_methods_agree() {
    let out = moduli(&["lhilb", "--genus", "2", "--rho", "2,1", "--method", "all"], None);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "agree");
    assert_eq!(v["results"][0]["poly"], json!([[4, "1"], [6, "1"]]));
}

#[test]
fn verify_passes_and_reports_json() {
    let out = moduli(&["verify", "--genus", "2..3", "--max-rank", "3"], None);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["passed"], true);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["passed"] == true));
    for kind in ["structure", "global-roundtrip", "jacobian", "rank2-closed-form", "hodge", "fiber-graphs"] {
        assert!(checks.iter().any(|c| c["check"] == kind), "missing {kind}");
    }
}

#[test]
fn verify_recomputes_a_corrupted_cache_entry() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&moduli(&["ip", "--genus", "2", "--rank", "3"], Some(dir.path()))), 0);
    let entry = dir.path().join("g2/ip/r2.json");
    let text = fs::read_to_string(&entry).unwrap();
    let corrupted = text.replacen("\\\"4\\\"", "\\\"5\\\"", 1);
    assert_ne!(text, corrupted);
    fs::write(&entry, corrupted).unwrap();

    let out = moduli(&["verify", "--genus", "2", "--max-rank", "3"], Some(dir.path()));
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["cache"]["recomputed"].as_array().unwrap().len(), 1);
    assert_eq!(fs::read_to_string(&entry).unwrap(), text);
}

#[test]
fn table_files_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for fmt in ["json", "csv", "latex"] {
        for dir in [&a, &b] {
            let out = moduli(
                &["table", "--genus", "2..3", "--max-rank", "3", "--out-dir", dir.path().to_str().unwrap(), "--format", fmt],
                None,
            );
            assert_eq!(code(&out), 0);
        }
    }
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 12);
    for name in names {
        assert_eq!(fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap());
    }
    let csv = fs::read_to_string(a.path().join("g2-ip.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("genus,rank,exponent,coefficient"));
    assert_eq!(lines.next(), Some("2,1,0,1"));
}

#[test]
fn latex_and_json_tables_carry_the_same_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for fmt in ["json", "latex"] {
        let out = moduli(&["table", "--genus", "2", "--max-rank", "2", "--out-dir", d, "--format", fmt], None);
        assert_eq!(code(&out), 0);
    }
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("g2-ip.json")).unwrap()).unwrap();
    let tex = fs::read_to_string(dir.path().join("g2-ip.tex")).unwrap();
    for rec in v["results"].as_array().unwrap() {
        for term in rec["poly"].as_array().unwrap() {
            let (e, c) = (term[0].as_i64().unwrap(), term[1].as_str().unwrap());
            let mono = match (e, c) {
                (0, _) => c.to_string(),
                (1, "1") => "t".to_string(),
                (1, _) => format!("{c}t"),
                (_, "1") => format!("t^{{{e}}}"),
                _ => format!("{c}t^{{{e}}}"),
            };
            assert!(tex.contains(&mono), "{mono} missing from LaTeX");
        }
    }
}

#[test]
fn unwritable_output_directory_fails() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let target = blocker.join("sub");
    let out = moduli(&["table", "--genus", "2", "--max-rank", "1", "--out-dir", target.to_str().unwrap()], None);
    assert_eq!(code(&out), 1);
}

#[test]
fn exported_smooth_table_reproduces_builtin_results() {
    let dir = tempfile::tempdir().unwrap();
    let export = moduli(&["smooth", "--genus", "2", "--rank", "3", "--export"], None);
    assert_eq!(code(&export), 0);
    let path = dir.path().join("table.json");
    fs::write(&path, &export.stdout).unwrap();
    let p = path.to_str().unwrap();

    let builtin = moduli(&["ip", "--genus", "2", "--rank", "3"], None);
    let user = moduli(&["ip", "--genus", "2", "--rank", "3", "--smooth-table", p], None);
    assert_eq!(code(&user), 0);
    assert_eq!(builtin.stdout, user.stdout);

    let mut table: Value = serde_json::from_slice(&export.stdout).unwrap();
    let entry = table["entries"]
        .as_array_mut()
        .unwrap()
        .iter_mut()
        .find(|e| e["rank"] == 2 && e["kind"] == "betti")
        .unwrap();
    entry["poly"][3][1] = json!("13");
    fs::write(&path, serde_json::to_string(&table).unwrap()).unwrap();
    let bad = moduli(&["ip", "--genus", "2", "--rank", "3", "--smooth-table", p], None);
    assert_ne!(code(&bad), 0);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("rank 2"));
}

#[test]
fn hodge_output_is_symmetric() {
    let out = moduli(&["ip", "--genus", "2", "--rank", "2", "--hodge"], None);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let terms = v["results"][0]["poly"].as_array().unwrap();
    let lookup = |p: i64, q: i64| {
        terms
            .iter()
            .find(|t| t[0] == json!([p, q]))
            .map(|t| t[1].as_str().unwrap().to_string())
    };
    for t in terms {
        let (p, q) = (t[0][0].as_i64().unwrap(), t[0][1].as_i64().unwrap());
        assert_eq!(lookup(q, p).as_deref(), t[1].as_str());
    }
}
