use moduli_core::engine::{ip_m0, solve, symmetrized, verify_global};
use moduli_core::smoothmoduli::{load_smooth_table, SmoothTable};
use moduli_core::{moduli_dim, Error, Genus, LaurentPoly};

fn genus(g: u32) -> Genus {
    Genus::new(g).unwrap()
}

fn scratch_file(name: &str, contents: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("moduli-core-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn table_file_roundtrip_reproduces_builtin_results() {
    let g = genus(2);
    let builtin = SmoothTable::builtin(g, 3, true).unwrap();
    let path = scratch_file("roundtrip.json", &builtin.to_json().unwrap());
    let loaded = load_smooth_table(&path).unwrap();
    std::fs::remove_file(&path).unwrap();

    let mut overlaid = SmoothTable::builtin(g, 3, true).unwrap();
    overlaid.overlay(&loaded).unwrap();
    for r in 1..=3 {
        assert_eq!(ip_m0(r, g, &overlaid).unwrap(), ip_m0(r, g, &builtin).unwrap());
    }
}

#[test]
fn perturbed_table_file_is_rejected_at_its_rank() {
    let g = genus(2);
    let text = SmoothTable::builtin(g, 2, false).unwrap().to_json().unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let entry = doc["entries"]
        .as_array_mut()
        .unwrap()
        .iter_mut()
        .find(|e| e["rank"] == 2)
        .unwrap();
    entry["poly"][2][1] = serde_json::json!("8");
    let path = scratch_file("perturbed.json", &doc.to_string());
    let err = load_smooth_table(&path).unwrap_err();
    std::fs::remove_file(&path).unwrap();
    assert!(matches!(err, Error::Ingestion { rank: 2, .. }), "{err}");
}

#[test]
fn unchecked_perturbation_fails_global_verification_only_from_its_rank() {
    let g = genus(3);
    let mut table = SmoothTable::builtin(g, 3, false).unwrap();
    let bumped = table.betti(3).unwrap() + &LaurentPoly::monomial(5, 1);
    table.set_betti_unchecked(3, bumped);
    let report = verify_global(3, g, &table).unwrap();
    assert_eq!(report.first_failure(), Some(3));
    assert!(report.ranks[0].passed && report.ranks[1].passed);
}

#[test]
fn symmetrized_polynomials_are_invariant_under_inversion() {
    for g in 2..=3 {
        let bundle = solve(genus(g), 4, &SmoothTable::builtin(genus(g), 4, false).unwrap()).unwrap();
        for (&r, p) in bundle.solved() {
            let s = symmetrized(p, moduli_dim(r, genus(g)));
            let inverted = LaurentPoly::from_terms(s.terms().map(|(e, c)| (-e, c.clone())));
            assert_eq!(s, inverted, "r={r} g={g}");
        }
    }
}
