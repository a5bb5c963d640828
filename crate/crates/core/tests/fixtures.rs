use sur_core::exact::{bundled_fixture, compare_fixture, MatrixFixture};

fn load(name: &str) -> MatrixFixture {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    MatrixFixture::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn transcribed_bases_match_generator() {
    for (name, n) in [("gellmann_su4.json", 4), ("gellmann_su5.json", 5)] {
        let fx = load(name);
        assert_eq!(fx.n, n);
        let report = compare_fixture(&fx).unwrap();
        assert_eq!(report.matrices, n * n - 1);
        assert!(report.passed(), "{report:?}");
        assert_eq!(MatrixFixture::from_json(bundled_fixture(n).unwrap()).unwrap().matrices, fx.matrices);
    }
}

#[test]
fn a_single_wrong_entry_is_caught() {
    let mut fx = load("gellmann_su4.json");
    // last Cartan element: -sqrt(3/2) replaced by -sqrt(2/3)
    fx.matrices[14][3][3] = "-sqrt(2/3)".into();
    let report = compare_fixture(&fx).unwrap();
    assert_eq!(report.mismatches, vec![14]);
    assert!(!report.traceless && !report.orthonormal);

    let mut fx = load("gellmann_su5.json");
    fx.matrices[10][0][1] = "i".into();
    let report = compare_fixture(&fx).unwrap();
    assert_eq!(report.mismatches, vec![10]);
    assert!(!report.hermitian);
}

#[test]
fn malformed_fixtures_are_rejected() {
    assert!(MatrixFixture::from_json("{").is_err());
    let mut fx = load("gellmann_su4.json");
    fx.matrices[0][0][0] = "sqrt(-2)".into();
    assert!(compare_fixture(&fx).is_err());
    let mut fx = load("gellmann_su4.json");
    fx.matrices.pop();
    assert!(compare_fixture(&fx).is_err());
}
