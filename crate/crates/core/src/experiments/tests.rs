use super::*;

fn cfg(json: &str) -> SweepConfig {
    SweepConfig::from_json(json).unwrap()
}

#[test]
fn unknown_keys_rejected() {
    assert!(SweepConfig::from_json(r#"{"experiment": "supercritical", "bogus": 1}"#).is_err());
    assert!(SweepConfig::from_json(r#"{"experiment": "nonsense"}"#).is_err());
}

#[test]
fn presets_fill_and_expected_slope() {
    let c = cfg(r#"{"experiment": "supercritical"}"#).resolved().unwrap();
    assert_eq!(c.dim, Some(3));
    assert_eq!(c.expected_slope, Some(1.0));
    let c = cfg(r#"{"experiment": "subcritical"}"#).resolved().unwrap();
    assert!((c.expected_slope.unwrap() - 0.5).abs() < 1e-15);
    let c = cfg(r#"{"experiment": "aniso_h2plus", "gamma": 3.0}"#).resolved().unwrap();
    assert_eq!(c.expected_slope, Some(1.0));
    assert_eq!(cfg(r#"{"experiment": "critical_log"}"#).resolved().unwrap().expected_slope, None);
}

#[test]
fn validity_regions() {
    // r ≥ d/2 is outside the supercritical range.
    assert!(cfg(r#"{"experiment": "supercritical", "r": 1.5}"#).resolved().is_err());
    assert!(cfg(r#"{"experiment": "supercritical", "dim": 2}"#).resolved().is_err());
    assert!(cfg(r#"{"experiment": "supercritical", "sweep": [8, 16]}"#).resolved().is_err());
    assert!(cfg(r#"{"experiment": "subcritical", "gamma": 1.5}"#).resolved().is_err());
    assert!(cfg(r#"{"experiment": "critical_log", "dim": 2}"#).resolved().is_err());
    assert!(cfg(r#"{"experiment": "aniso_h2plus", "r": 2.0}"#).resolved().is_err());
    assert!(SweepConfig::default().resolved().is_err());
}

#[test]
fn csv_round_trips_floats() {
    let mut r = Report::new(Experiment::Solve, &["a", "b"]);
    r.rows.push(vec![0.1, 1.0 / 3.0]);
    r.rows.push(vec![1e-300, -2.5]);
    let csv = r.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("a,b"));
    for (line, row) in lines.zip(&r.rows) {
        let parsed: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(&parsed, row);
    }
    r.check("x", false);
    assert!(!r.passed());
    let json: serde_json::Value = serde_json::from_str(&r.summary_json().unwrap()).unwrap();
    assert_eq!(json["passed"], false);
}

#[test]
fn lattice_sweep_overflows_small_grid() {
    let c = cfg(r#"{"experiment": "subcritical", "grid_n": 32, "sweep": [4, 8, 64]}"#);
    assert!(matches!(run(&c), Err(crate::Error::SupportOverflow(_))));
}

#[test]
fn lattice_and_radial_sweeps_agree() {
    // Coarse lattice sums against the continuum: the gap is Riemann-sum error.
    let base = r#""experiment": "subcritical", "scale": 1, "sweep": [4, 5, 6], "band": "one_to_two""#;
    let radial = run(&cfg(&format!("{{{base}}}"))).unwrap();
    let lattice = run(&cfg(&format!("{{{base}, \"grid_n\": 256, \"period\": {}}}", 16.0 * std::f64::consts::PI))).unwrap();
    for (a, b) in radial.column("full_norm").unwrap().iter().zip(lattice.column("full_norm").unwrap()) {
        assert!((a - b).abs() < 1e-3 * a, "{a} {b}");
    }
    assert_eq!(lattice.experiment, Experiment::Subcritical);
}

#[test]
fn sweeps_are_deterministic() {
    let c = cfg(r#"{"experiment": "subcritical", "sweep": [32, 64, 128]}"#);
    assert_eq!(run(&c).unwrap().to_csv(), run(&c).unwrap().to_csv());
}

#[test]
fn series_with_zero_potential_is_exact() {
    let r = run(&cfg(r#"{"experiment": "series_convergence", "strength": 0}"#)).unwrap();
    assert_eq!(r.values["ratio"], 0.0);
    assert!(r.values["oracle_error"] < 1e-14);
    assert!(r.passed());
}

#[test]
fn strichartz_unitary_pair_and_exclusion() {
    let g = crate::Grid::unit(2, 16).unwrap();
    let f = crate::random::random_field(&g, 3, Some(4.0));
    let ratio = strichartz_ratio(&f, f64::INFINITY, 2.0, 0.5, 16).unwrap();
    assert!((ratio - 1.0).abs() < 1e-12);
    assert!(matches!(
        strichartz_ratio(&f, 2.0, f64::INFINITY, 0.5, 16),
        Err(crate::Error::Inadmissible { .. })
    ));
}

#[test]
fn probe_tail_vanishes_without_potential() {
    let r = run(&cfg(r#"{"experiment": "regularity_probe", "grid_n": 16, "strength": 0, "data_scale": 2}"#)).unwrap();
    // Data live in |ξ|_∞ ≤ 2, so nothing reaches the ≥ 8 projections.
    for row in &r.rows {
        if row[1] >= 8.0 {
            assert_eq!(row[2], 0.0);
        }
    }
}

#[test]
fn solve_conserves_mass() {
    let r = run(&cfg(r#"{"experiment": "solve", "grid_n": 16}"#)).unwrap();
    assert!(r.passed(), "{:?}", r.values);
    assert!(r.values["dense_error"] < 1e-3);
}
