use enso_gspt::analysis::{
    classify_trajectory, detect_plateaus, extract_extrema, onset_bisection, sweep_a, AnalysisThresholds, ExtremumKind,
    Pattern, SaoLocation,
};
use enso_gspt::simulate::{integrate, IntegratorConfig, Sample};
use enso_gspt::{Error, Params, State};

fn classify_with(c: f64, k: f64, a: f64, cfg: &IntegratorConfig) -> enso_gspt::analysis::TrajectoryClass {
    let p = Params::new(c, k, a, 0.01, 0.01).unwrap();
    let tr = integrate(&p, cfg).unwrap();
    classify_trajectory(&tr, &AnalysisThresholds::default()).unwrap()
}

fn classify(c: f64, k: f64, a: f64) -> enso_gspt::analysis::TrajectoryClass {
    classify_with(c, k, a, &IntegratorConfig::long_window())
}

#[test]
fn monotone_and_constant_series_have_no_extrema() {
    let up: Vec<(f64, f64)> = (0..100).map(|i| (i as f64, i as f64 * 0.1)).collect();
    assert!(extract_extrema(&up, None).is_empty());
    let flat: Vec<(f64, f64)> = (0..100).map(|i| (i as f64, -1.0)).collect();
    assert!(extract_extrema(&flat, None).is_empty());
}

#[test]
fn sinusoid_extrema() {
    // 10 periods, 100 samples per period
    let s: Vec<(f64, f64)> = (0..=1000).map(|i| {
        let t = i as f64 * 0.01;
        (t, (2.0 * std::f64::consts::PI * t).sin())
    }).collect();
    let ex = extract_extrema(&s, None);
    let maxima = ex.iter().filter(|e| e.kind == ExtremumKind::Max).count();
    let minima = ex.iter().filter(|e| e.kind == ExtremumKind::Min).count();
    assert!((maxima as i64 - 10).abs() <= 1 && (minima as i64 - 10).abs() <= 1, "{maxima} {minima}");
    assert!(ex.windows(2).all(|w| w[0].kind != w[1].kind));
    for e in &ex {
        assert!((e.x.abs() - 1.0).abs() < 1e-2);
    }
}

#[test]
fn no_plateaus_away_from_the_plane() {
    let s: Vec<Sample> = (0..1000).map(|i| Sample { t: i as f64, x: -1.0, y: -0.5, z: 0.3 }).collect();
    assert!(detect_plateaus(&s, 1e-3, 50.0).is_empty());
}

#[test]
fn v1_relaxation_with_plateaus() {
    let cl = classify(1.4, 0.2, 2.0);
    assert_eq!(cl.pattern, Pattern::Relaxation);
    assert!(cl.has_plateaus);
    assert_eq!(cl.signature, vec![(1, 0)]);
}

#[test]
fn v1_mmo_with_saos_below() {
    let cl = classify(1.4, 0.2, 4.4);
    assert_eq!(cl.pattern, Pattern::Mmo);
    assert_eq!(cl.sao_location, SaoLocation::Below);
}

#[test]
fn v2_plateau_split() {
    assert!(classify(1.4, 0.4, 3.0).has_plateaus);
    let cl = classify(1.4, 0.4, 20.0);
    assert!(cl.is_oscillatory() && !cl.has_plateaus);
}

#[test]
fn v3_plateauless() {
    for a in [1.0, 5.0] {
        let cl = classify(1.06, 0.4, a);
        assert!(cl.is_oscillatory() && !cl.has_plateaus, "a = {a}: {cl:?}");
    }
}

#[test]
fn v4_sweep() {
    let grid = [0.05, 0.2, 2.0, 10.0];
    let out = sweep_a(1.4, 0.7, 0.01, 0.01, &grid, &IntegratorConfig::long_window(), &AnalysisThresholds::default());
    let cls: Vec<_> = out.into_iter().map(|e| e.result.unwrap()).collect();
    assert_eq!(cls[0].pattern, Pattern::SteadyState);
    assert_eq!(cls[1].pattern, Pattern::Mmo);
    assert!(cls[1].has_plateaus);
    assert_eq!(cls[1].sao_location, SaoLocation::Above);
    assert!(cls[2].is_oscillatory() && cls[2].has_plateaus);
    assert!(cls[3].is_oscillatory() && !cls[3].has_plateaus);
}

#[test]
fn v5_mmo_above() {
    let cl = classify(1.2, 0.7, 2.2);
    assert_eq!(cl.pattern, Pattern::Mmo);
    assert!(!cl.has_plateaus);
    assert_eq!(cl.sao_location, SaoLocation::Above);
}

#[test]
fn plateauless_relaxation_outside_the_regimes_table() {
    let cl = classify(1.5, 0.34, 7.78);
    assert_eq!(cl.pattern, Pattern::Relaxation);
    assert!(!cl.has_plateaus);
}

#[test]
fn steady_runs_have_empty_signature() {
    let cl = classify(1.4, 0.2, 6.0);
    assert_eq!(cl.pattern, Pattern::SteadyState);
    assert!(cl.signature.is_empty());
}

#[test]
fn classification_survives_thinning() {
    for (c, k, a) in [(1.4, 0.2, 2.0), (1.4, 0.2, 4.4), (1.4, 0.7, 0.2)] {
        let p = Params::new(c, k, a, 0.01, 0.01).unwrap();
        let tr = integrate(&p, &IntegratorConfig::long_window()).unwrap();
        let th = AnalysisThresholds::default();
        let full = classify_trajectory(&tr, &th).unwrap();
        let thin = classify_trajectory(&tr.thinned(2), &th).unwrap();
        assert_eq!(full.pattern, thin.pattern, "({c}, {k}, {a})");
        assert_eq!(full.has_plateaus, thin.has_plateaus, "({c}, {k}, {a})");
        assert_eq!(full.sao_location, thin.sao_location, "({c}, {k}, {a})");
    }
}

#[test]
fn sao_location_independent_of_initial_condition() {
    for (c, k, a) in [(1.4, 0.2, 4.4), (1.4, 0.7, 0.2), (1.2, 0.7, 2.2)] {
        let other = IntegratorConfig { initial_state: State::new(-0.5, -1.2, 0.8), ..IntegratorConfig::long_window() };
        assert_eq!(classify(c, k, a).sao_location, classify_with(c, k, a, &other).sao_location, "({c}, {k}, {a})");
    }
}

#[test]
fn sweep_edge_cases() {
    let cfg = IntegratorConfig::long_window();
    assert!(sweep_a(1.4, 0.2, 0.01, 0.01, &[], &cfg, &AnalysisThresholds::default()).is_empty());
    let out = sweep_a(1.4, 0.2, 0.01, 0.01, &[-1.0], &cfg, &AnalysisThresholds::default());
    assert!(out[0].result.is_err());
}

#[test]
fn onset_brackets() {
    let cfg = IntegratorConfig::long_window();
    let on = onset_bisection(1.4, 0.2, 0.01, 0.01, 4.0, 5.0, &cfg).unwrap();
    assert!(on.a_crit >= 4.4 && on.a_crit <= 4.7, "{on:?}");
    assert!(!on.steady_below);
    let on = onset_bisection(1.2, 0.7, 0.01, 0.01, 1.5, 3.0, &cfg).unwrap();
    assert!(on.a_crit >= 1.6 && on.a_crit <= 2.4, "{on:?}");
    assert!(on.steady_below);
    assert!(matches!(onset_bisection(1.4, 0.2, 0.01, 0.01, 5.0, 4.0, &cfg), Err(Error::Bracket(_))));
}
