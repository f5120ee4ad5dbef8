use enso_gspt::analysis::{classify_trajectory, AnalysisThresholds};
use enso_gspt::geometry::folded_singularities;
use enso_gspt::regimes::solve_equilibrium_full;
use enso_gspt::simulate::{
    detect_events, integrate, steady_state_check, EventKind, IntegratorConfig, Method, Sample, Trajectory,
};
use enso_gspt::slowfast::mp_flow_explicit;
use enso_gspt::{Params, State};

fn params(c: f64, k: f64, a: f64) -> Params {
    Params::new(c, k, a, 0.01, 0.01).unwrap()
}

fn run(c: f64, k: f64, a: f64) -> Trajectory {
    integrate(&params(c, k, a), &IntegratorConfig::long_window()).unwrap()
}

#[test]
fn plane_start_converges_to_node() {
    let p = params(1.4, 0.2, 2.0);
    let cfg = IntegratorConfig { initial_state: State::new(0.0, -0.8, 0.9), t_end: 6e4, ..Default::default() };
    let tr = integrate(&p, &cfg).unwrap();
    assert!(tr.samples.iter().all(|s| s.x == 0.0));
    let last = tr.samples.last().unwrap();
    assert!(last.y.abs() < 1e-3 && (last.z - 0.2).abs() < 1e-6);
    assert!(!tr.events.iter().any(|e| matches!(e.kind, EventKind::FoldMinusCross | EventKind::FoldPlusCross)));
}

#[test]
fn v1_attractor_is_bounded_and_reaches_the_lower_fold_band() {
    let tr = run(1.4, 0.2, 2.0);
    let xq = folded_singularities(1.4, 0.2).unwrap().q_minus.x;
    let att = tr.attractor();
    let x_min = att.iter().map(|s| s.x).fold(f64::INFINITY, f64::min);
    assert!(x_min >= xq - 1.0 && x_min <= xq, "min x = {x_min}");
    assert!(tr.samples.iter().all(|s| s.x.abs() < 1e3 && s.y.abs() < 1e3 && s.z.abs() < 1e3));
    assert!(att.iter().any(|s| s.x.abs() < 1e-3));
    assert!(!steady_state_check(&tr, 0.2, 1e-4));
}

#[test]
fn above_onset_converges_to_full_equilibrium() {
    let p = params(1.4, 0.2, 6.0);
    let tr = integrate(&p, &IntegratorConfig::long_window()).unwrap();
    assert!(steady_state_check(&tr, 0.2, 1e-4));
    let e = solve_equilibrium_full(&p).unwrap();
    let last = tr.samples.last().unwrap().state();
    assert!((last - e.state()).norm() < 1e-4, "{last:?} vs {:?}", e.state());
    assert!(tr.without_transient().events.is_empty());
}

#[test]
fn low_a_v3_is_steady() {
    let tr = run(1.06, 0.4, 0.4);
    assert!(steady_state_check(&tr, 0.2, 1e-4));
}

#[test]
fn constant_tail_is_steady() {
    let p = params(1.4, 0.2, 6.0);
    let e = solve_equilibrium_full(&p).unwrap();
    let samples: Vec<Sample> = (0..100).map(|i| Sample { t: i as f64, x: e.x_hat, y: e.y_hat, z: e.z_hat }).collect();
    let tr = Trajectory {
        params: p,
        samples,
        events: Vec::new(),
        transient_end: 30.0,
        stats: Default::default(),
    };
    assert!(steady_state_check(&tr, 0.2, 1e-4));
    assert!(detect_events(&tr, 1.4, 0.2).is_empty());
}

#[test]
fn v1_event_motif_repeats() {
    let tr = run(1.4, 0.2, 2.0).without_transient();
    let mut seq: Vec<EventKind> = tr
        .events
        .iter()
        .map(|e| e.kind)
        .filter(|k| !matches!(k, EventKind::FoldPlusCross))
        .collect();
    seq.dedup();
    let motif = [EventKind::FoldMinusCross, EventKind::PlaneEntry, EventKind::FpCross, EventKind::PlaneExit];
    let start = seq.iter().position(|k| *k == motif[0]).unwrap();
    let body = &seq[start..];
    let cycles = body.len() / 4;
    assert!(cycles >= 5, "{} events", body.len());
    for (i, k) in body[..cycles * 4].iter().enumerate() {
        assert_eq!(*k, motif[i % 4], "position {i} of {body:?}");
    }
}

#[test]
fn plane_segments_follow_the_explicit_flow() {
    // start just off the attracting part of the plane
    let p = params(1.4, 0.2, 2.0);
    let cfg = IntegratorConfig { initial_state: State::new(-1e-9, -1.0, 0.9), t_end: 5e3, ..Default::default() };
    let tr = integrate(&p, &cfg).unwrap();
    let s = &tr.samples;
    let mut checked = 0;
    let mut i = 0;
    while i < s.len() {
        if s[i].x.abs() >= 1e-8 {
            i += 1;
            continue;
        }
        let start = s[i];
        let mut j = i;
        while j + 1 < s.len() && s[j + 1].x.abs() < 1e-8 {
            j += 1;
            let (y, z) = mp_flow_explicit(0.2, 0.01, 2.0, start.y, start.z, 0.01 * (s[j].t - start.t));
            assert!((s[j].y - y).abs() <= 1e-6 && (s[j].z - z).abs() <= 1e-6, "t = {}", s[j].t);
            checked += 1;
        }
        i = j + 1;
    }
    assert!(checked > 20, "{checked} samples checked");
}

fn stats(tr: &Trajectory) -> (f64, f64, f64) {
    let cl = classify_trajectory(tr, &AnalysisThresholds::default()).unwrap();
    (cl.x_range.0, cl.x_range.1, cl.period_estimate.unwrap())
}

#[test]
fn tolerance_halving_keeps_attractor_statistics() {
    let p = params(1.4, 0.2, 2.0);
    let base = IntegratorConfig::long_window();
    let fine = IntegratorConfig { rel_tol: base.rel_tol / 2.0, abs_tol: base.abs_tol / 2.0, ..base };
    let (a0, a1, ap) = stats(&integrate(&p, &base).unwrap());
    let (b0, b1, bp) = stats(&integrate(&p, &fine).unwrap());
    let range = a1 - a0;
    assert!((a0 - b0).abs() < 0.01 * range && (a1 - b1).abs() < 0.01 * range);
    assert!((ap - bp).abs() < 0.01 * ap, "{ap} vs {bp}");
}

#[test]
fn explicit_method_agrees_on_classification() {
    let p = params(1.4, 0.2, 2.0);
    let implicit = integrate(&p, &IntegratorConfig::long_window()).unwrap();
    let cfg = IntegratorConfig { method: Method::ExplicitAdaptive, ..IntegratorConfig::long_window() };
    let explicit = integrate(&p, &cfg).unwrap();
    let th = AnalysisThresholds::default();
    let (a, b) = (classify_trajectory(&implicit, &th).unwrap(), classify_trajectory(&explicit, &th).unwrap());
    assert_eq!(a.pattern, b.pattern);
    assert_eq!(a.has_plateaus, b.has_plateaus);
    assert!((a.period_estimate.unwrap() - b.period_estimate.unwrap()).abs() < 0.01 * a.period_estimate.unwrap());
}

#[test]
fn invalid_configurations_are_rejected() {
    let p = params(1.4, 0.2, 2.0);
    for cfg in [
        IntegratorConfig { rel_tol: 0.0, ..Default::default() },
        IntegratorConfig { t_end: -1.0, ..Default::default() },
        IntegratorConfig { sample_stride: 0, ..Default::default() },
        IntegratorConfig { initial_state: State::new(0.5, 0.0, 0.0), ..Default::default() },
    ] {
        assert!(integrate(&p, &cfg).is_err(), "{cfg:?}");
    }
}
