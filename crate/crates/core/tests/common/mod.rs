//! Property checks shared by the property suite and the acceptance harness.
//! Each check runs a seeded proptest runner and returns the first
//! counterexample as an error message.

#![allow(dead_code)]

use enso_gspt::geometry::{
    classify_point, folded_singularities, g_graph, h_graph, project_fast, remoteness_gap, C_REMOTE_MAX, DEFAULT_TOL,
};
use enso_gspt::model::{jacobian_full, rhs_full};
use enso_gspt::regimes::{a_mp, a_qminus, a_qstar_direct, a_qstar_formula, d_mp};
use enso_gspt::simulate::{integrate, IntegratorConfig};
use enso_gspt::slowfast::{fibre_zeta, intermediate_rhs, mp_flow_explicit, wayinout_w};
use enso_gspt::{Error, Params, State};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

fn runner(cases: u32) -> TestRunner {
    let cfg = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(cfg, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

fn c_range() -> impl Strategy<Value = f64> {
    1.0001f64..5.0
}

fn k_range() -> impl Strategy<Value = f64> {
    0.001f64..0.999
}

/// Starting on `x = 0`, every sample keeps `x = 0` exactly.
pub fn plane_invariance() -> Result<(), String> {
    let s = (1.05f64..2.0, 0.05f64..0.95, 0.1f64..10.0, -2.0f64..1.0, -0.5f64..1.5);
    run(12, s, |(c, k, a, y0, z0)| {
        let p = Params::new(c, k, a, 0.01, 0.01).unwrap();
        let cfg = IntegratorConfig { t_end: 3000.0, initial_state: State::new(0.0, y0, z0), ..Default::default() };
        let tr = integrate(&p, &cfg).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(tr.samples.iter().all(|s| s.x == 0.0));
        prop_assert!(tr.samples.len() > 2);
        Ok(())
    })
}

/// `y_{q-} > y_{q+}` for 200 random `c` in `(c_lo, c_hi)`, with the gap
/// equal to `4 theta - 2 c tanh(theta)`.
pub fn remoteness_on(c_lo: f64, c_hi: f64) -> Result<(), String> {
    run(200, (c_lo..c_hi, k_range()), |(c, k)| {
        let fs = folded_singularities(c, k).unwrap();
        let gap = fs.q_minus.y - fs.q_plus.y;
        prop_assert!((gap - remoteness_gap(c).unwrap()).abs() <= 1e-12 * (1.0 + gap.abs()));
        prop_assert!(gap > 0.0, "y_q- - y_q+ = {gap} at c = {c}");
        Ok(())
    })
}

/// Remoteness over the range `c` in `(1, 5)`.
pub fn remoteness() -> Result<(), String> {
    remoteness_on(1.0001, 5.0)
}

/// Remoteness below the limit where the gap changes sign.
pub fn remoteness_below_limit() -> Result<(), String> {
    remoteness_on(1.0001, C_REMOTE_MAX)
}

/// Beyond the limit the order of `y_{q-}` and `y_{q+}` is reversed.
pub fn aligned_beyond_limit() -> Result<(), String> {
    run(200, (C_REMOTE_MAX + 1e-6..5.0, k_range()), |(c, k)| {
        let fs = folded_singularities(c, k).unwrap();
        prop_assert!(fs.q_minus.y < fs.q_plus.y, "c = {c}");
        Ok(())
    })
}

/// `y_{q-/+} = -d-/+` and the fold and `M_2S` constraints at `q-/+`.
pub fn folded_identities() -> Result<(), String> {
    run(256, (c_range(), k_range()), |(c, k)| {
        let fs = folded_singularities(c, k).unwrap();
        let (dm, dp) = d_mp(c, k).unwrap();
        prop_assert!((fs.q_minus.y + dm).abs() <= 1e-12);
        prop_assert!((fs.q_plus.y + dp).abs() <= 1e-12);
        let th = fs.theta;
        for (q, sign) in [(fs.q_minus, -1.0), (fs.q_plus, 1.0)] {
            prop_assert!((q.x + q.z - sign * th).abs() <= 1e-12);
            prop_assert!((q.z - (k - 0.5 * q.x)).abs() <= 1e-12);
            prop_assert!((q.y - h_graph(c, q.x, q.z)).abs() <= 1e-12);
        }
        Ok(())
    })
}

/// `W(z, z) = 0` for every admissible entry.
pub fn w_empty() -> Result<(), String> {
    run(256, (c_range(), k_range(), 0.1f64..20.0, -3.0f64..0.0, -1.0f64..2.0), |(c, k, a, y, z)| {
        prop_assume!((z - k).abs() > 1e-6);
        prop_assert_eq!(wayinout_w(c, k, a, 0.01, y, z, z).unwrap(), 0.0);
        Ok(())
    })
}

/// Graphs of `fibre_zeta` are tangent to the intermediate flow.
pub fn fibre_invariance() -> Result<(), String> {
    run(256, (1.01f64..3.0, k_range(), -2.5f64..-0.1, -1.0f64..2.0, -0.5f64..0.5), |(c, k, x0, z0, dx)| {
        let x = x0 + dx;
        let Ok(z) = fibre_zeta(c, x, x0, z0) else { return Ok(()) };
        let w = (x - x0 + c * (x0 + z0).tanh()) / c;
        let slope = -1.0 + 1.0 / (c * (1.0 - w * w));
        let (vx, vz) = intermediate_rhs(c, k, x, z);
        let mag = vx.hypot(vz);
        let cross = (vx * slope - vz).abs() / (1.0 + slope.abs());
        prop_assert!(cross <= 1e-9 * mag.max(1e-300) || mag == 0.0, "cross {cross:e}, |v| {mag:e}");
        Ok(())
    })
}

/// `g(x, h(x, z)) = z` wherever `g` is defined.
pub fn graph_round_trip() -> Result<(), String> {
    run(512, (c_range(), -3.0f64..0.0, -2.0f64..2.5), |(c, x, z)| {
        prop_assume!((x + z).abs() <= 2.5);
        let y = h_graph(c, x, z);
        match g_graph(c, x, y) {
            Ok(back) => prop_assert!((back - z).abs() <= 1e-12, "{back} vs {z}"),
            Err(e) => return Err(TestCaseError::fail(format!("g undefined at h(x, z): {e}"))),
        }
        Ok(())
    })
}

/// Simulated plane trajectories agree with the explicit plane flow.
pub fn plane_flow_vs_integrator() -> Result<(), String> {
    let s = (1.05f64..2.0, 0.05f64..0.95, 0.1f64..10.0, -2.0f64..1.0, -0.5f64..1.5);
    run(12, s, |(c, k, a, y0, z0)| {
        let (delta, rho) = (0.01, 0.01);
        let p = Params::new(c, k, a, delta, rho).unwrap();
        let cfg = IntegratorConfig { t_end: 2000.0, initial_state: State::new(0.0, y0, z0), ..Default::default() };
        let tr = integrate(&p, &cfg).map_err(|e| TestCaseError::fail(e.to_string()))?;
        for s in &tr.samples {
            let (y, z) = mp_flow_explicit(k, rho, a, y0, z0, delta * s.t);
            prop_assert!((s.y - y).abs() <= 1e-6 && (s.z - z).abs() <= 1e-6, "t = {}: ({}, {}) vs ({y}, {z})", s.t, s.y, s.z);
        }
        Ok(())
    })
}

fn grid(n: usize) -> impl Iterator<Item = (f64, f64)> {
    (0..n).flat_map(move |i| {
        let c = 1.0 + (i as f64 + 0.5) / n as f64;
        (0..n).map(move |j| (c, (j as f64 + 0.5) / n as f64))
    })
}

/// Closed form and direct evaluation of `A_{q*}` have opposite signs on a
/// 50 x 50 grid of `(1, 2] x (0, 1)` wherever the closed form is defined.
pub fn a_qstar_sign_agreement() -> Result<(), String> {
    let mut bad = Vec::new();
    for (c, k) in grid(50) {
        let direct = a_qstar_direct(c, k).unwrap();
        if let Ok(f) = a_qstar_formula(c, k) {
            if f.signum() == direct.signum() {
                bad.push(format!("({c:.3}, {k:.3}): {f:e} vs {direct:e}"));
            }
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(format!("{} disagreements: {}", bad.len(), bad.join("; ")))
    }
}

/// No grid point has both `A_{q-} < 0` and `A_{q*} < 0`.
pub fn d_curves_do_not_cross() -> Result<(), String> {
    for (c, k) in grid(100) {
        let aqm = a_qminus(c, k).unwrap();
        let aqs = a_qstar_formula(c, k).unwrap_or_else(|_| -a_qstar_direct(c, k).unwrap());
        if aqm < 0.0 && aqs < 0.0 {
            return Err(format!("both negative at ({c}, {k})"));
        }
    }
    Ok(())
}

/// `a+ < a-` wherever both thresholds exist and `q-/+` are remote.
pub fn threshold_order() -> Result<(), String> {
    run(512, (1.0001f64..C_REMOTE_MAX, k_range()), |(c, k)| {
        if let (Some(am), Some(ap)) = a_mp(c, k).unwrap() {
            prop_assert!(ap < am, "a+ = {ap}, a- = {am}");
        }
        Ok(())
    })
}

/// Analytic Jacobian against central differences.
pub fn jacobian_matches_differences() -> Result<(), String> {
    let s = (c_range(), k_range(), 0.1f64..20.0, -3.0f64..0.0, -3.0f64..1.0, -1.0f64..2.0);
    run(256, s, |(c, k, a, x, y, z)| {
        let p = Params::new(c, k, a, 0.01, 0.01).unwrap();
        let s = State::new(x, y, z);
        let j = jacobian_full(&p, &s);
        let h = 1e-6;
        for col in 0..3 {
            let mut e = [0.0; 3];
            e[col] = h;
            let sp = State::new(x + e[0], y + e[1], z + e[2]);
            let sm = State::new(x - e[0], y - e[1], z - e[2]);
            let (fp, fm) = (rhs_full(&p, &sp).to_array(), rhs_full(&p, &sm).to_array());
            for row in 0..3 {
                let fd = (fp[row] - fm[row]) / (2.0 * h);
                prop_assert!((fd - j[row][col]).abs() <= 1e-6 * (1.0 + fd.abs()), "J[{row}][{col}] = {} vs {fd}", j[row][col]);
            }
        }
        Ok(())
    })
}

/// Jumps from `q-` (and from `q+` when it lies in `x < 0`) land on an
/// attracting branch.
pub fn projection_lands_attracting() -> Result<(), String> {
    run(256, (1.01f64..3.0, k_range()), |(c, k)| {
        let fs = folded_singularities(c, k).unwrap();
        let mut starts = vec![fs.q_minus];
        if fs.q_plus.x < 0.0 {
            starts.push(fs.q_plus);
        }
        for q in starts {
            match project_fast(c, &q) {
                Ok((land, label)) => {
                    prop_assert!(label.is_attracting(), "{label:?}");
                    let cl = classify_point(c, k, DEFAULT_TOL, &land);
                    prop_assert!(cl.is_attracting() || cl.as_str() == "M2P_point", "{cl:?} at {land:?}");
                }
                Err(Error::NoLanding(_)) => {}
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
        Ok(())
    })
}

/// Criterion-6 suites in reporting order.
pub fn criterion_six() -> Vec<(&'static str, fn() -> Result<(), String>)> {
    vec![
        ("plane invariance", plane_invariance),
        ("remoteness", remoteness),
        ("y_q = -d identity", folded_identities),
        ("W(z,z) = 0", w_empty),
        ("fibre invariance", fibre_invariance),
        ("h/g round trip", graph_round_trip),
        ("explicit plane flow vs integrator", plane_flow_vs_integrator),
        ("A_q* sign agreement", a_qstar_sign_agreement),
    ]
}
