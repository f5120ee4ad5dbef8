//! Qualitative classification of trajectories: extrema, plateaus near the
//! plane, LAO/SAO signatures, and sweeps in `a`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Params;
use crate::simulate::{integrate, steady_state_check, IntegratorConfig, Sample, Trajectory, STEADY_EPS, STEADY_WINDOW};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    SteadyState,
    Relaxation,
    Mmo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SaoLocation {
    Above,
    Below,
    None,
}

impl Pattern {
    pub fn as_str(self) -> &'static str {
        match self {
            Pattern::SteadyState => "steady_state",
            Pattern::Relaxation => "relaxation",
            Pattern::Mmo => "mmo",
        }
    }
}

impl SaoLocation {
    pub fn as_str(self) -> &'static str {
        match self {
            SaoLocation::Above => "above",
            SaoLocation::Below => "below",
            SaoLocation::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryClass {
    pub pattern: Pattern,
    pub has_plateaus: bool,
    pub sao_location: SaoLocation,
    /// Epochs `(L, s)`: `L` large oscillations followed by `s` small ones.
    pub signature: Vec<(usize, usize)>,
    pub x_range: (f64, f64),
    /// Mean time between consecutive large-oscillation maxima.
    pub period_estimate: Option<f64>,
}

impl TrajectoryClass {
    pub fn is_oscillatory(&self) -> bool {
        self.pattern != Pattern::SteadyState
    }

    pub fn signature_string(&self) -> String {
        self.signature.iter().map(|(l, s)| format!("{l}^{s}")).collect::<Vec<_>>().join(" ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisThresholds {
    /// Share of the attractor's `x`-range separating large from small oscillations.
    pub lao_fraction: f64,
    /// Extremum prominence floor relative to the `x`-range.
    pub noise_floor_rel: f64,
    pub plateau_eps_x: f64,
    /// Minimum plateau duration; `None` means `0.5 / delta`.
    pub plateau_min_duration: Option<f64>,
    /// Relative positions bounding the lower and upper thirds.
    pub lower_third: f64,
    pub upper_third: f64,
    /// Allowed relative change of the `x`-range between the two halves of the window.
    pub stability_tol: f64,
    pub steady_window: f64,
    pub steady_eps: f64,
}

impl Default for AnalysisThresholds {
    fn default() -> Self {
        Self {
            lao_fraction: 0.5,
            noise_floor_rel: 1e-4,
            plateau_eps_x: 1e-3,
            plateau_min_duration: None,
            lower_third: 1.0 / 3.0,
            upper_third: 2.0 / 3.0,
            stability_tol: 0.2,
            steady_window: STEADY_WINDOW,
            steady_eps: STEADY_EPS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremumKind {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub t: f64,
    pub x: f64,
    pub kind: ExtremumKind,
}

/// Alternating extrema whose swings exceed `noise_floor` (default
/// `1e-4` of the global range). Extrema at the series ends are dropped.
pub fn extract_extrema(series: &[(f64, f64)], noise_floor: Option<f64>) -> Vec<Extremum> {
    let n = series.len();
    if n < 3 {
        return Vec::new();
    }
    let (lo, hi) = series.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &(_, x)| (a.min(x), b.max(x)));
    let range = hi - lo;
    if !(range > 0.0) {
        return Vec::new();
    }
    let floor = noise_floor.unwrap_or(1e-4 * range);
    let mut out = Vec::new();
    let push = |out: &mut Vec<Extremum>, i: usize, kind| {
        if i != 0 && i != n - 1 {
            out.push(Extremum { t: series[i].0, x: series[i].1, kind });
        }
    };
    let (mut dir, mut imax, mut imin) = (0i8, 0usize, 0usize);
    for i in 1..n {
        let x = series[i].1;
        match dir {
            0 => {
                if x > series[imax].1 {
                    imax = i;
                }
                if x < series[imin].1 {
                    imin = i;
                }
                if x - series[imin].1 > floor && imin < i {
                    push(&mut out, imin, ExtremumKind::Min);
                    dir = 1;
                    imax = i;
                } else if series[imax].1 - x > floor && imax < i {
                    push(&mut out, imax, ExtremumKind::Max);
                    dir = -1;
                    imin = i;
                }
            }
            1 => {
                if x > series[imax].1 {
                    imax = i;
                } else if series[imax].1 - x > floor {
                    push(&mut out, imax, ExtremumKind::Max);
                    dir = -1;
                    imin = i;
                }
            }
            _ => {
                if x < series[imin].1 {
                    imin = i;
                } else if x - series[imin].1 > floor {
                    push(&mut out, imin, ExtremumKind::Min);
                    dir = 1;
                    imax = i;
                }
            }
        }
    }
    // the first confirmed extremum may be an endpoint that was skipped,
    // so two of the same kind can follow each other
    let mut merged: Vec<Extremum> = Vec::with_capacity(out.len());
    for e in out {
        match merged.last_mut() {
            Some(last) if last.kind == e.kind => {
                let better = match e.kind {
                    ExtremumKind::Max => e.x > last.x,
                    ExtremumKind::Min => e.x < last.x,
                };
                if better {
                    *last = e;
                }
            }
            _ => merged.push(e),
        }
    }
    merged
}

/// Maximal intervals with `|x| < eps_x` lasting at least `min_duration`.
/// Crossing times are interpolated linearly in `ln |x|`.
pub fn detect_plateaus(samples: &[Sample], eps_x: f64, min_duration: f64) -> Vec<(f64, f64)> {
    let le = eps_x.ln();
    let cross = |a: &Sample, b: &Sample| {
        let (la, lb) = (a.x.abs().ln(), b.x.abs().ln());
        if la.is_finite() && lb.is_finite() && la != lb {
            a.t + (b.t - a.t) * ((le - la) / (lb - la)).clamp(0.0, 1.0)
        } else if la.is_finite() {
            // b is exactly on the plane
            b.t
        } else {
            a.t
        }
    };
    let mut out = Vec::new();
    let mut start: Option<f64> = None;
    for (i, s) in samples.iter().enumerate() {
        let inside = s.x.abs() < eps_x;
        match (inside, start) {
            (true, None) => start = Some(if i == 0 { s.t } else { cross(&samples[i - 1], s) }),
            (false, Some(t0)) => {
                let t1 = cross(&samples[i - 1], s);
                if t1 - t0 >= min_duration {
                    out.push((t0, t1));
                }
                start = None;
            }
            _ => {}
        }
    }
    if let (Some(t0), Some(last)) = (start, samples.last()) {
        if last.t - t0 >= min_duration {
            out.push((t0, last.t));
        }
    }
    out
}

struct Cycle {
    t: f64,
    large: bool,
    centre: f64,
}

fn cycles(ext: &[Extremum], range: f64, lao_fraction: f64) -> Vec<Cycle> {
    let mut out = Vec::new();
    for (j, e) in ext.iter().enumerate() {
        if e.kind != ExtremumKind::Max {
            continue;
        }
        let prev = j.checked_sub(1).map(|i| ext[i].x);
        let next = ext.get(j + 1).map(|m| m.x);
        let (span, trough) = match (prev, next) {
            (Some(a), Some(b)) => ((e.x - a).max(e.x - b), 0.5 * (a + b)),
            (Some(a), None) => (e.x - a, a),
            (None, Some(b)) => (e.x - b, b),
            (None, None) => continue,
        };
        out.push(Cycle { t: e.t, large: span >= lao_fraction * range, centre: 0.5 * (e.x + trough) });
    }
    out
}

fn signature(cyc: &[Cycle]) -> Vec<(usize, usize)> {
    let first = match cyc.iter().position(|c| c.large) {
        Some(i) => i,
        None => return Vec::new(),
    };
    let mut epochs: Vec<(usize, usize)> = Vec::new();
    let mut i = first;
    while i < cyc.len() {
        let mut l = 0;
        while i < cyc.len() && cyc[i].large {
            l += 1;
            i += 1;
        }
        let mut s = 0;
        while i < cyc.len() && !cyc[i].large {
            s += 1;
            i += 1;
        }
        epochs.push((l, s));
    }
    if epochs.iter().all(|&(_, s)| s == 0) {
        return vec![(1, 0)];
    }
    // the final epoch is cut off by the end of the window
    if epochs.len() > 1 {
        epochs.pop();
    }
    epochs.dedup();
    epochs
}

fn x_range(samples: &[Sample]) -> (f64, f64) {
    samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| (a.min(s.x), b.max(s.x)))
}

/// Classify the post-transient part of `traj`.
pub fn classify_trajectory(traj: &Trajectory, th: &AnalysisThresholds) -> Result<TrajectoryClass> {
    let att = traj.without_transient();
    let samples = &att.samples;
    if samples.len() < 3 {
        return Err(Error::Indeterminate("fewer than three samples after the transient".into()));
    }
    let (lo, hi) = x_range(samples);
    if steady_state_check(&att, th.steady_window, th.steady_eps) {
        return Ok(TrajectoryClass {
            pattern: Pattern::SteadyState,
            has_plateaus: false,
            sao_location: SaoLocation::None,
            signature: Vec::new(),
            x_range: (lo, hi),
            period_estimate: None,
        });
    }
    let range = hi - lo;
    let series: Vec<(f64, f64)> = samples.iter().map(|s| (s.t, s.x)).collect();
    let ext = extract_extrema(&series, Some(th.noise_floor_rel * range));
    let cyc = cycles(&ext, range, th.lao_fraction);
    if !cyc.iter().any(|c| c.large) {
        return Err(Error::Indeterminate("neither a steady state nor a large oscillation".into()));
    }
    let tmid = 0.5 * (samples[0].t + samples[samples.len() - 1].t);
    let split = samples.partition_point(|s| s.t < tmid);
    let (r1, r2) = (x_range(&samples[..split]), x_range(&samples[split..]));
    let (w1, w2) = (r1.1 - r1.0, r2.1 - r2.0);
    if (w1 - w2).abs() > th.stability_tol * range {
        return Err(Error::Indeterminate(format!(
            "x-range differs between window halves ({w1:.4} vs {w2:.4})"
        )));
    }
    let sig = signature(&cyc);
    let mmo = sig.iter().any(|&(_, s)| s > 0);
    let sao_location = if mmo {
        let first_large = cyc.iter().position(|c| c.large).unwrap_or(0);
        let small: Vec<f64> = cyc[first_large..].iter().filter(|c| !c.large).map(|c| c.centre).collect();
        let mean = small.iter().sum::<f64>() / small.len() as f64;
        let rel = (mean - lo) / range;
        if rel > th.upper_third {
            SaoLocation::Above
        } else if rel < th.lower_third {
            SaoLocation::Below
        } else {
            return Err(Error::Indeterminate(format!("small oscillations centred at relative height {rel:.3}")));
        }
    } else {
        SaoLocation::None
    };
    let min_dur = th.plateau_min_duration.unwrap_or(0.5 / traj.params.delta());
    let has_plateaus = !detect_plateaus(samples, th.plateau_eps_x, min_dur).is_empty();
    let lt: Vec<f64> = cyc.iter().filter(|c| c.large).map(|c| c.t).collect();
    let period_estimate = (lt.len() >= 2).then(|| (lt[lt.len() - 1] - lt[0]) / (lt.len() - 1) as f64);
    Ok(TrajectoryClass {
        pattern: if mmo { Pattern::Mmo } else { Pattern::Relaxation },
        has_plateaus,
        sao_location,
        signature: sig,
        x_range: (lo, hi),
        period_estimate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub a: f64,
    pub result: std::result::Result<TrajectoryClass, String>,
}

/// Simulate and classify each `a` independently, in parallel, keeping the
/// input order.
pub fn sweep_a(c: f64, k: f64, delta: f64, rho: f64, a_grid: &[f64], cfg: &IntegratorConfig, th: &AnalysisThresholds) -> Vec<SweepEntry> {
    a_grid
        .par_iter()
        .map(|&a| {
            let result = Params::new(c, k, a, delta, rho)
                .and_then(|p| integrate(&p, cfg))
                .and_then(|tr| classify_trajectory(&tr, th))
                .map_err(|e| e.to_string());
            SweepEntry { a, result }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Onset {
    pub a_crit: f64,
    pub bracket: (f64, f64),
    pub steady_below: bool,
    pub evaluations: usize,
}

/// Whether the run at `p` settles to a steady state.
pub fn is_steady(p: &Params, cfg: &IntegratorConfig) -> Result<bool> {
    let tr = integrate(p, cfg)?;
    Ok(steady_state_check(&tr, STEADY_WINDOW, STEADY_EPS))
}

/// Bisect on `a` for the switch between steady and oscillatory behaviour.
pub fn onset_bisection(c: f64, k: f64, delta: f64, rho: f64, a_lo: f64, a_hi: f64, cfg: &IntegratorConfig) -> Result<Onset> {
    if !(a_lo < a_hi) {
        return Err(Error::Bracket(format!("need a_lo < a_hi, got [{a_lo}, {a_hi}]")));
    }
    let p = |a: f64| Params::new(c, k, a, delta, rho);
    let (s_lo, s_hi) = (is_steady(&p(a_lo)?, cfg)?, is_steady(&p(a_hi)?, cfg)?);
    if s_lo == s_hi {
        return Err(Error::Bracket(format!(
            "same behaviour ({}) at both ends of [{a_lo}, {a_hi}]",
            if s_lo { "steady" } else { "oscillatory" }
        )));
    }
    let (mut lo, mut hi, mut n) = (a_lo, a_hi, 2);
    while hi - lo > 1e-2 {
        let m = 0.5 * (lo + hi);
        if is_steady(&p(m)?, cfg)? == s_lo {
            lo = m;
        } else {
            hi = m;
        }
        n += 1;
    }
    Ok(Onset { a_crit: 0.5 * (lo + hi), bracket: (lo, hi), steady_below: s_lo, evaluations: n })
}
