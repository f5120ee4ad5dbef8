//! Adaptive integration of the full system with dense sampling and
//! detection of geometric events.
//!
//! Trajectories off the plane are integrated in the coordinates
//! `(u, y, z)` with `x = s e^u`, `s = sign(x0)`. The plane is then never
//! crossed and the long passages near it, where `x` shrinks to
//! `1e-30` and below, stay well resolved. A trajectory started on the plane
//! is integrated as the planar linear system with `x = 0` exactly.

mod dopri;
mod events;
mod radau;

pub use events::{detect_events, Event, EventKind, PLANE_EPS};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::{rhs_full, Params, State};

pub(crate) trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N]) -> [f64; N];
    fn jac(&self, t: f64, y: &[f64; N]) -> [[f64; N]; N];
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct StepperOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub h0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ImplicitAdaptive,
    ExplicitAdaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub t_end: f64,
    pub initial_state: State,
    pub method: Method,
    /// Keep every `sample_stride`-th sample (events use all samples).
    pub sample_stride: usize,
    /// Leading fraction of the run discarded as transient by the analysis.
    pub transient_fraction: f64,
    /// When set, `t_end` is raised to `n / (delta rho a)`, i.e. `n` time
    /// constants of the slowest linear rate.
    pub slow_cycles: Option<f64>,
    /// Largest `|x|` jump between consecutive samples before interior
    /// points are filled in from the dense output.
    pub max_sample_dx: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_step: 10.0,
            t_end: 1e5,
            initial_state: State::new(-1.0, -1.0, 0.5),
            method: Method::ImplicitAdaptive,
            sample_stride: 1,
            transient_fraction: 0.3,
            slow_cycles: None,
            max_sample_dx: 0.02,
        }
    }
}

impl IntegratorConfig {
    /// Defaults with `t_end` scaled to cover 20 slow time constants, which
    /// the regimes with small `a` need to reach their attractor.
    pub fn long_window() -> Self {
        Self { slow_cycles: Some(20.0), ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return domain("tolerances must be positive");
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return domain("t_end must be positive and finite");
        }
        if !(self.max_step > 0.0) {
            return domain("max_step must be positive");
        }
        if self.sample_stride == 0 {
            return domain("sample_stride must be at least 1");
        }
        if !(0.0..1.0).contains(&self.transient_fraction) {
            return domain("transient_fraction must lie in [0, 1)");
        }
        if !self.initial_state.is_finite() {
            return domain("initial state must be finite");
        }
        Ok(())
    }

    pub fn effective_t_end(&self, p: &Params) -> f64 {
        match self.slow_cycles {
            Some(n) => self.t_end.max(n / (p.delta() * p.rho() * p.a())),
            None => self.t_end,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Sample {
    pub fn state(&self) -> State {
        State::new(self.x, self.y, self.z)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub params: Params,
    pub samples: Vec<Sample>,
    pub events: Vec<Event>,
    /// Samples before this time belong to the transient.
    pub transient_end: f64,
    pub stats: IntegrationStats,
}

impl Trajectory {
    /// Samples after the transient.
    pub fn attractor(&self) -> &[Sample] {
        let i = self.samples.partition_point(|s| s.t < self.transient_end);
        &self.samples[i..]
    }

    /// Copy with the transient removed.
    pub fn without_transient(&self) -> Trajectory {
        Trajectory {
            params: self.params,
            samples: self.attractor().to_vec(),
            events: self.events.iter().filter(|e| e.t >= self.transient_end).cloned().collect(),
            transient_end: self.transient_end,
            stats: self.stats,
        }
    }

    /// Copy keeping every `stride`-th sample and the last one.
    pub fn thinned(&self, stride: usize) -> Trajectory {
        let stride = stride.max(1);
        let mut samples: Vec<Sample> = self.samples.iter().step_by(stride).copied().collect();
        if let (Some(l), Some(s)) = (self.samples.last(), samples.last()) {
            if l.t != s.t {
                samples.push(*l);
            }
        }
        Trajectory { samples, ..self.clone() }
    }
}

struct LogSystem {
    p: Params,
    sign: f64,
}

impl OdeSystem<3> for LogSystem {
    fn rhs(&self, _t: f64, v: &[f64; 3]) -> [f64; 3] {
        let (c, k, a, d, r) = (self.p.c(), self.p.k(), self.p.a(), self.p.delta(), self.p.rho());
        let x = self.sign * v[0].exp();
        let (y, z) = (v[1], v[2]);
        [
            x + y + c * (1.0 - (x + z).tanh()) + r * d * (x - a),
            -r * d * (a * y + x * x),
            d * (k - z - 0.5 * x),
        ]
    }

    fn jac(&self, _t: f64, v: &[f64; 3]) -> [[f64; 3]; 3] {
        let (c, a, d, r) = (self.p.c(), self.p.a(), self.p.delta(), self.p.rho());
        let x = self.sign * v[0].exp();
        let t = (x + v[2]).tanh();
        let s2 = 1.0 - t * t;
        [
            [x * (1.0 - c * s2) + r * d * x, 1.0, -c * s2],
            [-2.0 * r * d * x * x, -r * d * a, 0.0],
            [-0.5 * d * x, 0.0, -d],
        ]
    }
}

struct PlaneSystem {
    p: Params,
}

impl OdeSystem<2> for PlaneSystem {
    fn rhs(&self, _t: f64, v: &[f64; 2]) -> [f64; 2] {
        let (k, a, d, r) = (self.p.k(), self.p.a(), self.p.delta(), self.p.rho());
        [-r * d * a * v[0], d * (k - v[1])]
    }

    fn jac(&self, _t: f64, _v: &[f64; 2]) -> [[f64; 2]; 2] {
        let (a, d, r) = (self.p.a(), self.p.delta(), self.p.rho());
        [[-r * d * a, 0.0], [0.0, -d]]
    }
}

trait Stepper<const N: usize> {
    fn advance(&mut self, t_limit: f64) -> Result<()>;
    fn time(&self) -> f64;
    fn value(&self) -> [f64; N];
    fn interpolate(&self, t: f64) -> [f64; N];
    fn stats(&self) -> IntegrationStats;
}

impl<const N: usize> Stepper<N> for radau::Radau5<'_, N> {
    fn advance(&mut self, t_limit: f64) -> Result<()> {
        self.step(t_limit)
    }
    fn time(&self) -> f64 {
        self.t
    }
    fn value(&self) -> [f64; N] {
        self.y
    }
    fn interpolate(&self, t: f64) -> [f64; N] {
        self.dense(t)
    }
    fn stats(&self) -> IntegrationStats {
        IntegrationStats { accepted: self.n_accepted, rejected: self.n_rejected }
    }
}

impl<const N: usize> Stepper<N> for dopri::DormandPrince<'_, N> {
    fn advance(&mut self, t_limit: f64) -> Result<()> {
        self.step(t_limit)
    }
    fn time(&self) -> f64 {
        self.t
    }
    fn value(&self) -> [f64; N] {
        self.y
    }
    fn interpolate(&self, t: f64) -> [f64; N] {
        self.dense(t)
    }
    fn stats(&self) -> IntegrationStats {
        IntegrationStats { accepted: self.n_accepted, rejected: self.n_rejected }
    }
}

fn run<const N: usize>(
    stepper: &mut dyn Stepper<N>,
    t_end: f64,
    max_dx: f64,
    to_state: &dyn Fn(&[f64; N]) -> State,
    samples: &mut Vec<Sample>,
) -> Result<()> {
    let mut prev = to_state(&stepper.value());
    while stepper.time() < t_end {
        let t0 = stepper.time();
        stepper.advance(t_end)?;
        let t1 = stepper.time();
        let s = to_state(&stepper.value());
        if !s.is_finite() {
            return Err(Error::NonFinite { t: t1 });
        }
        let dx = (s.x - prev.x).abs();
        if dx > max_dx {
            let n = ((dx / max_dx).ceil() as usize).min(200);
            for i in 1..n {
                let t = t0 + (t1 - t0) * i as f64 / n as f64;
                let q = to_state(&stepper.interpolate(t));
                samples.push(Sample { t, x: q.x, y: q.y, z: q.z });
            }
        }
        samples.push(Sample { t: t1, x: s.x, y: s.y, z: s.z });
        prev = s;
    }
    Ok(())
}

/// Integrate the full system from `cfg.initial_state` over `[0, t_end]`.
pub fn integrate(p: &Params, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let t_end = cfg.effective_t_end(p);
    let s0 = cfg.initial_state;
    let opts = StepperOptions { rel_tol: cfg.rel_tol, abs_tol: cfg.abs_tol, max_step: cfg.max_step, h0: 1e-3 };
    let mut samples = vec![Sample { t: 0.0, x: s0.x, y: s0.y, z: s0.z }];
    let stats = if s0.x == 0.0 {
        let sys = PlaneSystem { p: *p };
        let y0 = [s0.y, s0.z];
        let conv = |v: &[f64; 2]| State::new(0.0, v[0], v[1]);
        match cfg.method {
            Method::ImplicitAdaptive => {
                let mut st = radau::Radau5::new(&sys, 0.0, y0, opts);
                run(&mut st, t_end, cfg.max_sample_dx, &conv, &mut samples)?;
                Stepper::stats(&st)
            }
            Method::ExplicitAdaptive => {
                let mut st = dopri::DormandPrince::new(&sys, 0.0, y0, opts);
                run(&mut st, t_end, cfg.max_sample_dx, &conv, &mut samples)?;
                Stepper::stats(&st)
            }
        }
    } else {
        let sign = s0.x.signum();
        let sys = LogSystem { p: *p, sign };
        let y0 = [s0.x.abs().ln(), s0.y, s0.z];
        let conv = move |v: &[f64; 3]| State::new(sign * v[0].exp(), v[1], v[2]);
        match cfg.method {
            Method::ImplicitAdaptive => {
                let mut st = radau::Radau5::new(&sys, 0.0, y0, opts);
                run(&mut st, t_end, cfg.max_sample_dx, &conv, &mut samples)?;
                Stepper::stats(&st)
            }
            Method::ExplicitAdaptive => {
                let mut st = dopri::DormandPrince::new(&sys, 0.0, y0, opts);
                run(&mut st, t_end, cfg.max_sample_dx, &conv, &mut samples)?;
                Stepper::stats(&st)
            }
        }
    };
    let mut traj = Trajectory {
        params: *p,
        samples,
        events: Vec::new(),
        transient_end: cfg.transient_fraction * t_end,
        stats,
    };
    traj.events = detect_events(&traj, p.c(), p.k());
    if cfg.sample_stride > 1 {
        traj = traj.thinned(cfg.sample_stride);
    }
    Ok(traj)
}

/// True when the trailing `window_fraction` of the run has an `x`-range
/// below `eps (1 + |mean x|)` and the final right-hand side is below 1e-6.
pub fn steady_state_check(traj: &Trajectory, window_fraction: f64, eps: f64) -> bool {
    let (first, last) = match (traj.samples.first(), traj.samples.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return false,
    };
    let t0 = last.t - window_fraction * (last.t - first.t);
    let i = traj.samples.partition_point(|s| s.t < t0);
    let w = &traj.samples[i..];
    let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for s in w {
        lo = lo.min(s.x);
        hi = hi.max(s.x);
        sum += s.x;
    }
    let mean = sum / w.len() as f64;
    let f = rhs_full(&traj.params, &last.state());
    (hi - lo) < eps * (1.0 + mean.abs()) && f.norm() < 1e-6
}

pub const STEADY_WINDOW: f64 = 0.2;
pub const STEADY_EPS: f64 = 1e-4;
