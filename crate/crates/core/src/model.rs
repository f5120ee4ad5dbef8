//! Parameters, states and right-hand sides of the nondimensional and
//! dimensional ENSO systems.
//!
//! The nondimensional system in fast time `t` reads
//!
//! ```text
//! x' = x [x + y + c(1 - tanh(x + z))] + rho delta (x^2 - a x)
//! y' = -rho delta (a y + x^2)
//! z' = delta (k - z - x/2)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Soft upper bound on `c` above which [`Params::warnings`] reports.
pub const C_SOFT_MAX: f64 = 5.0;
/// Soft upper bound on `a` above which [`Params::warnings`] reports.
pub const A_SOFT_MAX: f64 = 100.0;
/// Threshold on `delta * rho * a` beyond which the timescale split degrades.
pub const SCALE_SEPARATION_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct RawParams {
    c: f64,
    k: f64,
    a: f64,
    delta: f64,
    rho: f64,
}

/// The five model constants. Construction validates them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct Params {
    c: f64,
    k: f64,
    a: f64,
    delta: f64,
    rho: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamWarning {
    ScaleSeparation,
    CAboveSoftBound,
    AAboveSoftBound,
}

impl Params {
    pub fn new(c: f64, k: f64, a: f64, delta: f64, rho: f64) -> Result<Self> {
        if ![c, k, a, delta, rho].iter().all(|v| v.is_finite()) {
            return domain("parameters must be finite");
        }
        if c <= 1.0 {
            return domain(format!("c must exceed 1, got {c}"));
        }
        if !(k > 0.0 && k < 1.0) {
            return domain(format!("k must lie in (0,1), got {k}"));
        }
        if a <= 0.0 {
            return domain(format!("a must be positive, got {a}"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return domain(format!("delta must lie in (0,1), got {delta}"));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return domain(format!("rho must lie in (0,1), got {rho}"));
        }
        Ok(Self { c, k, a, delta, rho })
    }

    /// Same constants with a different damping `a`.
    pub fn with_a(&self, a: f64) -> Result<Self> {
        Self::new(self.c, self.k, a, self.delta, self.rho)
    }

    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn warnings(&self) -> Vec<ParamWarning> {
        let mut w = Vec::new();
        if self.delta * self.rho * self.a > SCALE_SEPARATION_LIMIT {
            w.push(ParamWarning::ScaleSeparation);
        }
        if self.c > C_SOFT_MAX {
            w.push(ParamWarning::CAboveSoftBound);
        }
        if self.a > A_SOFT_MAX {
            w.push(ParamWarning::AAboveSoftBound);
        }
        w
    }
}

impl TryFrom<RawParams> for Params {
    type Error = crate::error::Error;
    fn try_from(r: RawParams) -> Result<Self> {
        Params::new(r.c, r.k, r.a, r.delta, r.rho)
    }
}

impl From<Params> for RawParams {
    fn from(p: Params) -> Self {
        RawParams { c: p.c, k: p.k, a: p.a, delta: p.delta, rho: p.rho }
    }
}

/// A point `(x, y, z)`, also used for time derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl State {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Soft domain flag: the studied regime has `x <= 0`.
    pub fn in_domain(&self) -> bool {
        self.x <= 0.0
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl std::ops::Sub for State {
    type Output = State;
    fn sub(self, o: State) -> State {
        State::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    Fast,
    Intermediate,
    Slow,
}

/// Right-hand side in fast time `t`.
pub fn rhs_full(p: &Params, s: &State) -> State {
    let (c, k, a, d, r) = (p.c, p.k, p.a, p.delta, p.rho);
    let State { x, y, z } = *s;
    let bracket = x + y + c * (1.0 - (x + z).tanh());
    State {
        // x is an exact factor of the first component, so the plane stays invariant
        x: x * (bracket + r * d * (x - a)),
        y: -r * d * (a * y + x * x),
        z: d * (k - z - 0.5 * x),
    }
}

/// Analytic Jacobian of [`rhs_full`], row-major.
pub fn jacobian_full(p: &Params, s: &State) -> [[f64; 3]; 3] {
    let (c, a, d, r) = (p.c, p.a, p.delta, p.rho);
    let State { x, y, z } = *s;
    let t = (x + z).tanh();
    let s2 = 1.0 - t * t;
    let bracket = x + y + c * (1.0 - t);
    [
        [
            bracket + x * (1.0 - c * s2) + r * d * (2.0 * x - a),
            x,
            -x * c * s2,
        ],
        [-2.0 * r * d * x, -r * d * a, 0.0],
        [-0.5 * d, 0.0, -d],
    ]
}

/// Right-hand side in fast (`t`), intermediate (`tau = delta t`) or slow
/// (`s = rho tau`) time.
pub fn rhs_in_formulation(p: &Params, s: &State, form: Formulation) -> State {
    let f = rhs_full(p, s);
    match form {
        Formulation::Fast => f,
        Formulation::Intermediate => f.scale(1.0 / p.delta),
        Formulation::Slow => f.scale(1.0 / (p.delta * p.rho)),
    }
}

/// Constants of the dimensional two-box model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionalParams {
    pub alpha: f64,
    pub t_r: f64,
    pub epsilon: f64,
    pub mu: f64,
    pub zeta: f64,
    pub r: f64,
    pub b: f64,
    pub l: f64,
    pub beta: f64,
    pub h: f64,
    pub z0: f64,
    pub hstar: f64,
    pub t_r0: f64,
    pub t_0: f64,
}

impl DimensionalParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.alpha, self.t_r, self.epsilon, self.mu, self.zeta, self.r, self.b, self.l,
            self.beta, self.h, self.z0, self.hstar, self.t_r0, self.t_0,
        ];
        if !all.iter().all(|v| v.is_finite()) {
            return domain("dimensional parameters must be finite");
        }
        if self.hstar == 0.0 {
            return domain("hstar must be nonzero");
        }
        if self.beta == 0.0 {
            return domain("beta must be nonzero");
        }
        Ok(())
    }
}

/// Western temperature `t1`, eastern temperature `t2`, thermocline depth `h1`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DimensionalState {
    pub t1: f64,
    pub t2: f64,
    pub h1: f64,
}

/// Subsurface temperature upwelled in the east.
pub fn t_sub(dp: &DimensionalParams, t1: f64, t2: f64, h1: f64) -> Result<f64> {
    if dp.hstar == 0.0 {
        return domain("t_sub: hstar must be nonzero");
    }
    if dp.beta == 0.0 {
        return domain("t_sub: beta must be nonzero");
    }
    let arg = (dp.h - dp.z0 + h1 + dp.b * dp.l * dp.mu * (t2 - t1) / dp.beta) / dp.hstar;
    Ok(0.5 * (dp.t_r + dp.t_0) - 0.5 * (dp.t_r - dp.t_r0) * arg.tanh())
}

pub fn rhs_dimensional(dp: &DimensionalParams, ds: &DimensionalState) -> Result<DimensionalState> {
    let DimensionalState { t1, t2, h1 } = *ds;
    let dt = t2 - t1;
    let ts = t_sub(dp, t1, t2, h1)?;
    Ok(DimensionalState {
        t1: -dp.alpha * (t1 - dp.t_r) - dp.epsilon * dp.mu * dt * dt,
        t2: -dp.alpha * (t2 - dp.t_r) + dp.zeta * dp.mu * dt * (t2 - ts),
        h1: dp.r * (-h1 - dp.b * dp.l * dp.mu * dt / (2.0 * dp.beta)),
    })
}
