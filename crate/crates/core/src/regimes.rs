//! Classification of `(c, k)` into the regions `D1..D3`, `A1..A3` and
//! `V1..V6`, the onset thresholds `a-`, `a+`, `a_p`, and equilibria.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{bisect, folded_singularities, h_graph, tanh_theta, theta};
use crate::model::{jacobian_full, rhs_full, Params, State};

/// Classifier values closer to zero than this are reported as degenerate.
pub const DEGENERATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DLabel {
    D1,
    D2,
    D3,
    #[serde(rename = "degenerate")]
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ALabel {
    A1,
    A2,
    A3,
    #[serde(rename = "degenerate")]
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VLabel {
    V1,
    V2,
    V3,
    V4,
    V5,
    V6,
    #[serde(rename = "unclassified")]
    Unclassified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveSide {
    Above,
    Below,
    On,
}

macro_rules! label_str {
    ($t:ty { $($v:ident => $s:expr),* $(,)? }) => {
        impl $t {
            pub fn as_str(self) -> &'static str {
                match self { $(<$t>::$v => $s),* }
            }
        }
        impl std::fmt::Display for $t {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

label_str!(DLabel { D1 => "D1", D2 => "D2", D3 => "D3", Degenerate => "degenerate" });
label_str!(ALabel { A1 => "A1", A2 => "A2", A3 => "A3", Degenerate => "degenerate" });
label_str!(VLabel {
    V1 => "V1", V2 => "V2", V3 => "V3", V4 => "V4", V5 => "V5", V6 => "V6",
    Unclassified => "unclassified",
});
label_str!(CurveSide { Above => "above", Below => "below", On => "on" });

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub c: f64,
    pub k: f64,
    #[serde(rename = "A_qminus")]
    pub a_qminus: f64,
    /// Closed form; absent when `y_{q+} >= 0`, where its arctanh has no value.
    #[serde(rename = "A_qstar")]
    pub a_qstar: Option<f64>,
    #[serde(rename = "A_qstar_direct")]
    pub a_qstar_direct: f64,
    pub d_minus: f64,
    pub d_plus: f64,
    #[serde(rename = "D_label")]
    pub d_label: DLabel,
    #[serde(rename = "A_label")]
    pub a_label: ALabel,
    #[serde(rename = "V_label")]
    pub v_label: VLabel,
    pub curve_c_side: CurveSide,
    pub a_minus: Option<f64>,
    pub a_plus: Option<f64>,
    pub a_p: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumKind {
    Reduced,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSolution {
    pub x_hat: f64,
    pub y_hat: f64,
    pub z_hat: f64,
    pub kind: EquilibriumKind,
    /// Residual of the defining equations (max norm).
    pub residual: f64,
    /// For the full kind, distance to the reduced equilibrium.
    pub distance_to_reduced: Option<f64>,
    pub all_roots: Vec<f64>,
    pub unique: bool,
}

impl EquilibriumSolution {
    pub fn state(&self) -> State {
        State::new(self.x_hat, self.y_hat, self.z_hat)
    }
}

/// Sign of `F_x` at the projection of `q-` onto the plane; negative iff
/// the projection lies on the attracting part of the plane.
pub fn a_qminus(c: f64, k: f64) -> Result<f64> {
    let q = folded_singularities(c, k)?.q_minus;
    Ok(q.y + c * (1.0 - q.z.tanh()))
}

/// Four-term classifier for `q*`, the point of the lower fold line at the
/// height `y_{q+}`; positive iff its projection lies on the attracting
/// part of the plane.
pub fn a_qstar_formula(c: f64, k: f64) -> Result<f64> {
    let fs = folded_singularities(c, k)?;
    let y = fs.q_plus.y;
    let w = y / c + 1.0;
    if !(w > -1.0 && w < 1.0) {
        return domain(format!("A_q*: arctanh argument {w} outside (-1, 1)"));
    }
    Ok(y - fs.theta - w.atanh() + c * (1.0 + fs.theta.tanh()))
}

/// `F_x` at the projection of `q*` onto the plane, negative iff attracting.
pub fn a_qstar_direct(c: f64, k: f64) -> Result<f64> {
    let fs = folded_singularities(c, k)?;
    let y = fs.q_plus.y;
    let tt = tanh_theta(c)?;
    let x = -y - c * (1.0 + tt);
    let z = -fs.theta - x;
    Ok(y + c * (1.0 - z.tanh()))
}

/// `d- , d+`: the denominators of the onset thresholds.
pub fn d_mp(c: f64, k: f64) -> Result<(f64, f64)> {
    let fs = folded_singularities(c, k)?;
    let d = |x: f64| x + c * (1.0 - (0.5 * x + k).tanh());
    Ok((d(fs.q_minus.x), d(fs.q_plus.x)))
}

/// Thresholds `a- = x_{q-}^2 / d-` and `a+ = x_{q+}^2 / d+` where the
/// denominators are positive.
pub fn a_mp(c: f64, k: f64) -> Result<(Option<f64>, Option<f64>)> {
    let fs = folded_singularities(c, k)?;
    let (dm, dp) = d_mp(c, k)?;
    let f = |x: f64, d: f64| if d > 0.0 { Some(x * x / d) } else { None };
    Ok((f(fs.q_minus.x, dm), f(fs.q_plus.x, dp)))
}

/// Side of the curve where `q+` crosses the plane: `above` iff `x_{q+} < 0`,
/// which is `k > theta(c)`.
pub fn curve_c_side(c: f64, k: f64) -> Result<CurveSide> {
    let x = folded_singularities(c, k)?.q_plus.x;
    Ok(if x.abs() <= 1e-12 {
        CurveSide::On
    } else if x < 0.0 {
        CurveSide::Above
    } else {
        CurveSide::Below
    })
}

pub fn classify_regions(c: f64, k: f64) -> Result<RegimeReport> {
    if !(k > 0.0 && k < 1.0) {
        return domain(format!("k must lie in (0,1), got {k}"));
    }
    let aqm = a_qminus(c, k)?;
    let aqs = a_qstar_formula(c, k).ok();
    let aqd = a_qstar_direct(c, k)?;
    let (dm, dp) = d_mp(c, k)?;
    let near = |v: f64| v.abs() < DEGENERATE_TOL;
    // The direct value has the opposite sign convention.
    let aqs_sign = aqs.unwrap_or(-aqd);
    let d_label = if near(aqm) || near(aqs_sign) || aqs.is_some_and(|v| v.signum() == aqd.signum()) {
        DLabel::Degenerate
    } else if aqm < 0.0 && aqs_sign > 0.0 {
        DLabel::D1
    } else if aqm > 0.0 && aqs_sign > 0.0 {
        DLabel::D2
    } else if aqm > 0.0 && aqs_sign < 0.0 {
        DLabel::D3
    } else {
        DLabel::Degenerate
    };
    let a_label = if near(dm) || near(dp) {
        ALabel::Degenerate
    } else if dm > 0.0 && dp > 0.0 {
        ALabel::A1
    } else if dm < 0.0 && dp > 0.0 {
        ALabel::A2
    } else if dm < 0.0 && dp < 0.0 {
        ALabel::A3
    } else {
        ALabel::Degenerate
    };
    use ALabel::*;
    use DLabel::*;
    let v_label = match (d_label, a_label) {
        (D1, A1) => VLabel::V1,
        (D2, A1) => VLabel::V2,
        (D3, A1) => VLabel::V3,
        (D2, A2) => VLabel::V4,
        (D3, A2) => VLabel::V5,
        (D3, A3) => VLabel::V6,
        _ => VLabel::Unclassified,
    };
    let (a_minus, a_plus) = a_mp(c, k)?;
    let a_p = if d_label == D2 { a_p(c, k)? } else { None };
    Ok(RegimeReport {
        c,
        k,
        a_qminus: aqm,
        a_qstar: aqs,
        a_qstar_direct: aqd,
        d_minus: dm,
        d_plus: dp,
        d_label,
        a_label,
        v_label,
        curve_c_side: curve_c_side(c, k)?,
        a_minus,
        a_plus,
        a_p,
    })
}

fn eqbria(c: f64, k: f64, a: f64, x: f64) -> f64 {
    a * x - x * x + a * c * (1.0 - (0.5 * x + k).tanh())
}

/// All roots of the reduced equilibrium equation on `[x_{q-} - 10, 0]`.
pub fn solve_equilibrium_reduced(c: f64, k: f64, a: f64) -> Result<EquilibriumSolution> {
    if !(a > 0.0) {
        return domain(format!("a must be positive, got {a}"));
    }
    let fs = folded_singularities(c, k)?;
    let lo = fs.q_minus.x - 10.0;
    let g = |x: f64| eqbria(c, k, a, x);
    let n = 256;
    let h = -lo / n as f64;
    let mut roots = Vec::new();
    let mut x0 = lo;
    let mut g0 = g(x0);
    for i in 1..=n {
        let x1 = if i == n { 0.0 } else { lo + h * i as f64 };
        let g1 = g(x1);
        if g0 == 0.0 {
            roots.push(x0);
        } else if g0.signum() != g1.signum() && g1 != 0.0 {
            roots.push(bisect(&g, x0, x1)?);
        }
        x0 = x1;
        g0 = g1;
    }
    let x = *roots
        .iter()
        .max_by(|a, b| a.total_cmp(b))
        .ok_or_else(|| Error::NoRoot(format!("no reduced equilibrium for (c,k,a) = ({c},{k},{a})")))?;
    let z = k - 0.5 * x;
    let y = h_graph(c, x, z);
    let residual = g(x).abs().max((a * y + x * x).abs());
    Ok(EquilibriumSolution {
        x_hat: x,
        y_hat: y,
        z_hat: z,
        kind: EquilibriumKind::Reduced,
        residual,
        distance_to_reduced: None,
        unique: roots.len() == 1,
        all_roots: roots,
    })
}

/// Newton iteration on the full right-hand side from `seed`.
pub fn newton_equilibrium(p: &Params, seed: State, max_iter: usize) -> Result<State> {
    let mut s = seed;
    let mut res = f64::INFINITY;
    for _ in 0..max_iter {
        let f = rhs_full(p, &s);
        res = f.x.abs().max(f.y.abs()).max(f.z.abs());
        if res <= 1e-13 {
            return Ok(s);
        }
        let j = nalgebra::Matrix3::from_fn(|r, c| jacobian_full(p, &s)[r][c]);
        let rhs = nalgebra::Vector3::new(-f.x, -f.y, -f.z);
        let dx = match j.lu().solve(&rhs) {
            Some(d) if d.iter().all(|v| v.is_finite()) => d,
            _ => break,
        };
        s = State::new(s.x + dx[0], s.y + dx[1], s.z + dx[2]);
        if !s.is_finite() {
            break;
        }
    }
    let f = rhs_full(p, &s);
    let r = f.x.abs().max(f.y.abs()).max(f.z.abs());
    if r <= 1e-12 {
        return Ok(s);
    }
    Err(Error::NonConvergence { iterations: max_iter, residual: if r.is_finite() { r } else { res } })
}

/// Equilibrium of the full system, seeded at the reduced one.
pub fn solve_equilibrium_full(p: &Params) -> Result<EquilibriumSolution> {
    let red = solve_equilibrium_reduced(p.c(), p.k(), p.a())?;
    let s = newton_equilibrium(p, red.state(), 100)?;
    let f = rhs_full(p, &s);
    Ok(EquilibriumSolution {
        x_hat: s.x,
        y_hat: s.y,
        z_hat: s.z,
        kind: EquilibriumKind::Full,
        residual: f.x.abs().max(f.y.abs()).max(f.z.abs()),
        distance_to_reduced: Some((s - red.state()).norm()),
        all_roots: red.all_roots,
        unique: red.unique,
    })
}

/// The point `p_*` of the lower fold line whose fast fibre ends on `F_P`.
pub fn p_star(c: f64) -> Result<State> {
    let th = theta(c)?;
    let tt = tanh_theta(c)?;
    // y + c(1 - tanh z) along the fold line z = -x - theta, y = h(x, z)
    let a = |x: f64| -x - c * tt + c * (x + th).tanh();
    // x = 0 is a tangential zero; the sign change lies strictly inside
    let (lo, hi) = (-20.0, -1e-6 * th.max(1e-3));
    let n = 4000;
    let h = (hi - lo) / n as f64;
    let mut brackets = Vec::new();
    let mut x0 = lo;
    let mut a0 = a(x0);
    for i in 1..=n {
        let x1 = if i == n { hi } else { lo + h * i as f64 };
        let a1 = a(x1);
        if a0.signum() != a1.signum() {
            brackets.push((x0, x1));
        }
        x0 = x1;
        a0 = a1;
    }
    match brackets.as_slice() {
        [(l, r)] => {
            let x = bisect(&a, *l, *r)?;
            let z = -x - th;
            Ok(State::new(x, h_graph(c, x, z), z))
        }
        [] => Err(Error::NoRoot(format!("p_*: no sign change along the fold line for c = {c}"))),
        _ => Err(Error::NoRoot(format!("p_*: {} sign changes along the fold line for c = {c}", brackets.len()))),
    }
}

/// Value of `a` at which the reduced equilibrium has `y = y_*`; defined
/// for `(c, k)` in `D2`.
pub fn a_p(c: f64, k: f64) -> Result<Option<f64>> {
    let fs = folded_singularities(c, k)?;
    let ys = p_star(c)?.y;
    let target = -ys;
    let d = |x: f64| x + c * (1.0 - (0.5 * x + k).tanh()) - target;
    let (lo, hi) = (fs.q_minus.x, 0.0);
    let n = 256;
    let h = (hi - lo) / n as f64;
    let mut x0 = lo;
    let mut d0 = d(x0);
    for i in 1..=n {
        let x1 = lo + h * i as f64;
        let d1 = d(x1);
        if d0.signum() != d1.signum() {
            let xp = bisect(&d, x0, x1)?;
            return Ok(Some(xp * xp / target));
        }
        x0 = x1;
        d0 = d1;
    }
    Ok(None)
}
