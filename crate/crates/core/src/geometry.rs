//! Singular geometry of the layer problem: the plane `M_P = {x = 0}`, the
//! S-shaped surface `M_S`, fold lines, folded singularities, the 2-critical
//! manifold `M_2S` and the fast-fibre projection.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::State;

/// Default membership tolerance for the algebraic constraints.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BranchLabel {
    #[serde(rename = "P_attracting")]
    PAttracting,
    #[serde(rename = "P_repelling")]
    PRepelling,
    #[serde(rename = "S_a_minus")]
    SAttractingMinus,
    #[serde(rename = "S_repelling")]
    SRepelling,
    #[serde(rename = "S_a_plus")]
    SAttractingPlus,
    #[serde(rename = "Fold_minus")]
    FoldMinus,
    #[serde(rename = "Fold_plus")]
    FoldPlus,
    #[serde(rename = "F_P_curve")]
    FpCurve,
    #[serde(rename = "M2S_point")]
    M2sPoint,
    #[serde(rename = "M2P_point")]
    M2pPoint,
    #[serde(rename = "off_manifold")]
    OffManifold,
}

impl BranchLabel {
    pub fn is_attracting(self) -> bool {
        matches!(
            self,
            BranchLabel::PAttracting
                | BranchLabel::SAttractingMinus
                | BranchLabel::SAttractingPlus
                | BranchLabel::M2pPoint
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BranchLabel::PAttracting => "P_attracting",
            BranchLabel::PRepelling => "P_repelling",
            BranchLabel::SAttractingMinus => "S_a_minus",
            BranchLabel::SRepelling => "S_repelling",
            BranchLabel::SAttractingPlus => "S_a_plus",
            BranchLabel::FoldMinus => "Fold_minus",
            BranchLabel::FoldPlus => "Fold_plus",
            BranchLabel::FpCurve => "F_P_curve",
            BranchLabel::M2sPoint => "M2S_point",
            BranchLabel::M2pPoint => "M2P_point",
            BranchLabel::OffManifold => "off_manifold",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldedSingularities {
    pub q_minus: State,
    pub q_plus: State,
    pub theta: f64,
}

fn sech2(u: f64) -> f64 {
    let t = u.tanh();
    1.0 - t * t
}

fn require_c(c: f64) -> Result<()> {
    if c > 1.0 && c.is_finite() {
        Ok(())
    } else {
        domain(format!("c must exceed 1, got {c}"))
    }
}

/// Fold offset `arcsech(1/sqrt(c)) = ln(sqrt(c) + sqrt(c - 1))`.
pub fn theta(c: f64) -> Result<f64> {
    require_c(c)?;
    Ok((c.sqrt() + (c - 1.0).sqrt()).ln())
}

/// `tanh(theta(c)) = sqrt((c - 1)/c)`.
pub fn tanh_theta(c: f64) -> Result<f64> {
    require_c(c)?;
    Ok(((c - 1.0) / c).sqrt())
}

/// `M_S` as a graph `y = h(x, z)`.
pub fn h_graph(c: f64, x: f64, z: f64) -> f64 {
    -x - c * (1.0 - (x + z).tanh())
}

/// `M_S` as a graph `z = g(x, y)`, defined for `(x + y)/c` in `(-2, 0)`.
pub fn g_graph(c: f64, x: f64, y: f64) -> Result<f64> {
    let w = (x + y) / c + 1.0;
    if !(w > -1.0 && w < 1.0) {
        return domain(format!("g_graph: (x+y)/c = {} outside (-2, 0)", (x + y) / c));
    }
    Ok(w.atanh() - x)
}

/// Linearisation of the layer problem in `x`.
pub fn fx_linearisation(c: f64, x: f64, y: f64, z: f64) -> f64 {
    x * (1.0 - c * sech2(x + z)) + (x + y + c * (1.0 - (x + z).tanh()))
}

/// Label of the branch of the critical set containing `s`.
///
/// Lines and curves (fold lines, `F_P`, `M_2S`) take precedence over open
/// subsets. A point of the line `M_2P = {x = 0, z = k}` is labelled
/// `M2P_point` only where the plane is attracting; on the repelling part of
/// the plane the label is `P_repelling`.
pub fn classify_point(c: f64, k: f64, tol: f64, s: &State) -> BranchLabel {
    let State { x, y, z } = *s;
    let on_plane = x.abs() < tol;
    let bracket = x + y + c * (1.0 - (x + z).tanh());
    let on_ms = bracket.abs() < tol;
    if on_plane {
        let fp = y + c * (1.0 - z.tanh());
        if fp.abs() < tol {
            return BranchLabel::FpCurve;
        }
        if fp < 0.0 {
            if (z - k).abs() < tol {
                return BranchLabel::M2pPoint;
            }
            return BranchLabel::PAttracting;
        }
        return BranchLabel::PRepelling;
    }
    if on_ms {
        let fold = 1.0 - c * sech2(x + z);
        if fold.abs() < tol {
            return if x + z < 0.0 { BranchLabel::FoldMinus } else { BranchLabel::FoldPlus };
        }
        if (k - z - 0.5 * x).abs() < tol {
            return BranchLabel::M2sPoint;
        }
        if fold < 0.0 {
            return BranchLabel::SRepelling;
        }
        return if x + z < 0.0 { BranchLabel::SAttractingMinus } else { BranchLabel::SAttractingPlus };
    }
    BranchLabel::OffManifold
}

/// Largest `c` for which `q-` and `q+` are remote (`y_{q-} > y_{q+}`).
pub const C_REMOTE_MAX: f64 = 2.733_991_486_619_936_4;

/// `y_{q-} - y_{q+} = 4 theta - 2 c tanh(theta)`, independent of `k`.
pub fn remoteness_gap(c: f64) -> Result<f64> {
    Ok(4.0 * theta(c)? - 2.0 * c * tanh_theta(c)?)
}

/// Folded singularities `q-`, `q+` where `M_2S` meets the fold lines.
pub fn folded_singularities(c: f64, k: f64) -> Result<FoldedSingularities> {
    let th = theta(c)?;
    let q = |sgn: f64| {
        let x = -2.0 * k + sgn * 2.0 * th;
        let z = 2.0 * k - sgn * th;
        State::new(x, h_graph(c, x, z), z)
    };
    Ok(FoldedSingularities { q_minus: q(-1.0), q_plus: q(1.0), theta: th })
}

/// Nontrivial eigenvalue of the intermediate problem along `M_2S`.
pub fn lambda2(c: f64, x: f64, z: f64) -> f64 {
    -1.0 + 0.5 * c * sech2(x + z)
}

/// Point of `M_2S` above `x`.
pub fn m2s_point(c: f64, k: f64, x: f64) -> State {
    let z = k - 0.5 * x;
    State::new(x, h_graph(c, x, z), z)
}

/// `|x + z|` of the folds of `M_2S`, which exist only for `c >= 2`.
pub fn m2s_folds(c: f64) -> Result<f64> {
    if c < 2.0 || !c.is_finite() {
        return domain(format!("M_2S has no folds for c = {c} < 2"));
    }
    // arcsech(sqrt(2/c)) = ln((1 + sqrt(1 - 2/c)) / sqrt(2/c))
    let s = (2.0 / c).sqrt();
    Ok(((1.0 + (1.0 - 2.0 / c).sqrt()) / s).ln())
}

/// Follow the layer flow (`y`, `z` frozen) from a non-attracting point to
/// the first attracting landing point.
pub fn project_fast(c: f64, s: &State) -> Result<(State, BranchLabel)> {
    require_c(c)?;
    let State { x, y, z } = *s;
    if !s.is_finite() || x > 0.0 {
        return domain("project_fast: need a finite point with x <= 0");
    }
    if x == 0.0 {
        return Err(Error::NoLanding("the plane x = 0 is invariant under the layer flow".into()));
    }
    let b = |u: f64| u + y + c * (1.0 - (u + z).tanh());
    let tol = DEFAULT_TOL;
    let on_ms = b(x).abs() < tol;
    let fold = 1.0 - c * sech2(x + z);
    let on_fold = on_ms && fold.abs() < 1e-7;
    if !on_fold && fx_linearisation(c, x, y, z) < 0.0 {
        return domain("project_fast: point is already on the attracting side");
    }
    // direction of x' = x B(x) with x < 0
    let rightward = if on_fold {
        x + z < 0.0
    } else if on_ms {
        return domain("project_fast: point on the repelling sheet, direction undetermined");
    } else {
        b(x) < 0.0
    };
    let grid = 4000usize;
    if rightward {
        let start = x + 1e-6 * (1.0 + x.abs());
        let h = (0.0 - start) / grid as f64;
        let mut lo = start;
        let mut blo = b(lo);
        if on_fold && blo >= 0.0 {
            blo = -f64::MIN_POSITIVE;
        }
        for i in 1..=grid {
            let hi = if i == grid { -0.0 } else { start + h * i as f64 };
            let bhi = b(hi);
            if blo < 0.0 && bhi >= 0.0 {
                if hi == 0.0 {
                    break;
                }
                let r = bisect(&b, lo, hi)?;
                return Ok((State::new(r, y, z), BranchLabel::SAttractingPlus));
            }
            lo = hi;
            blo = bhi;
        }
        let fp = y + c * (1.0 - z.tanh());
        if fp < 0.0 {
            Ok((State::new(0.0, y, z), BranchLabel::PAttracting))
        } else {
            Err(Error::NoLanding(format!("fibre reaches the plane at F_x = {fp:e} >= 0")))
        }
    } else {
        let start = x - 1e-6 * (1.0 + x.abs());
        let span = 50.0 + 2.0 * c + y.abs();
        let h = span / grid as f64;
        let mut hi = start;
        let mut bhi = b(hi);
        if on_fold && bhi <= 0.0 {
            bhi = f64::MIN_POSITIVE;
        }
        for i in 1..=grid {
            let lo = start - h * i as f64;
            let blo = b(lo);
            if bhi > 0.0 && blo <= 0.0 {
                let r = bisect(&b, lo, hi)?;
                return Ok((State::new(r, y, z), BranchLabel::SAttractingMinus));
            }
            hi = lo;
            bhi = blo;
        }
        Err(Error::NoLanding("no root of the fast nullcline below the start point".into()))
    }
}

/// Bisection on a bracket with a sign change; stops at residual 1e-12 or
/// at machine resolution of the bracket.
pub(crate) fn bisect(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> Result<f64> {
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoRoot(format!("no sign change on [{lo}, {hi}]")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo) < 1e-15 * (1.0 + lo.abs()) && fm.abs() < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
