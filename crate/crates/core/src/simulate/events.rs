use serde::{Deserialize, Serialize};

use super::{Sample, Trajectory};
use crate::geometry::theta;
use crate::model::{rhs_full, Params, State};

/// `|x|` below which a trajectory is considered to be on the plane.
pub const PLANE_EPS: f64 = 1e-3;
const T_RESOLUTION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    #[serde(rename = "fold_minus_cross")]
    FoldMinusCross,
    #[serde(rename = "fold_plus_cross")]
    FoldPlusCross,
    #[serde(rename = "plane_entry")]
    PlaneEntry,
    #[serde(rename = "plane_exit")]
    PlaneExit,
    #[serde(rename = "FP_cross")]
    FpCross,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::FoldMinusCross => "fold_minus_cross",
            EventKind::FoldPlusCross => "fold_plus_cross",
            EventKind::PlaneEntry => "plane_entry",
            EventKind::PlaneExit => "plane_exit",
            EventKind::FpCross => "FP_cross",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            EventKind::FoldMinusCross,
            EventKind::FoldPlusCross,
            EventKind::PlaneEntry,
            EventKind::PlaneExit,
            EventKind::FpCross,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
    pub state: State,
}

/// Cubic Hermite interpolant between two samples using the vector field.
struct Segment {
    t0: f64,
    h: f64,
    s0: State,
    s1: State,
    f0: State,
    f1: State,
}

impl Segment {
    fn new(p: &Params, a: &Sample, b: &Sample) -> Self {
        let (s0, s1) = (a.state(), b.state());
        Segment { t0: a.t, h: b.t - a.t, s0, s1, f0: rhs_full(p, &s0), f1: rhs_full(p, &s1) }
    }

    fn at(&self, t: f64) -> State {
        let s = ((t - self.t0) / self.h).clamp(0.0, 1.0);
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        let h = self.h;
        let c = |a: f64, fa: f64, b: f64, fb: f64| h00 * a + h10 * h * fa + h01 * b + h11 * h * fb;
        let mut out = State::new(
            c(self.s0.x, self.f0.x, self.s1.x, self.f1.x),
            c(self.s0.y, self.f0.y, self.s1.y, self.f1.y),
            c(self.s0.z, self.f0.z, self.s1.z, self.f1.z),
        );
        // the interpolant may overshoot across x = 0 between samples on the plane side
        if self.s0.x <= 0.0 && self.s1.x <= 0.0 {
            out.x = out.x.min(0.0);
        }
        out
    }

    fn refine(&self, g: &dyn Fn(&State) -> f64) -> (f64, State) {
        let (mut lo, mut hi) = (self.t0, self.t0 + self.h);
        let glo = g(&self.s0);
        while hi - lo > T_RESOLUTION {
            let m = 0.5 * (lo + hi);
            if m <= lo || m >= hi {
                break;
            }
            if (g(&self.at(m)) > 0.0) == (glo > 0.0) {
                lo = m;
            } else {
                hi = m;
            }
        }
        let t = 0.5 * (lo + hi);
        (t, self.at(t))
    }
}

/// Sign-change events of the fold planes `x + z = -theta`, `x + z = theta`,
/// of `|x| = PLANE_EPS`, and of `F_x = 0` on the plane while `|x| < PLANE_EPS`.
pub fn detect_events(traj: &Trajectory, c: f64, _k: f64) -> Vec<Event> {
    let th = match theta(c) {
        Ok(t) => t,
        Err(_) => return Vec::new(),
    };
    let p = &traj.params;
    let fold_m = move |s: &State| s.x + s.z + th;
    let fold_p = move |s: &State| s.x + s.z - th;
    let plane = |s: &State| s.x.abs() - PLANE_EPS;
    let fp = move |s: &State| s.y + c * (1.0 - s.z.tanh());
    let mut out = Vec::new();
    for w in traj.samples.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if b.t <= a.t {
            continue;
        }
        let (sa, sb) = (a.state(), b.state());
        let mut seg: Option<Segment> = None;
        let mut check = |g: &dyn Fn(&State) -> f64, kind: EventKind, out: &mut Vec<Event>| {
            let (ga, gb) = (g(&sa), g(&sb));
            if (ga > 0.0) != (gb > 0.0) {
                let sg = seg.get_or_insert_with(|| Segment::new(p, a, b));
                let (t, state) = sg.refine(g);
                out.push(Event { t, kind, state });
            }
        };
        let mut here = Vec::new();
        if !(sa.x == 0.0 && sb.x == 0.0) {
            check(&fold_m, EventKind::FoldMinusCross, &mut here);
            check(&fold_p, EventKind::FoldPlusCross, &mut here);
        }
        let (pa, pb) = (plane(&sa), plane(&sb));
        if pa > 0.0 && pb <= 0.0 {
            check(&plane, EventKind::PlaneEntry, &mut here);
        } else if pa <= 0.0 && pb > 0.0 {
            check(&plane, EventKind::PlaneExit, &mut here);
        }
        if pa <= 0.0 && pb <= 0.0 {
            check(&fp, EventKind::FpCross, &mut here);
        }
        here.sort_by(|x, y| x.t.total_cmp(&y.t));
        out.extend(here);
    }
    out
}
