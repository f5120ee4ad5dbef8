//! Three-stage Radau IIA (order 5) with simplified Newton iterations, the
//! embedded error estimate of Hairer and Wanner, and collocation dense
//! output.

use nalgebra::{DMatrix, DVector};

use super::{OdeSystem, StepperOptions};
use crate::error::{Error, Result};

const SQ6: f64 = 2.449_489_742_783_178;
const C1: f64 = (4.0 - SQ6) / 10.0;
const C2: f64 = (4.0 + SQ6) / 10.0;
const A: [[f64; 3]; 3] = [
    [(88.0 - 7.0 * SQ6) / 360.0, (296.0 - 169.0 * SQ6) / 1800.0, (-2.0 + 3.0 * SQ6) / 225.0],
    [(296.0 + 169.0 * SQ6) / 1800.0, (88.0 + 7.0 * SQ6) / 360.0, (-2.0 - 3.0 * SQ6) / 225.0],
    [(16.0 - SQ6) / 36.0, (16.0 + SQ6) / 36.0, 1.0 / 9.0],
];
const DD1: f64 = -(13.0 + 7.0 * SQ6) / 3.0;
const DD2: f64 = (-13.0 + 7.0 * SQ6) / 3.0;
const DD3: f64 = -1.0 / 3.0;
/// Real eigenvalue of the inverse Runge–Kutta matrix.
const U1: f64 = 3.637_834_252_744_496;
const NODES: [f64; 3] = [C1, C2, 1.0];
const MAX_NEWTON: usize = 7;

pub struct Radau5<'a, const N: usize> {
    sys: &'a dyn OdeSystem<N>,
    opts: StepperOptions,
    pub t: f64,
    pub y: [f64; N],
    h: f64,
    f0: [f64; N],
    // last accepted step, for dense output and stage extrapolation
    t_prev: f64,
    h_prev: f64,
    y_prev: [f64; N],
    z: [[f64; N]; 3],
    have_prev: bool,
    first: bool,
    rejected: bool,
    fnewt: f64,
    pub n_accepted: usize,
    pub n_rejected: usize,
}

fn lagrange(s: f64) -> [f64; 3] {
    // basis on nodes {0, c1, c2, 1}, evaluated for the three nonzero nodes
    let nodes = [0.0, C1, C2, 1.0];
    let mut out = [0.0; 3];
    for i in 1..4 {
        let mut l = 1.0;
        for j in 0..4 {
            if j != i {
                l *= (s - nodes[j]) / (nodes[i] - nodes[j]);
            }
        }
        out[i - 1] = l;
    }
    out
}

impl<'a, const N: usize> Radau5<'a, N> {
    pub fn new(sys: &'a dyn OdeSystem<N>, t0: f64, y0: [f64; N], opts: StepperOptions) -> Self {
        let f0 = sys.rhs(t0, &y0);
        let rtol1 = 0.1 * opts.rel_tol.powf(2.0 / 3.0);
        let fnewt = (10.0 * f64::EPSILON / rtol1).max(0.03f64.min(rtol1.sqrt()));
        let h = opts.h0.min(opts.max_step);
        Self {
            sys,
            opts,
            t: t0,
            y: y0,
            h,
            f0,
            t_prev: t0,
            h_prev: 0.0,
            y_prev: y0,
            z: [[0.0; N]; 3],
            have_prev: false,
            first: true,
            rejected: false,
            fnewt,
            n_accepted: 0,
            n_rejected: 0,
        }
    }

    fn scale(&self, y_new: Option<&[f64; N]>) -> [f64; N] {
        let atol1 = self.opts.abs_tol.powf(2.0 / 3.0) * (0.1 * self.opts.rel_tol.powf(2.0 / 3.0)) / self.opts.rel_tol;
        let rtol1 = 0.1 * self.opts.rel_tol.powf(2.0 / 3.0);
        let mut s = [0.0; N];
        for i in 0..N {
            let m = match y_new {
                Some(yn) => self.y[i].abs().max(yn[i].abs()),
                None => self.y[i].abs(),
            };
            s[i] = atol1 + rtol1 * m;
        }
        s
    }

    /// Dense output on the last accepted step `[t_prev, t]`.
    pub fn dense(&self, t: f64) -> [f64; N] {
        if !self.have_prev || self.h_prev == 0.0 {
            return self.y;
        }
        let s = (t - self.t_prev) / self.h_prev;
        let l = lagrange(s);
        let mut out = self.y_prev;
        for i in 0..N {
            out[i] += l[0] * self.z[0][i] + l[1] * self.z[1][i] + l[2] * self.z[2][i];
        }
        out
    }

    /// Advance by one accepted step, never beyond `t_limit`.
    pub fn step(&mut self, t_limit: f64) -> Result<()> {
        loop {
            let mut h = self.h.min(self.opts.max_step);
            let mut clipped = false;
            if self.t + h >= t_limit {
                h = t_limit - self.t;
                clipped = true;
            }
            if h < 1e-14 * self.t.abs().max(1.0) {
                return Err(Error::StepUnderflow { t: self.t });
            }
            match self.attempt(h)? {
                Attempt::Accepted { h_next } => {
                    self.h = if clipped { self.h.max(h_next.min(self.h)) } else { h_next };
                    return Ok(());
                }
                Attempt::Rejected { h_next } => {
                    self.n_rejected += 1;
                    self.h = h_next;
                }
            }
        }
    }

    fn attempt(&mut self, h: f64) -> Result<Attempt> {
        let sys = self.sys;
        let (t, y) = (self.t, self.y);
        let jv = sys.jac(t, &y);
        let jac = DMatrix::<f64>::from_fn(N, N, |r, c| jv[r][c]);
        // full 3N x 3N simplified Newton matrix I - h (A kron J)
        let n3 = 3 * N;
        let mut m = DMatrix::<f64>::identity(n3, n3);
        for bi in 0..3 {
            for bj in 0..3 {
                let a = h * A[bi][bj];
                for r in 0..N {
                    for c in 0..N {
                        m[(bi * N + r, bj * N + c)] -= a * jac[(r, c)];
                    }
                }
            }
        }
        let lu = m.lu();
        let scal = self.scale(None);
        // starting stages from the previous collocation polynomial
        let mut z = [[0.0; N]; 3];
        if self.have_prev && !self.first {
            let y_end = self.y;
            for (k, c) in NODES.iter().enumerate() {
                let p = self.dense(t + c * h);
                for i in 0..N {
                    z[k][i] = p[i] - y_end[i];
                }
            }
        }
        let mut theta_rate: f64 = 1.0;
        let mut faccon: f64 = 1.0;
        let mut dyno_old = 0.0;
        let mut converged = false;
        for it in 0..MAX_NEWTON {
            let mut fz = [[0.0; N]; 3];
            for k in 0..3 {
                let mut yk = y;
                for i in 0..N {
                    yk[i] += z[k][i];
                }
                fz[k] = sys.rhs(t + NODES[k] * h, &yk);
                if fz[k].iter().any(|v| !v.is_finite()) {
                    return Ok(Attempt::Rejected { h_next: 0.5 * h });
                }
            }
            let mut rhs = DVector::<f64>::zeros(n3);
            for k in 0..3 {
                for i in 0..N {
                    let mut acc = -z[k][i];
                    for j in 0..3 {
                        acc += h * A[k][j] * fz[j][i];
                    }
                    rhs[k * N + i] = acc;
                }
            }
            let dz = match lu.solve(&rhs) {
                Some(d) => d,
                None => return Ok(Attempt::Rejected { h_next: 0.5 * h }),
            };
            let mut dyno = 0.0;
            for k in 0..3 {
                for i in 0..N {
                    let v = dz[k * N + i] / scal[i];
                    dyno += v * v;
                    z[k][i] += dz[k * N + i];
                }
            }
            dyno = (dyno / n3 as f64).sqrt();
            if it > 0 {
                let thq = dyno / dyno_old;
                theta_rate = if it == 1 { thq } else { (thq * theta_rate).sqrt() };
                if theta_rate >= 0.99 {
                    return Ok(Attempt::Rejected { h_next: 0.5 * h });
                }
                faccon = theta_rate / (1.0 - theta_rate);
                let remaining = (MAX_NEWTON - 1 - it) as i32;
                let predicted = faccon * dyno * theta_rate.powi(remaining) / self.fnewt;
                if predicted >= 1.0 {
                    let f = 0.8 * predicted.powf(-1.0 / (4.0 + remaining as f64));
                    return Ok(Attempt::Rejected { h_next: h * f.clamp(0.1, 0.5) });
                }
            }
            dyno_old = dyno.max(f64::EPSILON);
            if faccon * dyno <= self.fnewt {
                converged = true;
                break;
            }
        }
        if !converged {
            return Ok(Attempt::Rejected { h_next: 0.5 * h });
        }
        let mut y_new = y;
        for i in 0..N {
            y_new[i] += z[2][i];
        }
        // embedded error estimate
        let e1 = DMatrix::<f64>::from_fn(N, N, |r, c| if r == c { U1 / h } else { 0.0 }) - &jac;
        let e1_lu = e1.lu();
        let mut cont = DVector::<f64>::zeros(N);
        for i in 0..N {
            cont[i] = self.f0[i] + (DD1 * z[0][i] + DD2 * z[1][i] + DD3 * z[2][i]) / h;
        }
        let mut errv = e1_lu.solve(&cont).unwrap_or_else(|| cont.clone());
        let scal_err = self.scale(Some(&y_new));
        let norm = |v: &DVector<f64>| {
            let mut s = 0.0;
            for i in 0..N {
                let q = v[i] / scal_err[i];
                s += q * q;
            }
            (s / N as f64).sqrt().max(1e-10)
        };
        let mut err = norm(&errv);
        if err >= 1.0 && (self.first || self.rejected) {
            let mut yp = y;
            for i in 0..N {
                yp[i] += errv[i];
            }
            let fp = sys.rhs(t, &yp);
            for i in 0..N {
                cont[i] = fp[i] + (DD1 * z[0][i] + DD2 * z[1][i] + DD3 * z[2][i]) / h;
            }
            errv = e1_lu.solve(&cont).unwrap_or_else(|| cont.clone());
            err = norm(&errv);
        }
        if !err.is_finite() {
            return Ok(Attempt::Rejected { h_next: 0.5 * h });
        }
        let fac = (0.9 * err.powf(-0.25)).clamp(0.2, 8.0);
        let h_next = (h * fac).min(self.opts.max_step);
        if err < 1.0 {
            self.t_prev = t;
            self.h_prev = h;
            self.y_prev = y;
            self.z = z;
            self.have_prev = true;
            self.t = t + h;
            self.y = y_new;
            self.f0 = sys.rhs(self.t, &self.y);
            if !self.y.iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite { t: self.t });
            }
            self.first = false;
            let h_next = if self.rejected { h_next.min(h) } else { h_next };
            self.rejected = false;
            self.n_accepted += 1;
            Ok(Attempt::Accepted { h_next })
        } else {
            self.rejected = true;
            Ok(Attempt::Rejected { h_next: h * fac.min(0.9) })
        }
    }
}

enum Attempt {
    Accepted { h_next: f64 },
    Rejected { h_next: f64 },
}

#[cfg(test)]
mod tests {
    use super::*;

    // y' = -L (y - cos t) - sin t, solution y = cos t
    struct Stiff(f64);

    impl OdeSystem<1> for Stiff {
        fn rhs(&self, t: f64, y: &[f64; 1]) -> [f64; 1] {
            [-self.0 * (y[0] - t.cos()) - t.sin()]
        }
        fn jac(&self, _t: f64, _y: &[f64; 1]) -> [[f64; 1]; 1] {
            [[-self.0]]
        }
    }

    #[test]
    fn stiff_scalar() {
        let sys = Stiff(1e6);
        let opts = StepperOptions { rel_tol: 1e-8, abs_tol: 1e-10, max_step: 0.1, h0: 1e-4 };
        let mut r = Radau5::new(&sys, 0.0, [1.0], opts);
        let mut prev = 0.0;
        while r.t < 10.0 {
            r.step(10.0).unwrap();
            let tm = 0.5 * (prev + r.t);
            // the collocation interpolant has stage order 3
            assert!((r.dense(tm)[0] - tm.cos()).abs() < 1e-6, "dense at {tm}");
            prev = r.t;
        }
        assert!((r.y[0] - 10f64.cos()).abs() < 1e-7);
        assert!(r.n_accepted < 2000, "{} steps", r.n_accepted);
    }
}
