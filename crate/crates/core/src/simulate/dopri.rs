//! Explicit Dormand–Prince 5(4), kept for cross-validation of the implicit
//! integrator away from stiff segments.

use super::{OdeSystem, StepperOptions};
use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

pub struct DormandPrince<'a, const N: usize> {
    sys: &'a dyn OdeSystem<N>,
    opts: StepperOptions,
    pub t: f64,
    pub y: [f64; N],
    f: [f64; N],
    h: f64,
    t_prev: f64,
    y_prev: [f64; N],
    f_prev: [f64; N],
    pub n_accepted: usize,
    pub n_rejected: usize,
}

impl<'a, const N: usize> DormandPrince<'a, N> {
    pub fn new(sys: &'a dyn OdeSystem<N>, t0: f64, y0: [f64; N], opts: StepperOptions) -> Self {
        let f = sys.rhs(t0, &y0);
        Self {
            sys,
            h: opts.h0.min(opts.max_step),
            opts,
            t: t0,
            y: y0,
            f,
            t_prev: t0,
            y_prev: y0,
            f_prev: f,
            n_accepted: 0,
            n_rejected: 0,
        }
    }

    /// Cubic Hermite interpolation on the last accepted step.
    pub fn dense(&self, t: f64) -> [f64; N] {
        let h = self.t - self.t_prev;
        if h == 0.0 {
            return self.y;
        }
        let s = (t - self.t_prev) / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s),
            s * (1.0 - s) * (1.0 - s),
            s * s * (3.0 - 2.0 * s),
            s * s * (s - 1.0),
        );
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = h00 * self.y_prev[i] + h10 * h * self.f_prev[i] + h01 * self.y[i] + h11 * h * self.f[i];
        }
        out
    }

    pub fn step(&mut self, t_limit: f64) -> Result<()> {
        loop {
            let h = self.h.min(self.opts.max_step).min(t_limit - self.t);
            if h < 1e-14 * self.t.abs().max(1.0) {
                return Err(Error::StepUnderflow { t: self.t });
            }
            let mut k = [[0.0; N]; 7];
            k[0] = self.f;
            for s in 1..7 {
                let mut ys = self.y;
                for j in 0..s {
                    for i in 0..N {
                        ys[i] += h * A[s][j] * k[j][i];
                    }
                }
                k[s] = self.sys.rhs(self.t + C[s] * h, &ys);
            }
            let mut y_new = self.y;
            for j in 0..6 {
                for i in 0..N {
                    y_new[i] += h * A[6][j] * k[j][i];
                }
            }
            let mut err = 0.0;
            for i in 0..N {
                let mut e = 0.0;
                for s in 0..7 {
                    e += E[s] * k[s][i];
                }
                let sc = self.opts.abs_tol + self.opts.rel_tol * self.y[i].abs().max(y_new[i].abs());
                let q = h * e / sc;
                err += q * q;
            }
            let err = (err / N as f64).sqrt();
            if !err.is_finite() {
                self.h = 0.5 * h;
                self.n_rejected += 1;
                continue;
            }
            let fac = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
            if err <= 1.0 {
                self.t_prev = self.t;
                self.y_prev = self.y;
                self.f_prev = self.f;
                self.t += h;
                self.y = y_new;
                self.f = k[6];
                self.h = h * fac;
                self.n_accepted += 1;
                if !self.y.iter().all(|v| v.is_finite()) {
                    return Err(Error::NonFinite { t: self.t });
                }
                return Ok(());
            }
            self.n_rejected += 1;
            self.h = h * fac.min(0.9);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Oscillator;

    impl OdeSystem<2> for Oscillator {
        fn rhs(&self, _t: f64, y: &[f64; 2]) -> [f64; 2] {
            [y[1], -y[0]]
        }
        fn jac(&self, _t: f64, _y: &[f64; 2]) -> [[f64; 2]; 2] {
            [[0.0, 1.0], [-1.0, 0.0]]
        }
    }

    #[test]
    fn harmonic_oscillator() {
        let opts = StepperOptions { rel_tol: 1e-10, abs_tol: 1e-12, max_step: 1.0, h0: 1e-3 };
        let mut d = DormandPrince::new(&Oscillator, 0.0, [1.0, 0.0], opts);
        let mut prev = 0.0;
        while d.t < 20.0 {
            d.step(20.0).unwrap();
            let tm = 0.5 * (prev + d.t);
            assert!((d.dense(tm)[0] - tm.cos()).abs() < 1e-7);
            prev = d.t;
        }
        assert!((d.y[0] - 20f64.cos()).abs() < 1e-8 && (d.y[1] + 20f64.sin()).abs() < 1e-8);
    }
}
