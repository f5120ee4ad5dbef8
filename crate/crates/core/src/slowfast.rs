//! Reduced and layer flows on the plane `M_P` and the surface `M_S`,
//! intermediate fibres, and the way-in/way-out exit point on the plane.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::lambda2;
use crate::model::Params;
use crate::quadrature;

fn sech2(u: f64) -> f64 {
    let t = u.tanh();
    1.0 - t * t
}

/// Delayed exit from the plane predicted by the way-in/way-out relation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExitPoint {
    pub z_out: f64,
    pub w_residual: f64,
    /// Height where `F_x` on the plane changes sign.
    pub z_cross: f64,
    pub bracket: (f64, f64),
    /// Integral of `|integrand|` from entry to exit.
    pub scale: f64,
}

/// Explicit solution of the plane flow in intermediate time.
pub fn mp_flow_explicit(k: f64, rho: f64, a: f64, y0: f64, z0: f64, t: f64) -> (f64, f64) {
    (y0 * (-rho * a * t).exp(), k + (z0 - k) * (-t).exp())
}

/// `y` as a function of `z` along a plane trajectory through `(y0, z0)`.
pub fn mp_y_of_z(k: f64, rho: f64, a: f64, y0: f64, z0: f64, z: f64) -> Result<f64> {
    if z0 == k {
        return domain("mp_y_of_z: z0 equals k");
    }
    let ratio = (z - k) / (z0 - k);
    if !(ratio > 0.0) {
        return domain(format!("mp_y_of_z: z = {z} is not on the side of k containing z0"));
    }
    Ok(y0 * (rho * a * ratio.ln()).exp())
}

/// Reduced flow on `M_S` in `(x, z)`, time rescaled by `1 - c sech^2`.
pub fn reduced_s_rhs(p: &Params, x: f64, z: f64) -> (f64, f64) {
    let (c, k, a, rho) = (p.c(), p.k(), p.a(), p.rho());
    let s2 = sech2(x + z);
    let f = k - z - 0.5 * x;
    let h = -x - c * (1.0 - (x + z).tanh());
    (c * f * s2 + rho * (a * h + x * x), (1.0 - c * s2) * f)
}

/// Intermediate problem: the reduced flow on `M_S` with `rho = 0`.
pub fn intermediate_rhs(c: f64, k: f64, x: f64, z: f64) -> (f64, f64) {
    let s2 = sech2(x + z);
    let f = k - z - 0.5 * x;
    (c * f * s2, (1.0 - c * s2) * f)
}

/// Intermediate fibre through `(x0, z0)` as a graph `z = zeta(x)`.
pub fn fibre_zeta(c: f64, x: f64, x0: f64, z0: f64) -> Result<f64> {
    let w = (x - x0 + c * (x0 + z0).tanh()) / c;
    if !(w > -1.0 && w < 1.0) {
        return domain(format!("fibre_zeta: arctanh argument {w} outside (-1, 1)"));
    }
    Ok(-x + w.atanh())
}

/// Reduced flow on the 2-critical manifold `M_2S`.
pub fn m2s_reduced_rhs(p: &Params, x: f64, z: f64) -> Result<(f64, f64)> {
    let (c, a) = (p.c(), p.a());
    let lam = lambda2(c, x, z);
    if lam.abs() < 1e-12 {
        return Err(Error::Singular(format!("lambda = {lam:e} at a fold of M_2S")));
    }
    let s2 = sech2(x + z);
    let h = -x - c * (1.0 - (x + z).tanh());
    // det(N | G) with N = (c sech^2, 1 - c sech^2), G = (a h + x^2, 0)
    let det = -(1.0 - c * s2) * (a * h + x * x);
    let m = det / lam;
    // (-d_z f, d_x f) = (1, -1/2)
    Ok((m, -0.5 * m))
}

fn w_integrand(c: f64, k: f64, rho_a: f64, y_in: f64, z_in: f64) -> impl Fn(f64) -> f64 {
    move |z: f64| {
        let ratio = (z - k) / (z_in - k);
        let y = if rho_a == 0.0 { y_in } else { y_in * (rho_a * ratio.ln()).exp() };
        (y + c * (1.0 - z.tanh())) / (k - z)
    }
}

const W_REL_TOL: f64 = 1e-12;

/// Way-in/way-out integral from `z_in` to `z` along the plane.
pub fn wayinout_w(c: f64, k: f64, a: f64, rho: f64, y_in: f64, z_in: f64, z: f64) -> Result<f64> {
    check_path(k, z_in, z)?;
    let f = w_integrand(c, k, rho * a, y_in, z_in);
    Ok(quadrature::integrate(&f, z_in, z, W_REL_TOL, 1e-15).value)
}

fn check_path(k: f64, z_in: f64, z: f64) -> Result<()> {
    if !(z_in.is_finite() && z.is_finite()) {
        return domain("way-in/way-out: non-finite heights");
    }
    if z_in == k || z == k || (z_in - k).signum() != (z - k).signum() {
        return domain(format!("way-in/way-out: path from {z_in} to {z} touches z = k = {k}"));
    }
    Ok(())
}

/// Exit height `z_out > z_cross` with `W(z_in, z_out) = 0`.
pub fn solve_exit_point(c: f64, k: f64, a: f64, rho: f64, y_in: f64, z_in: f64) -> Result<ExitPoint> {
    if z_in == k || !z_in.is_finite() || !y_in.is_finite() {
        return domain("solve_exit_point: entry height must be finite and differ from k");
    }
    let fx_in = y_in + c * (1.0 - z_in.tanh());
    if fx_in > 0.0 {
        return domain(format!("solve_exit_point: entry has F_x = {fx_in:e} > 0 (repelling side of the plane)"));
    }
    if fx_in == 0.0 {
        return Ok(ExitPoint { z_out: z_in, w_residual: 0.0, z_cross: z_in, bracket: (z_in, z_in), scale: 0.0 });
    }
    let rho_a = rho * a;
    let sgn = (k - z_in).signum();
    let z_stop = k - sgn * 1e-8;
    let numerator = |z: f64| {
        let ratio = (z - k) / (z_in - k);
        let y = if rho_a == 0.0 { y_in } else { y_in * (rho_a * ratio.ln()).exp() };
        y + c * (1.0 - z.tanh())
    };
    if numerator(z_stop) <= 0.0 {
        return Err(Error::NoExit("F_x stays negative up to the node".into()));
    }
    let z_cross = crate::geometry::bisect(&numerator, z_in, z_stop)?;
    let f = w_integrand(c, k, rho_a, y_in, z_in);
    let q0 = quadrature::integrate(&f, z_in, z_cross, W_REL_TOL, 1e-15);
    let mut w = q0.value;
    let mut scale = q0.abs_value;
    let step = (k - z_cross) / 64.0;
    let mut lo = z_cross;
    loop {
        let mut hi = lo + step;
        if (hi - z_stop) * sgn > 0.0 {
            hi = z_stop;
        }
        let q = quadrature::integrate(&f, lo, hi, W_REL_TOL, 1e-15);
        if w + q.value >= 0.0 {
            // bisect W(z) = w + int_lo^z on [lo, hi] until both the bracket
            // and the residual are small
            let w_lo = w;
            let w_of = |z: f64| w_lo + quadrature::integrate(&f, lo, z, W_REL_TOL, 1e-15).value;
            let (mut a0, mut b0) = (lo, hi);
            let (mut wa, mut wb) = (w_lo, w_lo + q.value);
            for _ in 0..200 {
                let tol = 1e-11 * (1.0 + scale + q.abs_value);
                if (b0 - a0).abs() <= 1e-10 && wa.abs().min(wb.abs()) <= tol {
                    break;
                }
                let m = 0.5 * (a0 + b0);
                if m == a0 || m == b0 {
                    break;
                }
                let wm = w_of(m);
                if wm >= 0.0 {
                    b0 = m;
                    wb = wm;
                } else {
                    a0 = m;
                    wa = wm;
                }
            }
            let z_root = if wa.abs() < wb.abs() { a0 } else { b0 };
            let qr = quadrature::integrate(&f, lo, z_root, W_REL_TOL, 1e-15);
            scale += qr.abs_value;
            return Ok(ExitPoint {
                z_out: z_root,
                w_residual: w_lo + qr.value,
                z_cross,
                bracket: (lo, hi),
                scale,
            });
        }
        w += q.value;
        scale += q.abs_value;
        if hi == z_stop {
            return Err(Error::NoExit(format!("W = {w:e} < 0 at z = {z_stop}")));
        }
        lo = hi;
    }
}

/// Reduced flow in the standard form over `(x, y)`, defined for
/// `(x + y)/c` in `(-2, 0)`.
pub fn standard_form_rhs(p: &Params, x: f64, y: f64) -> Result<(f64, f64)> {
    let (c, k, a, rho) = (p.c(), p.k(), p.a(), p.rho());
    let w = (x + y) / c + 1.0;
    if !(w > -1.0 && w < 1.0) {
        return domain(format!("standard_form_rhs: (x+y)/c = {} outside (-2, 0)", (x + y) / c));
    }
    let den = c * (1.0 - w * w);
    let g = a * y + x * x;
    let q = 1.0 / den - 1.0;
    Ok((k - w.atanh() + 0.5 * x + rho * g / den, -rho * q * g))
}
