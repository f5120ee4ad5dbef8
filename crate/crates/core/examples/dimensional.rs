//! Evaluate the dimensional two-box model at a sample state.

use enso_gspt::model::{rhs_dimensional, t_sub, DimensionalParams, DimensionalState};

fn main() -> enso_gspt::Result<()> {
    let dp = DimensionalParams {
        alpha: 1.0 / 180.0,
        t_r: 29.5,
        epsilon: 0.11,
        mu: 0.3,
        zeta: 1.3,
        r: 1.0 / 400.0,
        b: 0.5,
        l: 1.5,
        beta: 0.8,
        h: 100.0,
        z0: 75.0,
        hstar: 62.0,
        t_r0: 16.0,
        t_0: 18.0,
    };
    dp.validate()?;
    let s = DimensionalState { t1: 28.0, t2: 24.0, h1: 10.0 };
    println!("T_sub = {:.6}", t_sub(&dp, s.t1, s.t2, s.h1)?);
    let d = rhs_dimensional(&dp, &s)?;
    println!("dT1/dt = {:.6}  dT2/dt = {:.6}  dh1/dt = {:.6}", d.t1, d.t2, d.h1);
    Ok(())
}
