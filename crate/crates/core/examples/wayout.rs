//! Delayed exit from the plane for a range of entry heights.

use enso_gspt::slowfast::{solve_exit_point, wayinout_w};

fn main() -> enso_gspt::Result<()> {
    let (c, k, a, rho) = (1.4, 0.2, 2.0, 0.01);
    let y_in = -0.72;
    println!("{:>6} {:>10} {:>10} {:>12}", "z_in", "z_cross", "z_out", "residual");
    for i in 0..6 {
        let z_in = 0.65 + 0.05 * i as f64;
        let e = solve_exit_point(c, k, a, rho, y_in, z_in)?;
        println!("{z_in:>6.2} {:>10.6} {:>10.6} {:>12.2e}", e.z_cross, e.z_out, e.w_residual);
    }
    let w = wayinout_w(c, k, a, rho, y_in, 0.7, 0.3)?;
    println!("W(0.7, 0.3) = {w:.8}");
    Ok(())
}
