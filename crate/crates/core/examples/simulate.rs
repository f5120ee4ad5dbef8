//! Integrate the full system and list the events of one cycle.

use enso_gspt::simulate::{integrate, IntegratorConfig};
use enso_gspt::Params;

fn main() -> enso_gspt::Result<()> {
    let p = Params::new(1.4, 0.2, 2.0, 0.01, 0.01)?;
    let cfg = IntegratorConfig { t_end: 5_000.0, ..Default::default() };
    let tr = integrate(&p, &cfg)?;
    println!(
        "{} samples, {} steps accepted, {} rejected",
        tr.samples.len(),
        tr.stats.accepted,
        tr.stats.rejected
    );
    let last = tr.samples.last().unwrap();
    println!("final state ({:.6}, {:.6}, {:.6}) at t = {}", last.x, last.y, last.z, last.t);
    for e in tr.events.iter().filter(|e| e.t > 4_000.0).take(8) {
        println!("{:>10.3}  {:<16} z = {:.5}", e.t, e.kind.as_str(), e.state.z);
    }
    Ok(())
}
