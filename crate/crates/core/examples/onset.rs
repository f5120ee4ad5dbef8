//! Locate the oscillation onset in a by bisection and compare with the
//! singular-limit thresholds.

use enso_gspt::analysis::onset_bisection;
use enso_gspt::regimes::a_mp;
use enso_gspt::simulate::IntegratorConfig;

fn main() -> enso_gspt::Result<()> {
    let cfg = IntegratorConfig::long_window();
    for (c, k, lo, hi) in [(1.4, 0.2, 4.0, 5.0), (1.4, 0.7, 0.05, 0.3)] {
        let on = onset_bisection(c, k, 0.01, 0.01, lo, hi, &cfg)?;
        let (am, ap) = a_mp(c, k)?;
        println!(
            "(c, k) = ({c}, {k}): a_crit = {:.3} after {} runs, steady below: {}; a- = {:?}, a+ = {:?}",
            on.a_crit, on.evaluations, on.steady_below, am, ap
        );
    }
    Ok(())
}
