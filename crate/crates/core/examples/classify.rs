//! Classify the long-run behaviour at a few parameter sets.

use enso_gspt::analysis::{classify_trajectory, AnalysisThresholds};
use enso_gspt::simulate::{integrate, IntegratorConfig};
use enso_gspt::Params;

fn main() -> enso_gspt::Result<()> {
    let cfg = IntegratorConfig::long_window();
    let th = AnalysisThresholds::default();
    for (c, k, a) in [(1.4, 0.2, 2.0), (1.4, 0.2, 4.4), (1.4, 0.7, 0.2), (1.06, 0.4, 5.0), (1.4, 0.2, 6.0)] {
        let p = Params::new(c, k, a, 0.01, 0.01)?;
        let tr = integrate(&p, &cfg)?;
        match classify_trajectory(&tr, &th) {
            Ok(cl) => println!(
                "({c}, {k}, {a}): {} plateaus={} sao={} signature={}",
                cl.pattern.as_str(),
                cl.has_plateaus,
                cl.sao_location.as_str(),
                cl.signature_string()
            ),
            Err(e) => println!("({c}, {k}, {a}): {e}"),
        }
    }
    Ok(())
}
