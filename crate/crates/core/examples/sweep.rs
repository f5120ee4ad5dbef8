//! Sweep a across the V1 onset at (c, k) = (1.4, 0.2).

use enso_gspt::analysis::{sweep_a, AnalysisThresholds};
use enso_gspt::simulate::IntegratorConfig;

fn main() {
    let grid: Vec<f64> = (0..9).map(|i| 1.0 + 0.5 * i as f64).collect();
    let entries = sweep_a(1.4, 0.2, 0.01, 0.01, &grid, &IntegratorConfig::long_window(), &AnalysisThresholds::default());
    for e in entries {
        match e.result {
            Ok(cl) => println!(
                "a = {:4.1}  {:<12} plateaus={:<5} x in [{:.3}, {:.3}]",
                e.a,
                cl.pattern.as_str(),
                cl.has_plateaus,
                cl.x_range.0,
                cl.x_range.1
            ),
            Err(msg) => println!("a = {:4.1}  {msg}", e.a),
        }
    }
}
