//! Regime labels and onset thresholds for the five representative points,
//! then a coarse text map of the (c, k) plane.

use enso_gspt::cli::regime_map;
use enso_gspt::regimes::classify_regions;

fn main() -> enso_gspt::Result<()> {
    for (c, k) in [(1.4, 0.2), (1.4, 0.4), (1.06, 0.4), (1.4, 0.7), (1.2, 0.7)] {
        let r = classify_regions(c, k)?;
        println!(
            "c = {c:<4} k = {k:<3}  {}  {} {}  a- = {:<10} a+ = {:<10}",
            r.v_label,
            r.d_label,
            r.a_label,
            r.a_minus.map_or("-".into(), |v| format!("{v:.4}")),
            r.a_plus.map_or("-".into(), |v| format!("{v:.4}")),
        );
    }

    let n = 40;
    let cs: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 + 0.5) / n as f64).collect();
    let ks: Vec<f64> = (0..20).rev().map(|j| (j as f64 + 0.5) / 20.0).collect();
    let cells = regime_map(&cs, &ks);
    println!("\nk down, c across (1..2); digit = V-regime");
    for (j, k) in ks.iter().enumerate() {
        let row: String = (0..n)
            .map(|i| match &cells[i * ks.len() + j] {
                Ok(r) => r.v_label.as_str().chars().nth(1).unwrap_or('?'),
                Err(_) => '.',
            })
            .collect();
        println!("{k:5.3} {row}");
    }
    Ok(())
}
