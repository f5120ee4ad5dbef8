//! Folded singularities, fold lines and fast projections for one (c, k).

use enso_gspt::geometry::{classify_point, folded_singularities, project_fast, theta, DEFAULT_TOL};

fn main() -> enso_gspt::Result<()> {
    let c = 1.4;
    let fs = folded_singularities(c, 0.2)?;
    println!("theta = {:.6}", theta(c)?);
    println!("q- = ({:.6}, {:.6}, {:.6})", fs.q_minus.x, fs.q_minus.y, fs.q_minus.z);
    println!("q+ = ({:.6}, {:.6}, {:.6})", fs.q_plus.x, fs.q_plus.y, fs.q_plus.z);

    // jumps from q- for two heights of k
    for k in [0.2, 0.7] {
        let q = folded_singularities(c, k)?.q_minus;
        let (landing, label) = project_fast(c, &q)?;
        println!(
            "k = {k}: q- lands at ({:.6}, {:.6}, {:.6}) on {}  [{}]",
            landing.x,
            landing.y,
            landing.z,
            label.as_str(),
            classify_point(c, k, DEFAULT_TOL, &landing).as_str()
        );
    }
    Ok(())
}
