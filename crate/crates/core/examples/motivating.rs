//! Two targets, two agents, a one-dimensional reduction at angle `alpha`.
//! Prints the association cost of the correct and the swapped pairing and
//! the fused covariance trace as the projection direction turns.

use dimred_t2ta::simulation::experiments::{angle_grid, motivating_example};

fn main() -> dimred_t2ta::Result<()> {
    let rows = motivating_example(&angle_grid(5.0))?;
    println!("{:>6} {:>10} {:>10} {:>8}", "alpha", "J0", "Je", "traceP");
    for r in &rows {
        let mark = if r.j0 > r.je { "  swapped" } else { "" };
        println!(
            "{:>6.0} {:>10.4} {:>10.4} {:>8.4}{mark}",
            r.alpha_deg, r.j0, r.je, r.trace_p
        );
    }
    let best = rows
        .iter()
        .min_by(|a, b| a.trace_p.total_cmp(&b.trace_p))
        .unwrap();
    println!(
        "\nfusion-optimal angle {} deg associates {}",
        best.alpha_deg,
        if best.j0 > best.je {
            "incorrectly"
        } else {
            "correctly"
        }
    );
    Ok(())
}
