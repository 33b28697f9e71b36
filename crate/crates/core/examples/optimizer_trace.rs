//! Worst-case separation ratio along the maximin ascent, adaptive step
//! against two fixed step sizes.

use dimred_t2ta::simulation::experiments::optimizer_trace;
use dimred_t2ta::simulation::TraceSpec;

fn main() -> dimred_t2ta::Result<()> {
    let spec = TraceSpec::default();
    let cmp = optimizer_trace(&spec)?;
    println!(
        "{:>3} {:>10} {:>10} {:>10}",
        "k", "adaptive", "small", "large"
    );
    for k in 0..=spec.k_max {
        println!(
            "{k:>3} {:>10.4} {:>10.4} {:>10.4}",
            cmp.adaptive[k].f_min(),
            cmp.small[k].f_min(),
            cmp.large[k].f_min()
        );
    }
    let steps: Vec<String> = cmp
        .adaptive
        .last()
        .unwrap()
        .alpha_history
        .iter()
        .map(|a| format!("{a:.3}"))
        .collect();
    println!("adaptive steps: {}", steps.join(" "));
    Ok(())
}
