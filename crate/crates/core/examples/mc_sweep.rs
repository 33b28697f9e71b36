//! Monte Carlo comparison of full, fusion-optimal and association-optimal
//! reduction over the spatial scaling factor. Pass the number of runs as
//! the first argument (default 200).

use dimred_t2ta::simulation::montecarlo::{mc_sweep, spearman, McConfig, Method};
use dimred_t2ta::simulation::{generate_scenario, ScenarioSpec};
use dimred_t2ta::StepBounds;

fn main() -> dimred_t2ta::Result<()> {
    let runs = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(200);
    let scenario = generate_scenario(&ScenarioSpec::default())?;
    let cfg = McConfig {
        runs,
        c_grid: (1..=10).map(|k| k as f64 * 0.5).collect(),
        seed: 1,
        bounds: StepBounds::default(),
        k_max: 25,
        methods: Method::ALL.to_vec(),
    };
    let result = mc_sweep(&cfg, &scenario)?;

    print!("{:>5}", "c");
    for m in Method::ALL {
        print!(" {:>12}", m.name());
    }
    println!();
    for &c in &cfg.c_grid {
        print!("{c:>5.1}");
        for m in Method::ALL {
            print!(" {:>12.4}", result.get(m, c).unwrap().p_ic_mean);
        }
        println!();
    }
    for m in [Method::FusionOpt, Method::AssocOpt] {
        let p: Vec<f64> = result.curve(m).iter().map(|r| r.p_ic_mean).collect();
        println!("{m}: Spearman(c, P_IC) = {:.3}", spearman(&cfg.c_grid, &p));
    }
    Ok(())
}
