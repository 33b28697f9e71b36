//! Same scenario, same fusion-optimal map, two noise realizations: one is
//! associated correctly and the other one is not.

use dimred_t2ta::simulation::experiments::{
    realization_demo, realization_fixtures, reduced_assignment, DEMO_SEEDS,
};
use dimred_t2ta::ReductionMap;
use nalgebra::DVector;

fn main() -> dimred_t2ta::Result<()> {
    let demo = realization_demo(DEMO_SEEDS)?;
    println!("map {:.4}", demo.map.psi());
    for (k, (a, sol)) in demo.matrices.iter().zip(&demo.assignments).enumerate() {
        println!("realization {}:{:.4}", k + 1, a.costs());
        println!(
            "  assignment {:?} ({})\n",
            sol.perm,
            if sol.is_identity() {
                "correct"
            } else {
                "incorrect"
            }
        );
    }

    // the hand-picked realizations with the map that keeps the second axis
    let map = ReductionMap::from_row(&DVector::from_vec(vec![0.0, 1.0]))?;
    for (k, (s1, s2)) in realization_fixtures()?.iter().enumerate() {
        let (a, sol) = reduced_assignment(s1, s2, &map)?;
        println!(
            "fixture {}: costs {:?} -> {:?}",
            k + 1,
            a.costs().as_slice(),
            sol.perm
        );
    }
    Ok(())
}
