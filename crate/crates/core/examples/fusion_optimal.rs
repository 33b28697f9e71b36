//! Fusion-optimal reduction for a pair of random covariances: fused
//! covariance trace for every reduced dimension, against the full estimate.

use dimred_t2ta::simulation::scenario::random_covariance;
use dimred_t2ta::{
    fusion_loss, fusion_optimal_reduction, gen_eig_spd, kalman_fuse, reduce_estimate, Estimate,
    ReductionMap,
};
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> dimred_t2ta::Result<()> {
    let n = 6;
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let r1 = random_covariance(&mut rng, &vec![1.0; n]);
    let r2 = random_covariance(&mut rng, &vec![1.0; n]);
    let local = Estimate::new(DVector::zeros(n), r1.clone(), 0)?;
    let remote = Estimate::new(DVector::zeros(n), r2.clone(), 0)?;

    let gevo = gen_eig_spd(&(&r1 * &r1), &(&r1 + &r2))?;
    println!("generalized eigenvalues: {:.4?}", gevo.eigenvalues);
    println!("agent 1 alone: trace P = {:.4}", r1.trace());

    for m in 1..=n {
        let map = if m == n {
            ReductionMap::identity(n)
        } else {
            fusion_optimal_reduction(&r1, &r2, m)?
        };
        let fused = kalman_fuse(&local, &reduce_estimate(&remote, &map)?)?;
        println!("m = {m}: trace P = {:.4}", fusion_loss(&fused));
    }
    Ok(())
}
