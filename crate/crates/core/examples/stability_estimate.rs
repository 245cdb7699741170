// Replace one training sample, retrain with the same sample order, and
// compare the largest loss change on held-out points with the bound
// `T·L²·η/n`.
//
// ```text
// cargo run --example stability_estimate
// ```

use rff_sgm::bounds::{self, BoundInputs};
use rff_sgm::data::synthetic_sphere;
use rff_sgm::rff::FourierFeatureMap;
use rff_sgm::sgm::SgmConfig;
use rff_sgm::stability::{empirical_stability, PerturbationPair};

fn run() -> rff_sgm::Result<()> {
    let all = synthetic_sphere(600, 5, 0.1, 11)?;
    let idx: Vec<usize> = (0..all.n()).collect();
    let train = all.select(&idx[..200]);
    let pool = all.select(&idx[200..400]);
    let probe = all.select(&idx[400..]);
    let map = FourierFeatureMap::sample(5, 100, 0.2, 11)?;
    let seeds: Vec<u64> = (0..10).collect();

    println!("{:>8} {:>7} {:>12} {:>10}", "eta", "epochs", "measured", "bound");
    for (eta, epochs) in [(0.001, 1), (0.005, 1), (0.02, 1), (0.005, 5), (0.005, 20)] {
        let config = SgmConfig { eta, epochs, ..Default::default() };
        let pair = PerturbationPair::replace_from_pool(&train, &pool, 3)?;
        let measured = empirical_stability(&pair, &probe, &map, &config, &seeds)?;
        let bound = bounds::stability_bound(&BoundInputs {
            n: train.n(),
            steps: epochs * train.n(),
            eta,
            ..BoundInputs::default()
        })?;
        println!("{eta:>8} {epochs:>7} {measured:>12.5} {bound:>10.4}");
    }
    Ok(())
}

fn main() -> rff_sgm::Result<()> {
    run()
}
