// Compare a hand-picked constant step with the two theory-derived step
// sizes, which need a scale `B` for the optimal predictor.
//
// ```text
// cargo run --example step_size_schedules
// ```

use rff_sgm::data::{split, standardize, synthetic_sphere, SplitSpec};
use rff_sgm::rff::{median_heuristic_gamma, FourierFeatureMap};
use rff_sgm::sgm::{self, Schedule, SgmConfig};

fn run() -> rff_sgm::Result<()> {
    let ds = synthetic_sphere(500, 4, 0.05, 21)?;
    let parts = split(&ds, &SplitSpec::default())?;
    let (train, scaler) = standardize(&parts.train)?;
    let test = scaler.apply(&parts.test)?;
    let gamma = median_heuristic_gamma(train.features.view(), 1000, 0)?;
    let map = FourierFeatureMap::sample(train.d(), 150, gamma, 0)?;
    let epsilon = 1.0 / (train.n() as f64).sqrt();

    println!("{:<18} {:>7} {:>10} {:>10} {:>10}", "schedule", "epochs", "eta", "train_01", "test_01");
    for (schedule, epochs) in [
        (Schedule::Constant, 10),
        (Schedule::SinglePass, 1),
        (Schedule::StabilityOptimal, 1),
        (Schedule::StabilityOptimal, 10),
    ] {
        let config = SgmConfig { eta: 0.05, epochs, schedule, b: Some(20.0), epsilon, ..Default::default() };
        let model = sgm::train(&train, &map, &config)?;
        let tr = sgm::empirical_risk(model.w_bar.view(), &train, &map)?;
        let te = sgm::empirical_risk(model.w_bar.view(), &test, &map)?;
        println!(
            "{:<18} {epochs:>7} {:>10.5} {:>10.3} {:>10.3}",
            schedule.to_string(),
            model.eta,
            tr.zero_one,
            te.zero_one
        );
    }
    Ok(())
}

fn main() -> rff_sgm::Result<()> {
    run()
}
