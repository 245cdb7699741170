// Train a random-feature SVM with SGD, evaluate it and save it.
//
// ```text
// cargo run --example train_classifier [DATA.csv|DATA.libsvm]
// ```
//
// Without a path a synthetic nonlinear problem is used.

use std::path::Path;

use rff_sgm::data::{self, split, standardize, LabelColumn, SplitSpec, Standardizer};
use rff_sgm::rff::{median_heuristic_gamma, FourierFeatureMap};
use rff_sgm::sgm::{self, SgmConfig};

fn run(path: Option<&Path>, out_dir: &Path) -> rff_sgm::Result<()> {
    let ds = match path {
        Some(p) if p.extension().is_some_and(|e| e == "csv") => data::load_csv(p, LabelColumn::Last)?,
        Some(p) => data::load_libsvm(p)?,
        None => data::synthetic_sphere(600, 5, 0.05, 3)?,
    };
    println!("{}: n = {}, d = {}, {:.1}% negative", ds.name, ds.n(), ds.d(), 100.0 * ds.negative_fraction());

    let parts = split(&ds, &SplitSpec { test_fraction: 0.2, seed: 1, shuffle: true })?;
    // Scale with training statistics only.
    let (train, scaler): (_, Standardizer) = standardize(&parts.train)?;
    let test = scaler.apply(&parts.test)?;

    let gamma = median_heuristic_gamma(train.features.view(), 1000, 1)?;
    let map = FourierFeatureMap::sample(train.d(), 200, gamma, 1)?;
    let config = SgmConfig { eta: 0.05, epochs: 20, seed: 1, ..Default::default() };
    let model = sgm::train(&train, &map, &config)?;

    for (name, set) in [("train", &train), ("test", &test)] {
        let avg = sgm::empirical_risk(model.w_bar.view(), set, &map)?;
        let last = sgm::empirical_risk(model.w.view(), set, &map)?;
        println!(
            "{name:>5}: averaged iterate loss {:.4} error {:.3} | last iterate loss {:.4} error {:.3}",
            avg.loss, avg.zero_one, last.loss, last.zero_one
        );
    }
    println!("gamma = {gamma:.4}, D = 200, eta = {}, T = {}", model.eta, model.t);

    let first = test.features.row(0);
    println!("prediction for the first test row: {:+}", sgm::predict(&model, &map, first, true)?);

    let model_path = out_dir.join("model.txt");
    model.save(&model_path, &map, &config)?;
    map.save(out_dir.join("map.txt"))?;
    println!("saved {}", model_path.display());
    Ok(())
}

fn main() -> rff_sgm::Result<()> {
    let path = std::env::args().nth(1);
    run(path.as_deref().map(Path::new), &std::env::temp_dir())
}
