// The three generalization-gap sweeps (Fourier components, epochs by
// training fraction, learning rate) written as CSV, with rank correlations
// summarizing each trend.
//
// ```text
// cargo run --release --example sweeps [DATA.csv] > sweeps.csv
// ```

use std::path::Path;

use rff_sgm::data::{self, LabelColumn};
use rff_sgm::stability::{self, records_to_csv, spearman, ExperimentSetup};

fn run(path: Option<&Path>, seeds: u64) -> rff_sgm::Result<()> {
    let ds = match path {
        Some(p) => data::load_csv(p, LabelColumn::Last)?,
        None => data::synthetic_sphere(300, 4, 0.1, 8)?,
    };
    let mut setup = ExperimentSetup { seeds: (0..seeds).collect(), ..ExperimentSetup::default() };
    setup.sgm.eta = 0.01;
    setup.sgm.epochs = 10;

    let components = [10, 25, 50, 100, 200];
    let fourier = stability::sweep_fourier(&ds, &components, &setup)?;
    let epochs = [1, 2, 5, 10, 20, 50];
    let by_epochs = stability::sweep_epochs_and_size(&ds, &epochs, &[0.5, 1.0], &setup)?;
    let etas = [1e-4, 1e-3, 1e-2, 1e-1];
    let by_eta = stability::sweep_learning_rate(&ds, &etas, &setup)?;

    let mut all = fourier.clone();
    all.extend(by_epochs.iter().cloned());
    all.extend(by_eta.iter().cloned());
    print!("{}", records_to_csv(&all, false));

    let xs = |v: &[usize]| v.iter().map(|&x| x as f64).collect::<Vec<_>>();
    let full: Vec<f64> = by_epochs[epochs.len()..].iter().map(|r| r.mean_gap_loss).collect();
    eprintln!(
        "spearman: test error vs D {:.2}, gap vs epochs {:.2}, gap vs eta {:.2}",
        spearman(&xs(&components), &fourier.iter().map(|r| r.mean_test_01).collect::<Vec<_>>()),
        spearman(&xs(&epochs), &full),
        spearman(&etas, &by_eta.iter().map(|r| r.mean_gap_loss).collect::<Vec<_>>()),
    );
    Ok(())
}

fn main() -> rff_sgm::Result<()> {
    let path = std::env::args().nth(1);
    run(path.as_deref().map(Path::new), 10)
}
