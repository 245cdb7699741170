// Evaluate every bound for one setting, then show how the optimal step size
// and the generalization excess move with the number of passes.
//
// ```text
// cargo run --example bound_table
// ```

use rff_sgm::bounds::{self, BoundInputs, BoundTable};

fn run() -> rff_sgm::Result<()> {
    let n = 614;
    let inputs = BoundInputs {
        n,
        steps: 10 * n,
        eta: 0.01,
        lipschitz: 4.0,
        epsilon: 1.0 / (n as f64).sqrt(),
        d: 8,
        components: 200,
        sigma_p: 0.77,
        diam: 18.0,
        b: 1.0,
        w_star_norm_sq: 1.0,
    };
    let table = BoundTable::compute(&inputs, 0.0, 4.0, false);
    print!("{}", table.to_csv());

    println!();
    println!("{:>7} {:>12} {:>12} {:>12}", "epochs", "optimal eta", "excess", "stability");
    for epochs in [1, 2, 5, 10, 20, 50] {
        let at = BoundInputs { steps: epochs * n, ..inputs };
        let best = bounds::generalization_bound(&at, 0.0)?;
        let stab = bounds::stability_bound(&BoundInputs { eta: best.optimal_eta, ..at })?;
        println!("{epochs:>7} {:>12.3e} {:>12.4} {:>12.4}", best.optimal_eta, best.excess, stab);
    }

    let loose = BoundInputs { epsilon: 0.1, ..inputs };
    println!(
        "\nFourier components for a 0.1 kernel tolerance: {} (formula constant 4)",
        bounds::required_components(&loose, 4.0)?
    );
    Ok(())
}

fn main() -> rff_sgm::Result<()> {
    run()
}
