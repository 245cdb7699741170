// How closely `z(x)ᵀz(y)` tracks the RBF kernel as the number of Fourier
// components grows.
//
// ```text
// cargo run --example kernel_approximation [POINTS]
// ```

use rff_sgm::data::{standardize, synthetic_sphere};
use rff_sgm::rff::{exact_kernel, median_heuristic_gamma, FourierFeatureMap, KernelParams};

fn run(points: usize) -> rff_sgm::Result<()> {
    let (ds, _) = standardize(&synthetic_sphere(points, 10, 0.0, 1)?)?;
    let x = ds.features;
    let gamma = median_heuristic_gamma(x.view(), 1000, 0)?;
    let kernel = KernelParams::new(gamma)?;
    println!("{points} points in 10 dimensions, median-heuristic gamma = {gamma:.4}");
    println!("{:>6} {:>12} {:>12}", "D", "mean |err|", "max |err|");

    for components in [10, 20, 40, 80, 160, 320] {
        let map = FourierFeatureMap::sample(x.ncols(), components, gamma, 7)?;
        let z = map.transform_rows(x.view())?;
        let (mut total, mut worst, mut pairs) = (0.0, 0.0f64, 0);
        for i in 0..x.nrows() {
            for j in i + 1..x.nrows() {
                let err = (z.row(i).dot(&z.row(j)) - exact_kernel(kernel, x.row(i), x.row(j))?).abs();
                total += err;
                worst = worst.max(err);
                pairs += 1;
            }
        }
        println!("{components:>6} {:>12.5} {:>12.5}", total / pairs as f64, worst);
    }
    Ok(())
}

fn main() -> rff_sgm::Result<()> {
    let points = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(60);
    run(points)
}
