//! Kernel SVMs approximated with random Fourier features and trained by
//! constant-step stochastic gradient descent, together with the closed-form
//! convergence, stability and generalization bounds for that setup and a
//! harness that measures the generalization gap empirically.
//!
//! The pieces, bottom up:
//!
//! - [`data`]: LIBSVM/CSV loading, standardization, seeded splits.
//! - [`rff`]: the RBF random Fourier feature map and the exact kernel.
//! - [`loss`]: the huber-hinge loss and its constants `L = 4`, `β = 2`.
//! - [`sgm`]: SGD with iterate averaging, prediction, empirical risk.
//! - [`bounds`]: bound calculators and the optimal step size.
//! - [`stability`]: gap reports, perturb-one-sample stability, sweeps.
//! - [`cli`]: the `rff-sgm` command-line front end.
//!
//! ```
//! use rff_sgm::{rff::FourierFeatureMap, sgm::{self, SgmConfig}};
//! use ndarray::array;
//!
//! let x = array![[0.0, 1.0], [1.0, 0.0], [0.1, 0.9], [0.9, 0.2]];
//! let ds = rff_sgm::data::Dataset::new("toy", x, array![1.0, -1.0, 1.0, -1.0]).unwrap();
//! let map = FourierFeatureMap::sample(2, 50, 1.0, 7).unwrap();
//! let model = sgm::train(&ds, &map, &SgmConfig { eta: 0.5, epochs: 20, ..Default::default() }).unwrap();
//! let risk = sgm::empirical_risk(model.w_bar.view(), &ds, &map).unwrap();
//! assert_eq!(risk.zero_one, 0.0);
//! ```

pub mod bounds;
pub mod cli;
pub mod data;
pub mod error;
pub mod loss;
pub mod rff;
pub mod sgm;
pub mod stability;

pub use error::{Error, Result};
