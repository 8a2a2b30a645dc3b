//! The value of identification does not depend on what would have been
//! identified had the subject chosen differently.
//!
//! Two half/half randomizations over partitions of one menu: the first
//! mixes the discrete partition with a two-cell grouping; the second mixes
//! the two "spliced" partitions that each observe perfectly on one side of
//! the grouping and coarsely on the other. Both reveal the subject's choice
//! half the time and the coarse cell the other half; only the correlation
//! with the subject's type differs, and the value must not care.
//!
//! ```bash
//! cargo run -p eiv --example separability
//! ```

use eiv::identification::{Experiment, RandomizedExperiment};
use eiv::prior::PriorModel;
use eiv::valuation::{eiv, IdentificationIndex};
use eiv::{EvalConfig, Menu};

fn main() {
    let menu = Menu::from_rows(&[
        vec![1.0, 0.0, 0.0],
        vec![0.5, 0.5, 0.0],
        vec![0.5, 0.0, 0.5],
        vec![0.0, 0.5, 0.5],
    ])
    .unwrap();
    let discrete = vec![vec![0], vec![1], vec![2], vec![3]];
    let pairs = vec![vec![0, 1], vec![2, 3]];
    let fine_left = vec![vec![0, 1], vec![2], vec![3]];
    let fine_right = vec![vec![0], vec![1], vec![2, 3]];

    let exp = |cells: &Vec<Vec<usize>>| Experiment::new(menu.clone(), cells.clone()).unwrap();
    let first = RandomizedExperiment::new(vec![(exp(&discrete), 0.5), (exp(&pairs), 0.5)]).unwrap();
    let second =
        RandomizedExperiment::new(vec![(exp(&fine_left), 0.5), (exp(&fine_right), 0.5)]).unwrap();

    let prior = PriorModel::uniform(3, 1);
    let cfg = EvalConfig::default();
    let v1 = eiv(&first, &IdentificationIndex::Entropy, &prior, &cfg).unwrap();
    let v2 = eiv(&second, &IdentificationIndex::Entropy, &prior, &cfg).unwrap();

    println!("half discrete + half paired:   {:.12}", v1.value);
    println!("half spliced + half spliced:   {:.12}", v2.value);
    println!("difference: {:.2e}", (v1.value - v2.value).abs());
}
