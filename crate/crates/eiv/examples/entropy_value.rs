//! Valuing a simple experiment under different identification indices.
//!
//! ```bash
//! cargo run -p eiv --example entropy_value
//! ```

use eiv::geometry::ConeUnion;
use eiv::identification::{Experiment, RandomizedExperiment};
use eiv::prior::PriorModel;
use eiv::valuation::{eiv, verify_t1, IdentificationIndex};
use eiv::{EvalConfig, Menu};

fn main() {
    let menu = Menu::with_labels(
        Menu::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap()
        .points()
        .to_vec(),
        vec!["a".into(), "b".into(), "c".into()],
    )
    .unwrap();
    let prior = PriorModel::uniform(3, 7);
    let cfg = EvalConfig::default();

    // perfect observation of a three-way choice
    let discrete = RandomizedExperiment::degenerate(Experiment::discrete(menu.clone()));
    let v = eiv(&discrete, &IdentificationIndex::Entropy, &prior, &cfg).unwrap();
    println!("discrete experiment, entropy index: {:.12} (= ln 3)", v.value);
    for c in &v.atoms[0].cells {
        println!("  cell {}: mass {:.4}, index {:.4}", c.cell, c.mass, c.tau);
    }

    // watching nothing is worth nothing
    let trivial = RandomizedExperiment::degenerate(Experiment::trivial(menu.clone()));
    let v0 = eiv(&trivial, &IdentificationIndex::Entropy, &prior, &cfg).unwrap();
    println!("trivial experiment: {:.12}", v0.value);

    // a hypothesis tester only cares whether the answer settles u* in W*
    let w_star = ConeUnion::from_menu_cell(&menu, &[0, 1]);
    let hypo = IdentificationIndex::HypothesisTest { w_star };
    let vh = eiv(&discrete, &hypo, &prior, &cfg).unwrap();
    println!("discrete experiment, hypothesis index: {:.12}", vh.value);

    // a usable index never prices refinement negatively
    let report = verify_t1(&IdentificationIndex::Entropy, &prior, 500, 11, 1e-9, &cfg).unwrap();
    println!(
        "\nrefinement positivity: {} checked, {} violations",
        report.checked,
        report.violations.len()
    );
}
