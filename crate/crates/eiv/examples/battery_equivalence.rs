//! Two experimental batteries that look nothing alike but identify exactly
//! the same sets of utilities, and therefore must be valued equally.
//!
//! The first battery offers a four-point menu and a two-point menu; the
//! second offers the three simplex vertices and a different three-point
//! menu. Observing one choice from each menu of a battery is equivalent to
//! observing a single choice from the half/half Minkowski mixture, and both
//! mixtures cut the utility circle into the same six sectors.
//!
//! ```bash
//! cargo run -p eiv --example battery_equivalence
//! ```

use eiv::compiler::compile_batch;
use eiv::identification::{identified_family, mu_equivalent, RandomizedExperiment};
use eiv::prior::PriorModel;
use eiv::valuation::{eiv, IdentificationIndex};
use eiv::{EvalConfig, Menu};

fn main() {
    let battery_a = vec![
        Menu::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.5, 0.5, 0.0],
            vec![0.5, 0.0, 0.5],
            vec![0.0, 0.5, 0.5],
        ])
        .unwrap(),
        Menu::from_rows(&[vec![0.0, 0.6, 0.4], vec![0.0, 0.4, 0.6]]).unwrap(),
    ];
    let third = 1.0 / 3.0;
    let battery_b = vec![
        Menu::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap(),
        Menu::from_rows(&[
            vec![2.0 * third, third, 0.0],
            vec![2.0 * third, 0.0, third],
            vec![third, third, third],
        ])
        .unwrap(),
    ];

    let prior = PriorModel::uniform(3, 42);
    let cfg = EvalConfig::default();

    let ea = compile_batch(&battery_a).unwrap().experiment;
    let eb = compile_batch(&battery_b).unwrap().experiment;
    println!(
        "battery A compiles to {} points, battery B to {}",
        ea.menu().len(),
        eb.menu().len()
    );

    let fam_a = identified_family(&ea, &prior, &cfg).unwrap();
    let fam_b = identified_family(&eb, &prior, &cfg).unwrap();
    println!("\nidentified cells (battery A):");
    for (k, (_, m)) in fam_a.cells.iter().enumerate() {
        println!("  cell {k}: mass {:.6}", m.value);
    }

    let eq = mu_equivalent(&fam_a, &fam_b, &prior, &cfg).unwrap();
    match eq.matching() {
        Some(matching) => {
            println!("\nfamilies are equivalent; cell bijection:");
            for (i, j) in &matching.pairs {
                println!("  A cell {i}  <->  B cell {j}");
            }
        }
        None => println!("\nfamilies differ!"),
    }

    let va = eiv(
        &RandomizedExperiment::degenerate(ea),
        &IdentificationIndex::Entropy,
        &prior,
        &cfg,
    )
    .unwrap();
    let vb = eiv(
        &RandomizedExperiment::degenerate(eb),
        &IdentificationIndex::Entropy,
        &prior,
        &cfg,
    )
    .unwrap();
    println!("\nentropy value of battery A: {:.12}", va.value);
    println!("entropy value of battery B: {:.12}", vb.value);
    println!("difference: {:.2e}", (va.value - vb.value).abs());
}
