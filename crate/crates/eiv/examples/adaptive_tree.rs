//! Compiling a two-stage adaptive procedure into one static experiment.
//!
//! The analyst offers a first menu and, depending on the choice, one of two
//! follow-up menus. A linear subject plays the tree exactly like a single
//! choice from the compiled menu of contingent plans, and the compiled
//! partition hides whatever happens off the realized path. The example
//! cross-checks the compiled cells against brute-force stage-wise
//! simulation over a fine grid of utility directions.
//!
//! ```bash
//! cargo run -p eiv --example adaptive_tree
//! ```

use eiv::compiler::{compile_adaptive, AdaptiveTree};
use eiv::geometry::{argmax_set, UtilityDirection};
use eiv::Menu;

fn main() {
    let root = Menu::with_labels(
        Menu::from_rows(&[vec![0.7, 0.2, 0.1], vec![0.1, 0.6, 0.3]])
            .unwrap()
            .points()
            .to_vec(),
        vec!["x".into(), "y".into()],
    )
    .unwrap();
    let after_x = Menu::with_labels(
        Menu::from_rows(&[vec![0.5, 0.4, 0.1], vec![0.2, 0.2, 0.6]])
            .unwrap()
            .points()
            .to_vec(),
        vec!["xx".into(), "yx".into()],
    )
    .unwrap();
    let after_y = Menu::with_labels(
        Menu::from_rows(&[vec![0.3, 0.3, 0.4], vec![0.6, 0.1, 0.3]])
            .unwrap()
            .points()
            .to_vec(),
        vec!["xy".into(), "yy".into()],
    )
    .unwrap();

    let tree = AdaptiveTree::node(
        root.clone(),
        vec![AdaptiveTree::leaf(after_x.clone()), AdaptiveTree::leaf(after_y.clone())],
    );
    let compiled = compile_adaptive(&tree).unwrap();
    println!(
        "compiled menu: {} plan lotteries in {} observation cells",
        compiled.menu().len(),
        compiled.n_cells()
    );
    for (k, cell) in compiled.partition().iter().enumerate() {
        println!(
            "  cell {k}: observation {:<6} ({} plans merged)",
            compiled.menu().label(cell[0]),
            cell.len()
        );
    }

    // brute-force check against stage-wise play on a one-degree grid
    let steps = 360;
    let mut agree = 0;
    for k in 0..steps {
        let theta = k as f64 * std::f64::consts::TAU / steps as f64;
        let u = UtilityDirection::from_angle(theta);
        let s1 = argmax_set(&u, &root, 0.0).indices[0];
        let child = if s1 == 0 { &after_x } else { &after_y };
        let s2 = argmax_set(&u, child, 0.0).indices[0];
        let simulated = format!("{}>{}", root.label(s1), child.label(s2));
        let choice = argmax_set(&u, compiled.menu(), 0.0).indices[0];
        let cell = compiled
            .partition()
            .iter()
            .position(|c| c.contains(&choice))
            .unwrap();
        let observed = compiled.menu().label(compiled.partition()[cell][0]);
        if observed == simulated {
            agree += 1;
        }
    }
    println!("\ngrid agreement with stage-wise simulation: {agree}/{steps}");
}
