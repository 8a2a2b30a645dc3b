//! Draw an experiment: the menu inside the three-outcome simplex next to
//! the identified sectors on the utility circle, as a standalone SVG.
//!
//! ```bash
//! cargo run -p eiv --example plot_partition
//! # writes hexagon.svg in the working directory
//! ```

use eiv::compiler::compile_batch;
use eiv::prior::PriorModel;
use eiv::{EvalConfig, Menu};

fn main() {
    let battery = vec![
        Menu::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.5, 0.5, 0.0],
            vec![0.5, 0.0, 0.5],
            vec![0.0, 0.5, 0.5],
        ])
        .unwrap(),
        Menu::from_rows(&[vec![0.0, 0.6, 0.4], vec![0.0, 0.4, 0.6]]).unwrap(),
    ];
    let experiment = compile_batch(&battery).unwrap().experiment;
    let prior = PriorModel::uniform(3, 1);
    let svg = eiv::cli::render_plot(&experiment, &prior, &EvalConfig::default()).unwrap();
    std::fs::write("hexagon.svg", &svg).unwrap();
    println!("wrote hexagon.svg ({} bytes)", svg.len());
}
