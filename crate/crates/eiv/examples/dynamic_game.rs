//! Compiling a partially observed dynamic game into a randomized
//! experiment.
//!
//! The subject first chooses between quitting (a sure outcome) and staying
//! in; staying hands the move to a chance device that selects one of two
//! follow-up menus. The analyst sees only on-path actions, so what each
//! pure strategy reveals depends on the chance draw: the compiled object is
//! a lottery over experiments, one per chance realization.
//!
//! ```bash
//! cargo run -p eiv --example dynamic_game
//! ```

use eiv::compiler::{compile_game, DynamicGame, GameAction, GameBranch, GameNode};
use eiv::identification::RandomizedExperiment;
use eiv::prior::PriorModel;
use eiv::valuation::{eiv, IdentificationIndex};
use eiv::{EvalConfig, Lottery};

fn main() {
    let leaf = |coords: Vec<f64>| GameNode::Leaf { outcome: Lottery::new(coords).unwrap() };
    let game = DynamicGame {
        root: GameNode::Subject {
            name: "start".into(),
            actions: vec![
                GameAction { name: "o".into(), child: leaf(vec![0.2, 0.4, 0.4]) },
                GameAction {
                    name: "i".into(),
                    child: GameNode::Chance {
                        branches: vec![
                            GameBranch {
                                prob: 0.5,
                                child: GameNode::Subject {
                                    name: "left".into(),
                                    actions: vec![
                                        GameAction { name: "a".into(), child: leaf(vec![0.8, 0.1, 0.1]) },
                                        GameAction { name: "b".into(), child: leaf(vec![0.1, 0.8, 0.1]) },
                                    ],
                                },
                            },
                            GameBranch {
                                prob: 0.5,
                                child: GameNode::Subject {
                                    name: "right".into(),
                                    actions: vec![
                                        GameAction { name: "c".into(), child: leaf(vec![0.1, 0.1, 0.8]) },
                                        GameAction { name: "d".into(), child: leaf(vec![0.4, 0.4, 0.2]) },
                                    ],
                                },
                            },
                        ],
                    },
                },
            ],
        },
    };

    let compiled = compile_game(&game).unwrap();
    println!(
        "menu of induced strategy lotteries: {} points",
        compiled.randomized.atoms()[0].0.menu().len()
    );
    for (z, (atom, weight)) in compiled.randomized.atoms().iter().enumerate() {
        println!("\nchance realization {z} (probability {weight}):");
        for (cell, labels) in compiled.strategy_cells[z].iter().enumerate() {
            println!("  cell {cell}: {}", labels.join(" "));
        }
        let _ = atom;
    }

    let prior = PriorModel::uniform(3, 3);
    let cfg = EvalConfig::default();
    let value = eiv(&compiled.randomized, &IdentificationIndex::Entropy, &prior, &cfg).unwrap();
    println!("\nentropy value of the compiled game: {:.9}", value.value);

    // compare against observing the strategy choice perfectly
    let perfect = RandomizedExperiment::degenerate(
        eiv::identification::Experiment::discrete(compiled.randomized.atoms()[0].0.menu().clone()),
    );
    let v_perfect = eiv(&perfect, &IdentificationIndex::Entropy, &prior, &cfg).unwrap();
    println!("entropy value under full observability: {:.9}", v_perfect.value);
}
