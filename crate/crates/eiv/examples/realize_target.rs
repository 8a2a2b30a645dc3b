//! Every finite partition of utility space built from normal fans can be
//! realized by a concrete experiment.
//!
//! The target here groups the fan cells of the average of two small random
//! polytopes into three regions. The realization places one barycenter per
//! face of the average polytope and groups barycenters by the target region
//! swallowing their face's cone; the resulting experiment identifies the
//! target partition up to null sets.
//!
//! ```bash
//! cargo run -p eiv --example realize_target
//! ```

use eiv::axiomlab::random_fan_target;
use eiv::compiler::realize_partition;
use eiv::identification::{identified_family, mu_equivalent, IdentifiedFamily};
use eiv::prior::PriorModel;
use eiv::EvalConfig;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn main() {
    let mut rng = StdRng::seed_from_u64(12);
    let prior = PriorModel::uniform(3, 12);
    let cfg = EvalConfig::default();

    let target = random_fan_target(&mut rng, 4, 3).unwrap();
    println!("target regions and their prior masses:");
    let (masses, _) = prior.measure_cells(target.cells(), &cfg).unwrap();
    for (i, m) in masses.iter().enumerate() {
        println!("  region {i}: {:.6}", m.value);
    }

    let realized = realize_partition(&target).unwrap();
    println!(
        "\nrealized experiment: {} barycenters in {} cells",
        realized.experiment.menu().len(),
        realized.experiment.n_cells()
    );

    let fam = identified_family(&realized.experiment, &prior, &cfg).unwrap();
    let target_family = IdentifiedFamily {
        cells: target.cells().to_vec().into_iter().zip(masses).collect(),
        ties: 0,
    };
    let eq = mu_equivalent(&fam, &target_family, &prior, &cfg).unwrap();
    println!(
        "identified family matches the target: {}",
        eq.is_equivalent()
    );
    if let Some(matching) = eq.matching() {
        for (i, j) in &matching.pairs {
            println!("  experiment cell {i}  <->  target region {j}");
        }
    }
}
