//! Slow seed-sweeping stress runs; excluded from the default test pass.
//!
//! ```bash
//! cargo test -p eiv --test stress --release -- --ignored --nocapture
//! ```

mod common;

use eiv::axiomlab::{self, entropy_functional, random_fan_target, realize_and_compare};
use eiv::compiler::{compile_adaptive, AdaptiveTree};
use eiv::geometry::{argmax_set, UtilityDirection};
use eiv::prior::PriorModel;
use eiv::valuation::{verify_t1, IdentificationIndex};
use eiv::EvalConfig;
use rand::rngs::StdRng;
use rand::SeedableRng;

#[test]
#[ignore]
fn richness_round_trip_across_many_seeds() {
    let prior = PriorModel::uniform(3, 5);
    let cfg = EvalConfig::default();
    for seed in 0..40u64 {
        let mut rng = StdRng::seed_from_u64(seed * 7919 + 13);
        for trial in 0..10 {
            let target = random_fan_target(&mut rng, 4, 5).unwrap();
            assert!(
                realize_and_compare(&target, &prior, &cfg).unwrap(),
                "seed {seed} trial {trial}"
            );
        }
    }
    println!("400 random targets realized and matched");
}

#[test]
#[ignore]
fn information_positivity_across_many_seeds() {
    let prior = PriorModel::uniform(3, 5);
    let cfg = EvalConfig::default();
    for seed in 0..20u64 {
        let report = verify_t1(
            &IdentificationIndex::Entropy,
            &prior,
            1000,
            seed,
            1e-9,
            &cfg,
        )
        .unwrap();
        assert!(report.passed(), "seed {seed}: {:?}", report.violations.first());
    }
    println!("20k nested pairs priced consistently");
}

#[test]
#[ignore]
fn adaptive_oracle_across_many_trees() {
    for seed in 0..60u64 {
        let mut rng = StdRng::seed_from_u64(seed + 1);
        let root = eiv::gen::random_menu(&mut rng, 3, 2);
        let left = eiv::gen::random_menu(&mut rng, 3, 2);
        let right = eiv::gen::random_menu(&mut rng, 3, 2);
        let tree = AdaptiveTree::node(
            root.clone(),
            vec![AdaptiveTree::leaf(left.clone()), AdaptiveTree::leaf(right.clone())],
        );
        let e = match compile_adaptive(&tree) {
            Ok(e) => e,
            // random draws may collide; that is a documented refusal
            Err(_) => continue,
        };
        for k in 0..720 {
            let theta = k as f64 * std::f64::consts::TAU / 720.0;
            let u = UtilityDirection::from_angle(theta);
            let s1 = argmax_set(&u, &root, 0.0).indices[0];
            let m1 = (u.value(root.point(0)) - u.value(root.point(1))).abs();
            let child = if s1 == 0 { &left } else { &right };
            let s2 = argmax_set(&u, child, 0.0).indices[0];
            let m2 = (u.value(child.point(0)) - u.value(child.point(1))).abs();
            if m1 < 1e-6 || m2 < 1e-6 {
                continue;
            }
            let choice = argmax_set(&u, e.menu(), 0.0).indices[0];
            let cell = e.partition().iter().position(|c| c.contains(&choice)).unwrap();
            let observed = e.menu().label(e.partition()[cell][0]);
            let simulated = format!("{}>{}", root.label(s1), child.label(s2));
            assert_eq!(observed, simulated, "seed {seed} angle {theta}");
        }
    }
    println!("60 random trees matched their stage-wise oracles");
}

#[test]
#[ignore]
fn axiom_battery_across_many_seeds() {
    let v = entropy_functional(PriorModel::uniform(3, 5), EvalConfig::default(), 1e-6);
    for seed in 0..8u64 {
        for name in axiomlab::CHECK_NAMES {
            let report = axiomlab::run_check(name, &v, 60, seed * 31 + 5).unwrap();
            assert!(
                report.passed(),
                "{name} at seed {seed}: {:?}",
                report.violations.first()
            );
        }
    }
    println!("entropy cleared 8 independent seed batteries");
}
