//! Frozen exact values for the worked six-sector example, checked against
//! an independent boundary-angle oracle and against the library's own arc
//! path.

mod common;

use common::{battery_a, battery_b, cell_fractions_analytic};
use eiv::geometry::{cone_equal, mix_menus, normal_cone_at, ConeUnion, Lottery};
use eiv::identification::{identified_family, Experiment};
use eiv::prior::PriorModel;
use eiv::EvalConfig;

/// the six positive cells of either mixed battery each cover one sixth of
/// the utility circle
const SECTOR_MASS: f64 = 1.0 / 6.0;
/// entropy value of the six-sector experiment
const SECTOR_ENTROPY: f64 = 1.791_759_469_228_055; // ln 6
/// conditional mass of one sector against the union of two
const SECTOR_CONDITIONAL: f64 = 0.5;

#[test]
fn oracle_confirms_six_equal_sectors() {
    let (a, a2) = battery_a();
    let mixed = mix_menus(0.5, &a, &a2).unwrap();
    let fractions = cell_fractions_analytic(&mixed.menu);
    let positive: Vec<f64> = fractions.iter().copied().filter(|&f| f > 1e-9).collect();
    assert_eq!(positive.len(), 6);
    for f in positive {
        assert!((f - SECTOR_MASS).abs() < 1e-9, "sector fraction {f}");
    }
    // the two interior points get nothing
    assert_eq!(fractions.iter().filter(|&&f| f <= 1e-9).count(), 2);
}

#[test]
fn arc_path_matches_the_oracle_on_both_batteries() {
    let prior = PriorModel::uniform(3, 1);
    let cfg = EvalConfig::default();
    for (m1, m2) in [battery_a(), battery_b()] {
        let mixed = mix_menus(0.5, &m1, &m2).unwrap();
        let oracle = cell_fractions_analytic(&mixed.menu);
        let fam =
            identified_family(&Experiment::discrete(mixed.menu.clone()), &prior, &cfg).unwrap();
        for (k, (_, m)) in fam.cells.iter().enumerate() {
            assert!(m.exact);
            assert!(
                (m.value - oracle[k]).abs() < 1e-9,
                "cell {k}: arc {} vs oracle {}",
                m.value,
                oracle[k]
            );
        }
        let entropy: f64 = fam
            .cells
            .iter()
            .filter(|(_, m)| m.value > 1e-9)
            .map(|(_, m)| -m.value * m.value.ln())
            .sum();
        assert!((entropy - SECTOR_ENTROPY).abs() < 1e-9);
    }
}

#[test]
fn conditional_between_adjacent_sectors_is_half() {
    let (a, a2) = battery_a();
    let mixed = mix_menus(0.5, &a, &a2).unwrap();
    let prior = PriorModel::uniform(3, 1);
    let cfg = EvalConfig::default();
    let w1_idx = mixed
        .menu
        .position_of(&Lottery::new(vec![0.25, 0.55, 0.20]).unwrap())
        .unwrap();
    let w2_idx = mixed
        .menu
        .position_of(&Lottery::new(vec![0.5, 0.3, 0.2]).unwrap())
        .unwrap();
    let w1 = ConeUnion::from_menu_cell(&mixed.menu, &[w1_idx]);
    let w2 = ConeUnion::from_menu_cell(&mixed.menu, &[w2_idx]);
    let cond = prior
        .conditional_measure(&w1, &w1.union(&w2), &cfg)
        .unwrap();
    assert!(cond.exact);
    assert!((cond.value - SECTOR_CONDITIONAL).abs() < 1e-9);
}

#[test]
fn paired_sector_cones_agree_across_batteries() {
    // the cone of the hexagon vertex mixing the second point of the first
    // menu with the first point of its partner equals the cone of the
    // corresponding vertex in the other battery
    let (a, a2) = battery_a();
    let (b, b2) = battery_b();
    let mix_a = mix_menus(0.5, &a, &a2).unwrap();
    let mix_b = mix_menus(0.5, &b, &b2).unwrap();
    let third = 1.0 / 3.0;
    let pa = mix_a
        .menu
        .position_of(&Lottery::new(vec![0.25, 0.55, 0.20]).unwrap())
        .unwrap();
    let pb = mix_b
        .menu
        .position_of(&Lottery::new(vec![third, 2.0 * third, 0.0]).unwrap())
        .unwrap();
    let ka = normal_cone_at(&mix_a.menu, pa);
    let kb = normal_cone_at(&mix_b.menu, pb);
    assert!(cone_equal(&ka, &kb).unwrap());
    // and two different sectors differ
    let other = mix_a
        .menu
        .position_of(&Lottery::new(vec![0.5, 0.3, 0.2]).unwrap())
        .unwrap();
    assert!(!cone_equal(&ka, &normal_cone_at(&mix_a.menu, other)).unwrap());
}

#[test]
fn oracle_agrees_with_arcs_on_random_menus() {
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    let prior = PriorModel::uniform(3, 9);
    let cfg = EvalConfig::default();
    let mut rng = StdRng::seed_from_u64(2024);
    for _ in 0..40 {
        let n = rng.random_range(2..7);
        let menu = eiv::gen::random_menu(&mut rng, 3, n);
        let oracle = cell_fractions_analytic(&menu);
        for i in 0..menu.len() {
            let w = ConeUnion::from_menu_cell(&menu, &[i]);
            let arc = prior.measure(&w, &cfg).unwrap();
            assert!(
                (arc.value - oracle[i]).abs() < 1e-9,
                "point {i}: {} vs {}",
                arc.value,
                oracle[i]
            );
        }
    }
}
