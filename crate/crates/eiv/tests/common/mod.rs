//! Shared fixtures and independent oracles for the integration suites.
#![allow(dead_code)]

use eiv::geometry::{argmax_set, Lottery, Menu, UtilityDirection};
use std::f64::consts::{PI, TAU};

/// First battery: a four-point menu and a two-point menu whose half/half
/// mixture is a hexagon with two interior points.
pub fn battery_a() -> (Menu, Menu) {
    (
        Menu::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.5, 0.5, 0.0],
            vec![0.5, 0.0, 0.5],
            vec![0.0, 0.5, 0.5],
        ])
        .unwrap(),
        Menu::from_rows(&[vec![0.0, 0.6, 0.4], vec![0.0, 0.4, 0.6]]).unwrap(),
    )
}

/// Second battery: the simplex vertices and a three-point menu; its
/// half/half mixture identifies the same six-sector partition.
pub fn battery_b() -> (Menu, Menu) {
    let third = 1.0 / 3.0;
    (
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
    )
}

/// The four partitions of the first battery menu from the separability
/// example: discrete, pairs, and the two mixed ones.
pub fn separability_partitions(
) -> (Vec<Vec<usize>>, Vec<Vec<usize>>, Vec<Vec<usize>>, Vec<Vec<usize>>) {
    (
        vec![vec![0], vec![1], vec![2], vec![3]],
        vec![vec![0, 1], vec![2, 3]],
        vec![vec![0, 1], vec![2], vec![3]],
        vec![vec![0], vec![1], vec![2, 3]],
    )
}

/// Independent arc oracle: the fraction of the utility circle on which each
/// menu point is the argmax, computed from pairwise boundary angles and
/// midpoint argmax probes alone. No interval arithmetic, no linear
/// programs.
pub fn cell_fractions_analytic(menu: &Menu) -> Vec<f64> {
    assert_eq!(menu.dim(), 3);
    let n = menu.len();
    let e1 = UtilityDirection::from_angle(0.0);
    let e2 = UtilityDirection::from_angle(PI / 2.0);
    let mut boundaries: Vec<f64> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let d: Vec<f64> = menu
                .point(i)
                .coords()
                .iter()
                .zip(menu.point(j).coords())
                .map(|(a, b)| a - b)
                .collect();
            let a = e1.dot(&d);
            let b = e2.dot(&d);
            if a.hypot(b) < 1e-12 {
                continue;
            }
            // solutions of a cos(t) + b sin(t) = 0
            let base = (-a).atan2(b);
            for extra in [0.0, PI] {
                let theta = (base + extra).rem_euclid(TAU);
                let u = UtilityDirection::from_angle(theta);
                let am = argmax_set(&u, menu, 1e-9);
                if am.indices.contains(&i) && am.indices.contains(&j) {
                    boundaries.push(theta);
                }
            }
        }
    }
    let mut fractions = vec![0.0; n];
    if boundaries.is_empty() {
        // one point rules the whole circle
        let u = UtilityDirection::from_angle(0.31);
        fractions[argmax_set(&u, menu, 0.0).indices[0]] = 1.0;
        return fractions;
    }
    boundaries.sort_by(|x, y| x.partial_cmp(y).unwrap());
    boundaries.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let k = boundaries.len();
    for idx in 0..k {
        let lo = boundaries[idx];
        let hi = if idx + 1 < k { boundaries[idx + 1] } else { boundaries[0] + TAU };
        if hi - lo < 1e-12 {
            continue;
        }
        let mid = (lo + hi) / 2.0;
        let u = UtilityDirection::from_angle(mid);
        let winner = argmax_set(&u, menu, 0.0).indices[0];
        fractions[winner] += (hi - lo) / TAU;
    }
    fractions
}

/// Build a lottery, panicking on invalid input (test convenience).
pub fn lot(coords: &[f64]) -> Lottery {
    Lottery::new(coords.to_vec()).unwrap()
}
