//! Random instance generators shared by the property checks, the axiom
//! harness, and the test suites.

use crate::geometry::{Lottery, Menu, UtilityDirection};
use crate::identification::Experiment;
use rand::rngs::StdRng;
use rand::Rng;
use std::f64::consts::TAU;

/// A random menu of `n` well-separated lotteries in the `dim`-outcome
/// simplex.
pub fn random_menu(rng: &mut StdRng, dim: usize, n: usize) -> Menu {
    let mut pts: Vec<Lottery> = Vec::new();
    let mut attempts = 0;
    while pts.len() < n {
        attempts += 1;
        let sep = if attempts > 200 { 1e-4 } else { 1e-2 };
        let mut c: Vec<f64> = (0..dim).map(|_| rng.random_range(0.001..1.0)).collect();
        let s: f64 = c.iter().sum();
        c.iter_mut().for_each(|v| *v /= s);
        let l = Lottery::new(c).expect("normalized draw is a lottery");
        if pts.iter().all(|p| p.distance(&l) > sep) {
            pts.push(l);
        }
    }
    Menu::new(pts).expect("separated points form a menu")
}

/// A random utility direction.
pub fn random_direction(rng: &mut StdRng, dim: usize) -> UtilityDirection {
    loop {
        let raw: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        if let Ok(u) = UtilityDirection::new(raw) {
            return u;
        }
    }
}

/// A random partition of `0..n` into at least `min_cells` groups, drawn by
/// random merges of the discrete partition.
pub fn random_partition(rng: &mut StdRng, n: usize, min_cells: usize) -> Vec<Vec<usize>> {
    let mut cells: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let target = rng.random_range(min_cells..=n.max(min_cells));
    while cells.len() > target {
        let i = rng.random_range(0..cells.len());
        let mut j = rng.random_range(0..cells.len());
        while j == i {
            j = rng.random_range(0..cells.len());
        }
        let (lo, hi) = (i.min(j), i.max(j));
        let moved = cells.remove(hi);
        cells[lo].extend(moved);
    }
    for c in &mut cells {
        c.sort_unstable();
    }
    cells
}

/// A random experiment over a random menu in the `dim`-outcome simplex.
pub fn random_experiment(rng: &mut StdRng, dim: usize) -> Experiment {
    let n = rng.random_range(3..=8);
    let menu = random_menu(rng, dim, n);
    let partition = random_partition(rng, n, 1);
    Experiment::new(menu, partition).expect("random partition is structurally valid")
}

/// A menu of three-outcome lotteries whose vertex cells cut the utility
/// circle into arcs with exactly the prescribed fractions.
///
/// Cell boundaries of a convex polygon are its edge normal directions, so
/// the polygon is built from its edges: one line tangent to a small circle
/// at each prescribed boundary angle, with vertices at consecutive tangent
/// intersections. Every fraction must stay below one half (the tangents of
/// a wider gap never meet); the even split across exactly two cells is
/// handled as a two-point menu. Returns `None` for infeasible fractions.
pub fn wheel_menu(fractions: &[f64], rotation: f64) -> Option<Menu> {
    let k = fractions.len();
    if k < 2 {
        return None;
    }
    let sum: f64 = fractions.iter().sum();
    if (sum - 1.0).abs() > 1e-9 || fractions.iter().any(|&f| f <= 0.0) {
        return None;
    }
    let embed = |angle: f64, radius: f64| {
        let u = UtilityDirection::from_angle(angle);
        let coords = u.coords().iter().map(|c| 1.0 / 3.0 + radius * c).collect();
        Lottery::new(coords).ok()
    };
    if k == 2 {
        if (fractions[0] - 0.5).abs() > 1e-9 {
            return None;
        }
        let mid = rotation + TAU / 4.0;
        let points = vec![embed(mid, 0.2)?, embed(mid + std::f64::consts::PI, 0.2)?];
        return Menu::new(points).ok();
    }
    if fractions.iter().any(|&f| f >= 0.5 - 1e-6) {
        return None;
    }
    let mut bounds = Vec::with_capacity(k + 1);
    let mut acc = rotation;
    bounds.push(acc);
    for &f in fractions {
        acc += f * TAU;
        bounds.push(acc);
    }
    // keep every vertex within a safe distance of the barycenter
    let min_cos = fractions
        .iter()
        .map(|&f| (f * std::f64::consts::PI).cos())
        .fold(f64::INFINITY, f64::min);
    let r = 0.22 * min_cos;
    let mut points = Vec::with_capacity(k);
    for i in 0..k {
        let gap = fractions[i] * TAU;
        let mid = (bounds[i] + bounds[i + 1]) / 2.0;
        let radius = r / (gap / 2.0).cos();
        points.push(embed(mid, radius)?);
    }
    Menu::new(points).ok()
}
