//! Property-test harness for valuation functionals over randomized
//! experiments.
//!
//! Each check generates seeded random instances satisfying one axiom's
//! hypothesis and asserts its conclusion on a user-supplied functional,
//! reporting violations with serialized witnesses. The checks certify
//! nothing beyond the trials run; they exist to falsify broken functionals
//! fast and to give well-behaved ones a clean bill across all branches.

use crate::compiler::{compile_batch, realize_partition, CompileError, TargetPartition};
use crate::config::EvalConfig;
use crate::gen;
use crate::geometry::{enumerate_faces, GeometryError, Lottery, Menu};
use crate::identification::{identified_family, Experiment, IdentError, RandomizedExperiment};
use crate::prior::PriorModel;
use crate::valuation::{eiv, IdentificationIndex, ValuationError};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AxiomError {
    #[error("functional evaluation failed: {0}")]
    Functional(String),
    #[error("unknown check name: {0}")]
    UnknownCheck(String),
    #[error(transparent)]
    Ident(#[from] IdentError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
}

/// A deterministic valuation of randomized experiments under test.
/// The callback contract for functionals under test.
pub type ValueFn = Arc<dyn Fn(&RandomizedExperiment) -> Result<f64, String> + Send + Sync>;

#[derive(Clone)]
pub struct ValuationFunctional {
    pub name: String,
    /// Comparisons are asserted up to this tolerance.
    pub tol: f64,
    f: ValueFn,
}

impl ValuationFunctional {
    pub fn new<F>(name: impl Into<String>, tol: f64, f: F) -> Self
    where
        F: Fn(&RandomizedExperiment) -> Result<f64, String> + Send + Sync + 'static,
    {
        ValuationFunctional { name: name.into(), tol, f: Arc::new(f) }
    }

    pub fn value(&self, pi: &RandomizedExperiment) -> Result<f64, AxiomError> {
        (self.f)(pi).map_err(AxiomError::Functional)
    }

    pub fn value_single(&self, e: &Experiment) -> Result<f64, AxiomError> {
        self.value(&RandomizedExperiment::degenerate(e.clone()))
    }
}

/// The expected-identification-value functional for a given index.
pub fn index_functional(
    name: impl Into<String>,
    index: IdentificationIndex,
    prior: PriorModel,
    cfg: EvalConfig,
    tol: f64,
) -> ValuationFunctional {
    ValuationFunctional::new(name, tol, move |pi| {
        eiv(pi, &index, &prior, &cfg)
            .map(|v| v.value)
            .map_err(|e| e.to_string())
    })
}

/// Entropy-based expected identification value.
pub fn entropy_functional(prior: PriorModel, cfg: EvalConfig, tol: f64) -> ValuationFunctional {
    index_functional("entropy-eiv", IdentificationIndex::Entropy, prior, cfg, tol)
}

/// A deliberately broken functional: entropy-based value with the first
/// listed cell of every atom priced at a bumped index. Cell listing order
/// is not a structural property, so this must fail structural invariance.
pub fn perturbed_entropy_functional(
    prior: PriorModel,
    cfg: EvalConfig,
    tol: f64,
    bump: f64,
) -> ValuationFunctional {
    ValuationFunctional::new("entropy-eiv-perturbed", tol, move |pi| {
        let mut total = 0.0;
        for (e, weight) in pi.atoms() {
            let fam = identified_family(e, &prior, &cfg).map_err(|e| e.to_string())?;
            let mut first_positive = true;
            let mut v_atom = 0.0;
            for k in fam.positive_cells(&cfg) {
                let (_, m) = &fam.cells[k];
                let mut t = -m.value.ln();
                if first_positive {
                    t += bump;
                    first_positive = false;
                }
                v_atom += t * m.value;
            }
            total += weight * v_atom;
        }
        Ok(total)
    })
}

/// One hypothesis-satisfying instance whose conclusion failed.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub trial: usize,
    pub detail: String,
    pub values: Vec<f64>,
    /// The experiments involved, serialized.
    pub experiments: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub axiom: String,
    pub functional: String,
    pub trials: usize,
    /// Trials whose generated instance satisfied the axiom's hypothesis.
    pub checked: usize,
    pub violations: Vec<Violation>,
    pub verdict: &'static str,
}

impl AxiomReport {
    fn build(
        axiom: &str,
        functional: &str,
        trials: usize,
        checked: usize,
        mut violations: Vec<Violation>,
    ) -> Self {
        violations.sort_by(|a, b| a.detail.cmp(&b.detail).then(a.trial.cmp(&b.trial)));
        AxiomReport {
            axiom: axiom.to_string(),
            functional: functional.to_string(),
            trials,
            checked,
            verdict: if violations.is_empty() { "pass" } else { "fail" },
            violations,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn ser<T: Serialize>(x: &T) -> String {
    serde_json::to_string(x).expect("witness serialization")
}

/// Finer partitions are never worth less.
pub fn check_monotonicity(
    v: &ValuationFunctional,
    trials: usize,
    seed: u64,
) -> Result<AxiomReport, AxiomError> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let mut checked = 0;
    for trial in 0..trials {
        let fine = gen::random_experiment(&mut rng, 3);
        let coarse = random_coarsening(&mut rng, &fine)?;
        let fine_v = v.value_single(&fine)?;
        let coarse_v = v.value_single(&coarse)?;
        checked += 1;
        if fine_v < coarse_v - v.tol {
            violations.push(Violation {
                trial,
                detail: "refinement lost value".into(),
                values: vec![fine_v, coarse_v],
                experiments: vec![ser(&fine), ser(&coarse)],
            });
        }
    }
    // equality branch: a partition is a coarsening of itself
    let e = gen::random_experiment(&mut rng, 3);
    let same = e.coarsen(&[])?;
    if (v.value_single(&e)? - v.value_single(&same)?).abs() > v.tol {
        violations.push(Violation {
            trial: trials,
            detail: "identity coarsening changed the value".into(),
            values: vec![],
            experiments: vec![ser(&e)],
        });
    }
    Ok(AxiomReport::build("monotonicity", &v.name, trials, checked, violations))
}

fn random_coarsening(rng: &mut StdRng, e: &Experiment) -> Result<Experiment, IdentError> {
    let n = e.n_cells();
    let count = rng.random_range(0..n);
    let merges: Vec<(usize, usize)> = (0..count)
        .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
        .collect();
    e.coarsen(&merges)
}

/// Experiments identifying the same family of sets are worth the same.
pub fn check_structural_invariance(
    v: &ValuationFunctional,
    trials: usize,
    seed: u64,
) -> Result<AxiomReport, AxiomError> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let mut checked = 0;
    for trial in 0..trials {
        let (e1, e2, what) = match trial % 3 {
            0 => {
                // battery order permutation
                let n1 = rng.random_range(2..4);
                let n2 = rng.random_range(2..4);
                let m1 = gen::random_menu(&mut rng, 3, n1);
                let m2 = gen::random_menu(&mut rng, 3, n2);
                let a = compile_batch(&[m1.clone(), m2.clone()])?.experiment;
                let b = compile_batch(&[m2, m1])?.experiment;
                (a, b, "battery permutation")
            }
            1 => {
                // same experiment, cells listed in a different order
                let e = gen::random_experiment(&mut rng, 3);
                let mut perm: Vec<usize> = (0..e.n_cells()).collect();
                for i in (1..perm.len()).rev() {
                    let j = rng.random_range(0..=i);
                    perm.swap(i, j);
                }
                let cells: Vec<Vec<usize>> =
                    perm.iter().map(|&k| e.partition()[k].clone()).collect();
                let shuffled = Experiment::new(e.menu().clone(), cells)?;
                (e, shuffled, "cell order shuffle")
            }
            _ => {
                // the canonical equal-information battery pair
                let (a, a2, b, b2) = equivalent_batteries();
                let e1 = compile_batch(&[a, a2])?.experiment;
                let e2 = compile_batch(&[b, b2])?.experiment;
                (e1, e2, "equal-information batteries")
            }
        };
        let v1 = v.value_single(&e1)?;
        let v2 = v.value_single(&e2)?;
        checked += 1;
        if (v1 - v2).abs() > v.tol {
            violations.push(Violation {
                trial,
                detail: format!("structurally equal pair valued apart ({what})"),
                values: vec![v1, v2],
                experiments: vec![ser(&e1), ser(&e2)],
            });
        }
    }
    Ok(AxiomReport::build("structural-invariance", &v.name, trials, checked, violations))
}

/// The equal-information pair of two-menu batteries over three outcomes.
pub fn equivalent_batteries() -> (Menu, Menu, Menu, Menu) {
    let third = 1.0 / 3.0;
    (
        Menu::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.5, 0.5, 0.0],
            vec![0.5, 0.0, 0.5],
            vec![0.0, 0.5, 0.5],
        ])
        .expect("battery menu"),
        Menu::from_rows(&[vec![0.0, 0.6, 0.4], vec![0.0, 0.4, 0.6]]).expect("battery menu"),
        Menu::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .expect("battery menu"),
        Menu::from_rows(&[
            vec![2.0 * third, third, 0.0],
            vec![2.0 * third, 0.0, third],
            vec![third, third, third],
        ])
        .expect("battery menu"),
    )
}

/// A partition of menu indices.
pub type Cells = Vec<Vec<usize>>;

/// The four partitions of the first battery menu used by the separability
/// example: discrete, the two-pair grouping, and the two mixed ones.
pub fn separability_partitions() -> (Cells, Cells, Cells, Cells) {
    (
        vec![vec![0], vec![1], vec![2], vec![3]],
        vec![vec![0, 1], vec![2, 3]],
        vec![vec![0, 1], vec![2], vec![3]],
        vec![vec![0], vec![1], vec![2, 3]],
    )
}

/// Splicing two partitions along a jointly measurable event leaves the
/// half/half randomization indifferent.
pub fn check_identification_separability(
    v: &ValuationFunctional,
    trials: usize,
    seed: u64,
) -> Result<AxiomReport, AxiomError> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let mut checked = 0;
    for trial in 0..trials {
        let (menu, p_cells, q_cells, b) = if trial == 0 {
            // the canonical instance from the worked example
            let (a, _, _, _) = equivalent_batteries();
            let (p, p2, _, _) = separability_partitions();
            (a, p, p2, vec![0, 1])
        } else {
            let n = rng.random_range(4..8);
            let menu = gen::random_menu(&mut rng, 3, n);
            let p = gen::random_partition(&mut rng, n, 2);
            let q = gen::random_partition(&mut rng, n, 2);
            let b = random_joint_event(&mut rng, &p, &q, n);
            (menu, p, q, b)
        };
        let p_exp = Experiment::new(menu.clone(), p_cells.clone())?;
        let q_exp = Experiment::new(menu.clone(), q_cells.clone())?;
        let spliced_pq = splice(&menu, &p_cells, &q_cells, &b)?;
        let spliced_qp = splice(&menu, &q_cells, &p_cells, &b)?;
        let lhs = v.value(&RandomizedExperiment::new(vec![
            (p_exp.clone(), 0.5),
            (q_exp.clone(), 0.5),
        ])?)?;
        let rhs = v.value(&RandomizedExperiment::new(vec![
            (spliced_pq.clone(), 0.5),
            (spliced_qp.clone(), 0.5),
        ])?)?;
        checked += 1;
        if (lhs - rhs).abs() > v.tol {
            violations.push(Violation {
                trial,
                detail: "spliced randomization valued apart".into(),
                values: vec![lhs, rhs],
                experiments: vec![ser(&p_exp), ser(&q_exp), ser(&spliced_pq), ser(&spliced_qp)],
            });
        }
    }
    Ok(AxiomReport::build(
        "identification-separability",
        &v.name,
        trials,
        checked,
        violations,
    ))
}

/// A random union of cells of the finest common coarsening of two
/// partitions: measurable with respect to both.
fn random_joint_event(
    rng: &mut StdRng,
    p: &[Vec<usize>],
    q: &[Vec<usize>],
    n: usize,
) -> Vec<usize> {
    // union-find over points: cells sharing a point merge
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for cells in [p, q] {
        for cell in cells {
            for w in cell.windows(2) {
                let a = find(&mut parent, w[0]);
                let b = find(&mut parent, w[1]);
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        blocks.entry(r).or_default().push(i);
    }
    let mut b = Vec::new();
    for block in blocks.values() {
        if rng.random_bool(0.5) {
            b.extend(block.iter().copied());
        }
    }
    b.sort_unstable();
    b
}

/// The partition agreeing with `p` on `b` and with `q` off `b`.
fn splice(
    menu: &Menu,
    p: &[Vec<usize>],
    q: &[Vec<usize>],
    b: &[usize],
) -> Result<Experiment, IdentError> {
    let inside = |i: usize| b.contains(&i);
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for cell in p {
        let kept: Vec<usize> = cell.iter().copied().filter(|&i| inside(i)).collect();
        if !kept.is_empty() {
            cells.push(kept);
        }
    }
    for cell in q {
        let kept: Vec<usize> = cell.iter().copied().filter(|&i| !inside(i)).collect();
        if !kept.is_empty() {
            cells.push(kept);
        }
    }
    Experiment::new(menu.clone(), cells)
}

/// Mixing both the menu and the partition with a common menu leaves the
/// value unchanged; ambiguous decompositions may be assigned to any parent.
pub fn check_translation_invariance(
    v: &ValuationFunctional,
    trials: usize,
    seed: u64,
) -> Result<AxiomReport, AxiomError> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let mut checked = 0;
    for trial in 0..trials {
        let e = gen::random_experiment(&mut rng, 3);
        let nb = rng.random_range(1..4);
        let b = gen::random_menu(&mut rng, 3, nb);
        let alpha = rng.random_range(0.2..0.8);
        let mixed = crate::geometry::mix_menus(alpha, e.menu(), &b)?;
        let keep = crate::geometry::extreme_indices(&mixed.menu)?;
        // cell of each kept point, from one of its recorded parents
        let cell_of_point = |parents: &Vec<Vec<usize>>, which: usize| -> usize {
            let a_idx = parents[which][0];
            e.partition()
                .iter()
                .position(|cell| cell.contains(&a_idx))
                .expect("parent index belongs to a cell")
        };
        let build = |pick_last: bool| -> Result<Experiment, IdentError> {
            let mut cells: Vec<Vec<usize>> = vec![Vec::new(); e.n_cells()];
            let mut points = Vec::new();
            for (new_idx, &k) in keep.iter().enumerate() {
                let parents = &mixed.parents[k];
                let which = if pick_last { parents.len() - 1 } else { 0 };
                cells[cell_of_point(parents, which)].push(new_idx);
                points.push(mixed.menu.point(k).clone());
            }
            let menu = Menu::new(points)?;
            let cells: Vec<Vec<usize>> = cells.into_iter().filter(|c| !c.is_empty()).collect();
            Experiment::new(menu, cells)
        };
        let translated = build(false)?;
        let lhs = v.value_single(&e)?;
        let rhs = v.value_single(&translated)?;
        checked += 1;
        if (lhs - rhs).abs() > v.tol {
            violations.push(Violation {
                trial,
                detail: "translated experiment valued apart".into(),
                values: vec![lhs, rhs],
                experiments: vec![ser(&e), ser(&translated)],
            });
        }
        // ambiguous decompositions: the parent choice must not matter
        if keep.iter().any(|&k| mixed.parents[k].len() > 1) {
            let alt = build(true)?;
            let alt_v = v.value_single(&alt)?;
            if (alt_v - rhs).abs() > v.tol {
                violations.push(Violation {
                    trial,
                    detail: "ambiguous parent assignment changed the value".into(),
                    values: vec![rhs, alt_v],
                    experiments: vec![ser(&translated), ser(&alt)],
                });
            }
        }
    }
    Ok(AxiomReport::build("translation-invariance", &v.name, trials, checked, violations))
}

/// Merging a null cell into any sibling leaves the value unchanged.
pub fn check_belief_consistency(
    v: &ValuationFunctional,
    trials: usize,
    seed: u64,
) -> Result<AxiomReport, AxiomError> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let mut checked = 0;
    for trial in 0..trials {
        // a menu plus an interior point of its hull: the interior point's
        // cell identifies nothing
        let n = rng.random_range(3..6);
        let base = gen::random_menu(&mut rng, 3, n);
        let mut coords = vec![0.0; 3];
        for p in base.points() {
            for (d, c) in coords.iter_mut().enumerate() {
                *c += p.coords()[d] / n as f64;
            }
        }
        let centroid = Lottery::new(coords).expect("centroid stays inside");
        if base.position_of(&centroid).is_some() {
            continue;
        }
        let mut points = base.points().to_vec();
        points.push(centroid);
        let menu = Menu::new(points).expect("centroid is distinct");
        let null_cell = vec![n];
        let mut partition = vec![null_cell];
        partition.extend(gen::random_partition(&mut rng, n, 1));
        let e = Experiment::new(menu, partition)?;
        let sibling = rng.random_range(1..e.n_cells());
        let merged = e.coarsen(&[(0, sibling)])?;
        let lhs = v.value_single(&e)?;
        let rhs = v.value_single(&merged)?;
        checked += 1;
        if (lhs - rhs).abs() > v.tol {
            violations.push(Violation {
                trial,
                detail: "null-cell merge changed the value".into(),
                values: vec![lhs, rhs],
                experiments: vec![ser(&e), ser(&merged)],
            });
        }
    }
    Ok(AxiomReport::build("belief-consistency", &v.name, trials, checked, violations))
}

/// More evenly distributed observation probabilities are weakly preferred.
///
/// Hypothesis: some ordering of the comparison experiment's cells puts each
/// cell's mass farther from `1/n` than the reference cell's, deviating on
/// the same side. Instances are drawn by scaling a random mass vector away
/// from uniform (the hypothesis then holds by construction) and shuffling
/// the comparison's cells to exercise the matching.
pub fn check_symmetry(
    v: &ValuationFunctional,
    trials: usize,
    seed: u64,
) -> Result<AxiomReport, AxiomError> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let mut checked = 0;
    for trial in 0..trials {
        let n = rng.random_range(2..6);
        // reference masses, bounded away from 0 and 1/2
        let mut p: Vec<f64> = (0..n).map(|_| rng.random_range(0.3..1.0)).collect();
        let s: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= s);
        if p.iter().any(|&x| x >= 0.45) {
            continue;
        }
        let u = 1.0 / n as f64;
        // push mass away from uniform as far as the wheel allows
        let mut c_max: f64 = 3.0;
        for &pi in &p {
            if pi > u {
                c_max = c_max.min((0.45 - u) / (pi - u));
            } else if pi < u {
                c_max = c_max.min((u - 0.02) / (u - pi));
            }
        }
        if c_max <= 1.05 {
            continue;
        }
        let c = rng.random_range(1.05..c_max.min(3.0));
        let q: Vec<f64> = p.iter().map(|&pi| u + c * (pi - u)).collect();
        let rot_a = rng.random_range(0.0..std::f64::consts::TAU);
        let rot_b = rng.random_range(0.0..std::f64::consts::TAU);
        let (Some(menu_a), Some(menu_b)) =
            (gen::wheel_menu(&p, rot_a), gen::wheel_menu(&q, rot_b))
        else {
            continue;
        };
        let a = Experiment::discrete(menu_a);
        // shuffle the comparison experiment's cells to exercise matching
        let mut cells: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        for i in (1..cells.len()).rev() {
            let j = rng.random_range(0..=i);
            cells.swap(i, j);
        }
        let b = Experiment::new(menu_b, cells)?;
        // verify the dominance hypothesis over cell permutations
        let qb: Vec<f64> = b.partition().iter().map(|cell| q[cell[0]]).collect();
        if !sign_matched_dominance(&p, &qb) {
            continue;
        }
        let va = v.value_single(&a)?;
        let vb = v.value_single(&b)?;
        checked += 1;
        if va < vb - v.tol {
            violations.push(Violation {
                trial,
                detail: "more even distribution valued below a spread one".into(),
                values: vec![va, vb],
                experiments: vec![ser(&a), ser(&b)],
            });
        }
    }
    Ok(AxiomReport::build("symmetry", &v.name, trials, checked, violations))
}

/// Does some permutation line `q` up against `p` with per-cell dominance
/// away from uniform on matching sides?
fn sign_matched_dominance(p: &[f64], q: &[f64]) -> bool {
    let n = p.len();
    if q.len() != n || n > 6 {
        return false;
    }
    let u = 1.0 / n as f64;
    // bitmask DP over assignments of q-cells to p-cells
    let mut reachable = vec![false; 1 << n];
    reachable[0] = true;
    for (i, &pi) in p.iter().enumerate() {
        let mut next = vec![false; 1 << n];
        for (mask, &ok) in reachable.iter().enumerate() {
            if !ok || (mask.count_ones() as usize) != i {
                continue;
            }
            for (j, &qj) in q.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    continue;
                }
                let dp = pi - u;
                let dq = qj - u;
                if dq.abs() >= dp.abs() - 1e-12 && dp * dq >= -1e-15 {
                    next[mask | (1 << j)] = true;
                }
            }
        }
        reachable = next;
    }
    reachable[(1 << n) - 1]
}

/// Splitting one cell is worth exactly the conditional experiment, mixed at
/// the odds of reaching that cell.
pub fn check_entropic_additivity(
    v: &ValuationFunctional,
    trials: usize,
    seed: u64,
) -> Result<AxiomReport, AxiomError> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let mut checked = 0;
    for trial in 0..trials {
        let n = rng.random_range(2..4);
        let k = rng.random_range(2..4);
        let mut outer: Vec<f64> = (0..n).map(|_| rng.random_range(0.4..1.0)).collect();
        let s: f64 = outer.iter().sum();
        outer.iter_mut().for_each(|x| *x /= s);
        let mut sub: Vec<f64> = (0..k).map(|_| rng.random_range(0.4..1.0)).collect();
        let s: f64 = sub.iter().sum();
        sub.iter_mut().for_each(|x| *x /= s);
        // refined fractions: the first outer cell split by the conditionals
        let mut fine: Vec<f64> = sub.iter().map(|&qi| outer[0] * qi).collect();
        fine.extend(outer.iter().skip(1).copied());
        if fine.iter().chain(sub.iter()).any(|&f| f >= 0.45) {
            continue;
        }
        let rot = rng.random_range(0.0..std::f64::consts::TAU);
        let (Some(menu_a), Some(menu_b)) =
            (gen::wheel_menu(&fine, rot), gen::wheel_menu(&sub, rot * 0.7))
        else {
            continue;
        };
        // partitions of the refined wheel: split and unsplit first cell
        let refined = Experiment::discrete(menu_a.clone());
        let mut coarse_cells: Vec<Vec<usize>> = vec![(0..k).collect()];
        coarse_cells.extend((k..k + n - 1).map(|i| vec![i]));
        let coarse = Experiment::new(menu_a.clone(), coarse_cells)?;
        let trivial = Experiment::trivial(menu_a);
        let cond = Experiment::discrete(menu_b);
        let alpha = 1.0 / (1.0 + outer[0]);
        let lhs = v.value(&RandomizedExperiment::new(vec![
            (refined.clone(), alpha),
            (trivial.clone(), 1.0 - alpha),
        ])?)?;
        let rhs = v.value(&RandomizedExperiment::new(vec![
            (coarse.clone(), alpha),
            (cond.clone(), 1.0 - alpha),
        ])?)?;
        checked += 1;
        if (lhs - rhs).abs() > v.tol {
            violations.push(Violation {
                trial,
                detail: "cell split mispriced against the conditional experiment".into(),
                values: vec![lhs, rhs],
                experiments: vec![ser(&refined), ser(&coarse), ser(&cond)],
            });
        }
    }
    Ok(AxiomReport::build("entropic-additivity", &v.name, trials, checked, violations))
}

/// All seven checks in canonical order.
pub const CHECK_NAMES: [&str; 7] = [
    "monotonicity",
    "structural-invariance",
    "identification-separability",
    "translation-invariance",
    "belief-consistency",
    "symmetry",
    "entropic-additivity",
];

/// Run one check by name.
pub fn run_check(
    name: &str,
    v: &ValuationFunctional,
    trials: usize,
    seed: u64,
) -> Result<AxiomReport, AxiomError> {
    match name {
        "monotonicity" => check_monotonicity(v, trials, seed),
        "structural-invariance" => check_structural_invariance(v, trials, seed),
        "identification-separability" => check_identification_separability(v, trials, seed),
        "translation-invariance" => check_translation_invariance(v, trials, seed),
        "belief-consistency" => check_belief_consistency(v, trials, seed),
        "symmetry" => check_symmetry(v, trials, seed),
        "entropic-additivity" => check_entropic_additivity(v, trials, seed),
        other => Err(AxiomError::UnknownCheck(other.to_string())),
    }
}

/// Build a random target partition from the fans of a random pair of
/// generator menus; used by the richness round-trip checks.
pub fn random_fan_target(
    rng: &mut StdRng,
    max_vertices: usize,
    max_cells: usize,
) -> Result<TargetPartition, CompileError> {
    let n1 = rng.random_range(2..=max_vertices);
    let n2 = rng.random_range(2..=max_vertices);
    let g1 = gen::random_menu(rng, 3, n1);
    let g2 = gen::random_menu(rng, 3, n2);
    let generators = vec![g1, g2];
    let average = crate::compiler::average_menu(&generators)?;
    let faces = enumerate_faces(&average)?;
    let proper: Vec<usize> = (0..faces.len())
        .filter(|&i| faces[i].witness.is_some())
        .collect();
    let k = rng.random_range(2..=max_cells.min(proper.len()));
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (pos, &f) in proper.iter().enumerate() {
        if pos < k {
            groups[pos].push(f);
        } else {
            let g = rng.random_range(0..k);
            groups[g].push(f);
        }
    }
    TargetPartition::from_face_groups(generators, groups)
}

/// Realize a target and report whether the result's identified family
/// matches the target cells up to null sets.
pub fn realize_and_compare(
    target: &TargetPartition,
    prior: &PriorModel,
    cfg: &EvalConfig,
) -> Result<bool, AxiomError> {
    let out = realize_partition(target)?;
    let fam = identified_family(&out.experiment, prior, cfg)?;
    let (measures, _) = prior
        .measure_cells(target.cells(), cfg)
        .map_err(IdentError::from)?;
    let t_fam = crate::identification::IdentifiedFamily {
        cells: target.cells().to_vec().into_iter().zip(measures).collect(),
        ties: 0,
    };
    Ok(crate::identification::mu_equivalent(&fam, &t_fam, prior, cfg)?.is_equivalent())
}
