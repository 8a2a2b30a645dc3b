//! Compile multi-menu batteries, adaptive decision trees, and partially
//! observed dynamic games into static (randomized) experiments, and realize
//! target partitions of utility space as concrete experiments.
//!
//! All three compilers rest on the same linearity fact: a subject choosing
//! from several menus (simultaneously or along a tree) behaves exactly like
//! a subject making a single choice from a weighted Minkowski combination,
//! because a linear utility maximizes each component independently. What
//! the analyst cannot observe is handled by the partition: compiled points
//! that differ only in unobserved components share a cell.

use crate::geometry::{
    enumerate_faces, extreme_indices, minkowski_mix, ConeUnion, GeometryError, Lottery, Menu,
    Mixture,
};
use crate::identification::{Experiment, IdentError, RandomizedExperiment};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Compilation refuses to enumerate beyond desk scale.
const MAX_ADAPTIVE_DEPTH: usize = 4;
const MAX_ADAPTIVE_STRATEGIES: usize = 4096;
const MAX_GAME_STRATEGIES: usize = 10_000;
const MAX_SUM_EXTREMES: usize = 8;

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("adaptive tree must have one child per alternative or none, node has {got} children for {menu} alternatives")]
    BadArity { got: usize, menu: usize },
    #[error("adaptive tree depth {0} exceeds the supported {MAX_ADAPTIVE_DEPTH}")]
    DepthExceeded(usize),
    #[error("all leaves must sit at the same depth")]
    UnevenDepth,
    #[error("{0} strategies exceed the enumeration cap")]
    SizeOverflow(usize),
    #[error("distinct observations collide on the same compiled point: {0}")]
    Collision(String),
    #[error("game needs at most one chance node, found {0}")]
    TooManyChanceNodes(usize),
    #[error("chance probabilities must be non-negative and sum to one (sum {0})")]
    BadChance(f64),
    #[error("game has no subject decisions")]
    NoSubjectNodes,
    #[error("summed generator polytope has {0} extreme points, beyond the supported {MAX_SUM_EXTREMES}")]
    TooManyExtremes(usize),
    #[error("face {face:?} has its interior direction in no target cell")]
    TargetCellUnmatched { face: Vec<usize> },
    #[error("face {face:?} has its interior direction in target cells {a} and {b}")]
    AmbiguousFace { face: Vec<usize>, a: usize, b: usize },
    #[error("face groups must partition the face list: {0}")]
    BadFaceGroups(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Ident(#[from] IdentError),
}

/// A compiled battery: the equal-weight mixture of all menus observed
/// perfectly, with the provenance of each compiled point.
#[derive(Debug, Clone)]
pub struct BatchCompilation {
    pub experiment: Experiment,
    /// `provenance[k]` lists the per-menu index tuples landing on compiled
    /// point `k` (more than one tuple for ambiguous decompositions).
    pub provenance: Vec<Vec<Vec<usize>>>,
}

/// Observing one choice from each of several menus is informationally the
/// same as observing a single choice from their equal-weight Minkowski
/// mixture; the compiled experiment observes that mixture perfectly.
pub fn compile_batch(menus: &[Menu]) -> Result<BatchCompilation, CompileError> {
    if menus.is_empty() {
        return Err(CompileError::Geometry(GeometryError::EmptyMenu));
    }
    let refs: Vec<&Menu> = menus.iter().collect();
    let weights = vec![1.0 / menus.len() as f64; menus.len()];
    let Mixture { menu, parents } = minkowski_mix(&weights, &refs)?;
    Ok(BatchCompilation {
        experiment: Experiment::discrete(menu),
        provenance: parents,
    })
}

/// An adaptive elicitation tree: a root menu and, per alternative, the
/// subtree offered after it is chosen. A node with no children ends the
/// procedure; all leaves must sit at the same depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveTree {
    pub menu: Menu,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<AdaptiveTree>,
}

impl AdaptiveTree {
    pub fn leaf(menu: Menu) -> Self {
        AdaptiveTree { menu, children: Vec::new() }
    }

    pub fn node(menu: Menu, children: Vec<AdaptiveTree>) -> Self {
        AdaptiveTree { menu, children }
    }

    fn depth(&self) -> Result<usize, CompileError> {
        if !self.children.is_empty() && self.children.len() != self.menu.len() {
            return Err(CompileError::BadArity {
                got: self.children.len(),
                menu: self.menu.len(),
            });
        }
        if self.children.is_empty() {
            return Ok(1);
        }
        let depths = self
            .children
            .iter()
            .map(|c| c.depth())
            .collect::<Result<Vec<_>, _>>()?;
        if depths.windows(2).any(|w| w[0] != w[1]) {
            return Err(CompileError::UnevenDepth);
        }
        Ok(1 + depths[0])
    }
}

/// One node-menu of the flattened tree.
struct FlatNode<'t> {
    menu: &'t Menu,
    stage: usize,
    /// index of the child node reached by each alternative, when any
    children: Vec<Option<usize>>,
}

fn flatten<'t>(tree: &'t AdaptiveTree, stage: usize, out: &mut Vec<FlatNode<'t>>) -> usize {
    let id = out.len();
    out.push(FlatNode { menu: &tree.menu, stage, children: vec![None; tree.menu.len()] });
    if !tree.children.is_empty() {
        for (a, child) in tree.children.iter().enumerate() {
            let cid = flatten(child, stage + 1, out);
            out[id].children[a] = Some(cid);
        }
    }
    id
}

/// Compile an adaptive tree into a single static experiment.
///
/// The subject holds a full contingent plan: one choice at every node of
/// the tree, visited or not. Each plan is embedded as the lottery mixing
/// all of its choices, with each stage carrying total weight `1/T` split
/// evenly over that stage's nodes; a linear subject then ranks plans
/// node-by-node, so the compiled menu's choice reveals exactly the plan's
/// stage-wise maximizers. The analyst only sees the visited nodes, so plans
/// differing off the realized path share a partition cell.
pub fn compile_adaptive(tree: &AdaptiveTree) -> Result<Experiment, CompileError> {
    let depth = tree.depth()?;
    if depth > MAX_ADAPTIVE_DEPTH {
        return Err(CompileError::DepthExceeded(depth));
    }
    let mut nodes = Vec::new();
    flatten(tree, 0, &mut nodes);
    let mut per_stage = vec![0usize; depth];
    for n in &nodes {
        per_stage[n.stage] += 1;
    }
    let weight_of = |n: &FlatNode| 1.0 / (depth as f64 * per_stage[n.stage] as f64);

    let n_strategies: usize = nodes
        .iter()
        .try_fold(1usize, |acc, n| acc.checked_mul(n.menu.len()))
        .ok_or(CompileError::SizeOverflow(usize::MAX))?;
    if n_strategies > MAX_ADAPTIVE_STRATEGIES {
        return Err(CompileError::SizeOverflow(n_strategies));
    }

    let dim = tree.menu.dim();
    // enumerate full plans
    let mut points: Vec<Lottery> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let mut observations: Vec<Vec<(usize, usize)>> = Vec::new(); // per point
    let mut choice = vec![0usize; nodes.len()];
    'plans: loop {
        let mut coords = vec![0.0; dim];
        for (nid, n) in nodes.iter().enumerate() {
            let w = weight_of(n);
            for (d, c) in coords.iter_mut().enumerate() {
                *c += w * n.menu.point(choice[nid]).coords()[d];
            }
        }
        let point = Lottery::new(coords).expect("plan mixture stays in the simplex");
        // the on-path observation of this plan
        let mut obs = Vec::new();
        let mut at = Some(0usize);
        while let Some(nid) = at {
            obs.push((nid, choice[nid]));
            at = nodes[nid].children[choice[nid]];
        }
        let label: String = obs
            .iter()
            .map(|&(nid, a)| nodes[nid].menu.label(a))
            .collect::<Vec<_>>()
            .join(">");
        match points
            .iter()
            .position(|q| q.distance(&point) < crate::geometry::EPS_GEOM)
        {
            Some(k) => {
                if observations[k] != obs {
                    return Err(CompileError::Collision(format!(
                        "plans {} and {} share the point {:?}",
                        labels[k],
                        label,
                        point.coords()
                    )));
                }
            }
            None => {
                points.push(point);
                labels.push(label);
                observations.push(obs);
            }
        }
        // next plan
        for nid in 0..nodes.len() {
            choice[nid] += 1;
            if choice[nid] < nodes[nid].menu.len() {
                continue 'plans;
            }
            choice[nid] = 0;
        }
        break;
    }

    // group compiled points by their observation
    let mut cells: Vec<Vec<usize>> = Vec::new();
    let mut cell_obs: Vec<Vec<(usize, usize)>> = Vec::new();
    for (k, obs) in observations.iter().enumerate() {
        match cell_obs.iter().position(|o| o == obs) {
            Some(c) => cells[c].push(k),
            None => {
                cell_obs.push(obs.clone());
                cells.push(vec![k]);
            }
        }
    }
    let menu = Menu::with_labels(points, labels)?;
    Ok(Experiment::new(menu, cells)?)
}

/// A node of a two-player dynamic game between the subject and a chance
/// device; the analyst observes on-path subject actions only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum GameNode {
    Subject {
        name: String,
        actions: Vec<GameAction>,
    },
    Chance {
        branches: Vec<GameBranch>,
    },
    Leaf {
        outcome: Lottery,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameAction {
    pub name: String,
    pub child: GameNode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameBranch {
    pub prob: f64,
    pub child: GameNode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicGame {
    pub root: GameNode,
}

/// A compiled game: a randomized experiment with one atom per chance
/// realization, plus each atom's cells spelled out as pure-strategy labels.
#[derive(Debug, Clone)]
pub struct GameCompilation {
    pub randomized: RandomizedExperiment,
    /// `strategy_cells[atom][cell]` lists the labels of the pure strategies
    /// the analyst cannot tell apart in that cell, sorted.
    pub strategy_cells: Vec<Vec<Vec<String>>>,
}

struct SubjectNode<'g> {
    name: &'g str,
    actions: &'g [GameAction],
}

fn collect_game<'g>(
    node: &'g GameNode,
    subjects: &mut Vec<SubjectNode<'g>>,
    chances: &mut Vec<&'g [GameBranch]>,
) {
    match node {
        GameNode::Subject { name, actions } => {
            subjects.push(SubjectNode { name, actions });
            for a in actions {
                collect_game(&a.child, subjects, chances);
            }
        }
        GameNode::Chance { branches } => {
            chances.push(branches);
            for b in branches {
                collect_game(&b.child, subjects, chances);
            }
        }
        GameNode::Leaf { .. } => {}
    }
}

/// Compile a dynamic game with at most one chance node into a randomized
/// experiment: the menu is the set of induced outcome lotteries of the
/// subject's pure strategies, and each chance realization contributes one
/// atom whose partition groups strategies indistinguishable on path.
pub fn compile_game(game: &DynamicGame) -> Result<GameCompilation, CompileError> {
    let mut subjects = Vec::new();
    let mut chances = Vec::new();
    collect_game(&game.root, &mut subjects, &mut chances);
    if chances.len() > 1 {
        return Err(CompileError::TooManyChanceNodes(chances.len()));
    }
    if subjects.is_empty() {
        return Err(CompileError::NoSubjectNodes);
    }
    if let Some(branches) = chances.first() {
        let sum: f64 = branches.iter().map(|b| b.prob).sum();
        if branches.iter().any(|b| b.prob < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(CompileError::BadChance(sum));
        }
    }
    let n_strategies: usize = subjects
        .iter()
        .try_fold(1usize, |acc, s| acc.checked_mul(s.actions.len()))
        .ok_or(CompileError::SizeOverflow(usize::MAX))?;
    if n_strategies > MAX_GAME_STRATEGIES {
        return Err(CompileError::SizeOverflow(n_strategies));
    }

    // realizations: resolve the chance node to one branch (or none)
    let realizations: Vec<(Option<usize>, f64)> = match chances.first() {
        None => vec![(None, 1.0)],
        Some(branches) => branches
            .iter()
            .enumerate()
            .filter(|(_, b)| b.prob > 0.0)
            .map(|(z, b)| (Some(z), b.prob))
            .collect(),
    };

    // enumerate pure strategies
    let mut strategies: Vec<Vec<usize>> = vec![Vec::new()];
    for s in &subjects {
        let mut next = Vec::with_capacity(strategies.len() * s.actions.len());
        for base in &strategies {
            for a in 0..s.actions.len() {
                let mut plan = base.clone();
                plan.push(a);
                next.push(plan);
            }
        }
        strategies = next;
    }

    let label_of = |plan: &[usize]| -> String {
        let parts: Vec<String> = subjects
            .iter()
            .zip(plan)
            .map(|(s, &a)| s.actions[a].name.clone())
            .collect();
        format!("({})", parts.join(","))
    };

    // induced outcome lottery of a plan (chance averaged in)
    fn induced(
        node: &GameNode,
        subjects: &[SubjectNode],
        plan: &[usize],
        dim: &mut Option<usize>,
    ) -> Result<Vec<f64>, CompileError> {
        match node {
            GameNode::Leaf { outcome } => {
                if let Some(d) = dim {
                    if outcome.dim() != *d {
                        return Err(CompileError::Geometry(GeometryError::DimensionMismatch(
                            *d,
                            outcome.dim(),
                        )));
                    }
                } else {
                    *dim = Some(outcome.dim());
                }
                Ok(outcome.coords().to_vec())
            }
            GameNode::Subject { name, actions } => {
                let idx = subjects
                    .iter()
                    .position(|s| s.name == *name)
                    .expect("collected node");
                induced(&actions[plan[idx]].child, subjects, plan, dim)
            }
            GameNode::Chance { branches } => {
                let mut acc: Option<Vec<f64>> = None;
                for b in branches {
                    let sub = induced(&b.child, subjects, plan, dim)?;
                    match &mut acc {
                        None => acc = Some(sub.iter().map(|v| v * b.prob).collect()),
                        Some(a) => {
                            for (x, v) in a.iter_mut().zip(&sub) {
                                *x += b.prob * v;
                            }
                        }
                    }
                }
                Ok(acc.expect("chance node has branches"))
            }
        }
    }

    // on-path observation of a plan under one chance realization
    fn observe(
        node: &GameNode,
        subjects: &[SubjectNode],
        plan: &[usize],
        realization: Option<usize>,
        out: &mut Vec<(String, usize)>,
    ) {
        match node {
            GameNode::Leaf { .. } => {}
            GameNode::Subject { name, actions } => {
                let idx = subjects
                    .iter()
                    .position(|s| s.name == *name)
                    .expect("collected node");
                out.push((name.clone(), plan[idx]));
                observe(&actions[plan[idx]].child, subjects, plan, realization, out);
            }
            GameNode::Chance { branches } => {
                let z = realization.expect("chance realization fixed");
                observe(&branches[z].child, subjects, plan, realization, out);
            }
        }
    }

    // build the reduced menu: one point per induced lottery
    let mut dim = None;
    let mut points: Vec<Lottery> = Vec::new();
    let mut point_labels: Vec<Vec<String>> = Vec::new(); // strategy labels per point
    let mut point_obs: Vec<Vec<Vec<(String, usize)>>> = Vec::new(); // per point, per realization
    for plan in &strategies {
        let coords = induced(&game.root, &subjects, plan, &mut dim)?;
        let point = Lottery::new(coords).map_err(CompileError::Geometry)?;
        let obs: Vec<Vec<(String, usize)>> = realizations
            .iter()
            .map(|&(z, _)| {
                let mut o = Vec::new();
                observe(&game.root, &subjects, plan, z, &mut o);
                o
            })
            .collect();
        let label = label_of(plan);
        match points
            .iter()
            .position(|q| q.distance(&point) < crate::geometry::EPS_GEOM)
        {
            Some(k) => {
                if point_obs[k] != obs {
                    return Err(CompileError::Collision(format!(
                        "strategies {} and {} induce the same lottery but different observations",
                        point_labels[k][0], label
                    )));
                }
                point_labels[k].push(label);
            }
            None => {
                points.push(point);
                point_labels.push(vec![label]);
                point_obs.push(obs);
            }
        }
    }
    let labels: Vec<String> = point_labels.iter().map(|ls| ls.join("|")).collect();
    let menu = Menu::with_labels(points, labels)?;

    // one atom per realization, cells grouped by that realization's view
    let mut atoms = Vec::new();
    let mut strategy_cells = Vec::new();
    for (r_idx, &(_, prob)) in realizations.iter().enumerate() {
        let mut cells: Vec<Vec<usize>> = Vec::new();
        let mut seen: Vec<&Vec<(String, usize)>> = Vec::new();
        for (k, obs) in point_obs.iter().enumerate() {
            let view = &obs[r_idx];
            match seen.iter().position(|v| *v == view) {
                Some(c) => cells[c].push(k),
                None => {
                    seen.push(view);
                    cells.push(vec![k]);
                }
            }
        }
        let mut cell_labels: Vec<Vec<String>> = cells
            .iter()
            .map(|cell| {
                let mut ls: Vec<String> = cell
                    .iter()
                    .flat_map(|&k| point_labels[k].iter().cloned())
                    .collect();
                ls.sort();
                ls
            })
            .collect();
        // canonical order: cells sorted by their first strategy label
        let mut order: Vec<usize> = (0..cells.len()).collect();
        order.sort_by(|&a, &b| cell_labels[a][0].cmp(&cell_labels[b][0]));
        let cells: Vec<Vec<usize>> = order.iter().map(|&i| cells[i].clone()).collect();
        cell_labels = order.iter().map(|&i| cell_labels[i].clone()).collect();
        atoms.push((Experiment::new(menu.clone(), cells)?, prob));
        strategy_cells.push(cell_labels);
    }
    Ok(GameCompilation {
        randomized: RandomizedExperiment::new(atoms)?,
        strategy_cells,
    })
}

/// A target partition of utility space: cells are unions of relative
/// interiors of normal-fan cones of the generator menus' average polytope.
#[derive(Debug, Clone)]
pub struct TargetPartition {
    generators: Vec<Menu>,
    /// face groups: `groups[i]` lists indices into the averaged polytope's
    /// face enumeration that make up cell `i`
    groups: Vec<Vec<usize>>,
    cells: Vec<ConeUnion>,
}

impl TargetPartition {
    /// Group the faces of the generators' average polytope into cells. The
    /// groups must partition all proper faces (the top face carries no
    /// direction and is assigned arbitrarily during realization).
    pub fn from_face_groups(
        generators: Vec<Menu>,
        groups: Vec<Vec<usize>>,
    ) -> Result<Self, CompileError> {
        let average = average_menu(&generators)?;
        let ext = extreme_indices(&average)?;
        if ext.len() > MAX_SUM_EXTREMES {
            return Err(CompileError::TooManyExtremes(ext.len()));
        }
        let faces = enumerate_faces(&average)?;
        let proper: Vec<usize> = (0..faces.len())
            .filter(|&i| faces[i].witness.is_some())
            .collect();
        let mut seen = vec![false; faces.len()];
        for g in &groups {
            for &f in g {
                if f >= faces.len() || faces[f].witness.is_none() {
                    return Err(CompileError::BadFaceGroups(format!(
                        "face index {f} is not a proper face"
                    )));
                }
                if seen[f] {
                    return Err(CompileError::BadFaceGroups(format!("face {f} grouped twice")));
                }
                seen[f] = true;
            }
        }
        if proper.iter().any(|&f| !seen[f]) {
            return Err(CompileError::BadFaceGroups(
                "every proper face must be grouped".into(),
            ));
        }
        if groups.iter().any(|g| g.is_empty()) {
            return Err(CompileError::BadFaceGroups("empty group".into()));
        }
        let dim = average.dim();
        let cells = groups
            .iter()
            .map(|g| {
                ConeUnion::new(
                    dim,
                    g.iter().map(|&f| faces[f].ri_cone.clone()).collect(),
                )
            })
            .collect();
        Ok(TargetPartition { generators, groups, cells })
    }

    pub fn cells(&self) -> &[ConeUnion] {
        &self.cells
    }

    pub fn generators(&self) -> &[Menu] {
        &self.generators
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }
}

/// Equal-weight Minkowski average of the generator menus.
pub fn average_menu(generators: &[Menu]) -> Result<Menu, CompileError> {
    if generators.is_empty() {
        return Err(CompileError::Geometry(GeometryError::EmptyMenu));
    }
    let refs: Vec<&Menu> = generators.iter().collect();
    let weights = vec![1.0 / generators.len() as f64; generators.len()];
    let mixed = minkowski_mix(&weights, &refs)?;
    Ok(mixed.menu)
}

/// The realized experiment together with the face-to-cell assignment.
#[derive(Debug, Clone)]
pub struct Realization {
    pub experiment: Experiment,
    /// target cell index of each compiled menu point
    pub assignment: Vec<usize>,
}

/// Realize a target partition as a concrete experiment.
///
/// The average of the generators refines every generator's fan, so each of
/// its faces has a normal cone sitting inside exactly one target cell. The
/// compiled menu holds one relative-interior point (the barycenter of the
/// face's extreme points) per face, and the partition groups barycenters by
/// the target cell that swallows their face's cone.
pub fn realize_partition(target: &TargetPartition) -> Result<Realization, CompileError> {
    let average = average_menu(&target.generators)?;
    let ext = extreme_indices(&average)?;
    if ext.len() > MAX_SUM_EXTREMES {
        return Err(CompileError::TooManyExtremes(ext.len()));
    }
    let faces = enumerate_faces(&average)?;
    let mut points = Vec::new();
    let mut assignment = Vec::new();
    for face in &faces {
        let cell = match &face.witness {
            None => 0, // the top face identifies nothing; park it anywhere
            Some(u) => {
                let mut hit: Option<usize> = None;
                for (i, cell) in target.cells.iter().enumerate() {
                    if cell.contains_ri(u, 1e-9) {
                        if let Some(a) = hit {
                            return Err(CompileError::AmbiguousFace {
                                face: face.extremes.clone(),
                                a,
                                b: i,
                            });
                        }
                        hit = Some(i);
                    }
                }
                hit.ok_or_else(|| CompileError::TargetCellUnmatched {
                    face: face.extremes.clone(),
                })?
            }
        };
        points.push(face.barycenter.clone());
        assignment.push(cell);
    }
    let menu = Menu::new(points)?;
    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); target.cells.len()];
    for (k, &c) in assignment.iter().enumerate() {
        cells[c].push(k);
    }
    // a positive-mass cell always receives faces; drop any empty ones
    let keep: Vec<Vec<usize>> = cells.into_iter().filter(|c| !c.is_empty()).collect();
    Ok(Realization {
        experiment: Experiment::new(menu, keep)?,
        assignment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::EvalConfig;
    use crate::gen;
    use crate::geometry::{argmax_set, cone_equal, normal_cone_at, UtilityDirection};
    use crate::identification::{identified_family, mu_equivalent, IdentifiedFamily};
    use crate::prior::PriorModel;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    fn simplex3() -> Menu {
        Menu::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap()
    }

    #[test]
    fn batch_of_one_menu_is_discrete() {
        let out = compile_batch(&[simplex3()]).unwrap();
        assert_eq!(out.experiment.menu().len(), 3);
        assert_eq!(out.experiment.n_cells(), 3);
    }

    #[test]
    fn batch_of_the_example_batteries() {
        let a = Menu::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.5, 0.5, 0.0],
            vec![0.5, 0.0, 0.5],
            vec![0.0, 0.5, 0.5],
        ])
        .unwrap();
        let a2 = Menu::from_rows(&[vec![0.0, 0.6, 0.4], vec![0.0, 0.4, 0.6]]).unwrap();
        let out = compile_batch(&[a, a2]).unwrap();
        assert_eq!(out.experiment.menu().len(), 8);
        for p in &out.provenance {
            assert_eq!(p.len(), 1);
        }
    }

    #[test]
    fn batch_batteries_with_equal_information_are_equivalent() {
        let prior = PriorModel::uniform(3, 1);
        let c = cfg();
        let a = Menu::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.5, 0.5, 0.0],
            vec![0.5, 0.0, 0.5],
            vec![0.0, 0.5, 0.5],
        ])
        .unwrap();
        let a2 = Menu::from_rows(&[vec![0.0, 0.6, 0.4], vec![0.0, 0.4, 0.6]]).unwrap();
        let third = 1.0 / 3.0;
        let b2 = Menu::from_rows(&[
            vec![2.0 * third, third, 0.0],
            vec![2.0 * third, 0.0, third],
            vec![third, third, third],
        ])
        .unwrap();
        let fam_a = identified_family(
            &compile_batch(&[a, a2]).unwrap().experiment,
            &prior,
            &c,
        )
        .unwrap();
        let fam_b = identified_family(
            &compile_batch(&[simplex3(), b2]).unwrap().experiment,
            &prior,
            &c,
        )
        .unwrap();
        assert!(mu_equivalent(&fam_a, &fam_b, &prior, &c).unwrap().is_equivalent());
    }

    #[test]
    fn batch_is_order_invariant() {
        let prior = PriorModel::uniform(3, 1);
        let c = cfg();
        let mut rng = StdRng::seed_from_u64(77);
        for _ in 0..10 {
            let m1 = gen::random_menu(&mut rng, 3, 3);
            let m2 = gen::random_menu(&mut rng, 3, 2);
            let f12 = identified_family(
                &compile_batch(&[m1.clone(), m2.clone()]).unwrap().experiment,
                &prior,
                &c,
            )
            .unwrap();
            let f21 = identified_family(
                &compile_batch(&[m2, m1]).unwrap().experiment,
                &prior,
                &c,
            )
            .unwrap();
            assert!(mu_equivalent(&f12, &f21, &prior, &c).unwrap().is_equivalent());
        }
    }

    #[test]
    fn adaptive_depth_one_is_discrete() {
        let e = compile_adaptive(&AdaptiveTree::leaf(simplex3())).unwrap();
        assert_eq!(e.n_cells(), 3);
        assert_eq!(e.menu().len(), 3);
    }

    fn two_stage_fixture(rng: &mut StdRng) -> AdaptiveTree {
        let root = gen::random_menu(rng, 3, 2);
        let left = gen::random_menu(rng, 3, 2);
        let right = gen::random_menu(rng, 3, 2);
        AdaptiveTree::node(
            root,
            vec![AdaptiveTree::leaf(left), AdaptiveTree::leaf(right)],
        )
    }

    #[test]
    fn two_stage_tree_has_four_merged_cells() {
        let mut rng = StdRng::seed_from_u64(41);
        let tree = two_stage_fixture(&mut rng);
        let e = compile_adaptive(&tree).unwrap();
        // 8 plans collapse to 4 observations, 2 plans each
        assert_eq!(e.menu().len(), 8);
        assert_eq!(e.n_cells(), 4);
        for cell in e.partition() {
            assert_eq!(cell.len(), 2);
        }
    }

    #[test]
    fn two_stage_cells_equal_stagewise_product_cones() {
        // conditional on a first-stage choice, the compiled cells match the
        // battery of the root menu with that branch's menu, cell by cell
        let mut rng = StdRng::seed_from_u64(43);
        for _ in 0..5 {
            let tree = two_stage_fixture(&mut rng);
            let e = compile_adaptive(&tree).unwrap();
            for (r, child) in tree.children.iter().enumerate() {
                // the battery of the root with this branch is a Minkowski
                // product, so its cells factor stage-wise
                let batch = compile_batch(&[tree.menu.clone(), child.menu.clone()])
                    .unwrap()
                    .experiment;
                for c in 0..child.menu.len() {
                    // compiled cell carrying observation (r, c)
                    let cell = e
                        .partition()
                        .iter()
                        .position(|cell| {
                            cell.iter().any(|&k| {
                                e.menu().label(k).starts_with(&format!(
                                    "{}>{}",
                                    tree.menu.label(r),
                                    child.menu.label(c)
                                ))
                            })
                        })
                        .expect("observation cell exists");
                    let compiled = e.cell_union(cell);
                    // product cone: root cell r intersected with branch cell c
                    let product = normal_cone_at(&tree.menu, r)
                        .intersect(&normal_cone_at(&child.menu, c));
                    // same cone as the battery cell of the paired point
                    let paired = tree.menu.point(r).mix(0.5, child.menu.point(c));
                    let batch_idx = batch.menu().position_of(&paired).unwrap();
                    let batch_cone = normal_cone_at(batch.menu(), batch_idx);
                    assert!(cone_equal(&product, &batch_cone).unwrap());
                    // set equality of the compiled union with the product,
                    // through sampled directions
                    let mut inner = StdRng::seed_from_u64(7);
                    for _ in 0..300 {
                        let u = gen::random_direction(&mut inner, 3);
                        let in_compiled = compiled.contains(&u, 1e-9);
                        let in_product = product.contains(&u, 1e-9);
                        assert_eq!(in_compiled, in_product);
                    }
                }
            }
        }
    }

    #[test]
    fn adaptive_grid_matches_stagewise_simulation() {
        let mut rng = StdRng::seed_from_u64(47);
        let tree = two_stage_fixture(&mut rng);
        let e = compile_adaptive(&tree).unwrap();
        let mut mismatches = 0;
        let steps = 720;
        for k in 0..steps {
            let theta = k as f64 * std::f64::consts::TAU / steps as f64;
            let u = UtilityDirection::from_angle(theta);
            // stage-wise simulation with a margin guard
            let root_vals: Vec<f64> =
                tree.menu.points().iter().map(|p| u.value(p)).collect();
            let s1 = if root_vals[0] >= root_vals[1] { 0 } else { 1 };
            let margin1 = (root_vals[0] - root_vals[1]).abs();
            let child = &tree.children[s1].menu;
            let child_vals: Vec<f64> = child.points().iter().map(|p| u.value(p)).collect();
            let s2 = if child_vals[0] >= child_vals[1] { 0 } else { 1 };
            let margin2 = (child_vals[0] - child_vals[1]).abs();
            if margin1 < 1e-6 || margin2 < 1e-6 {
                continue;
            }
            let expected = format!("{}>{}", tree.menu.label(s1), child.label(s2));
            let choice = argmax_set(&u, e.menu(), 0.0).indices[0];
            let cell = e
                .partition()
                .iter()
                .position(|c| c.contains(&choice))
                .unwrap();
            let got = e.menu().label(e.partition()[cell][0]);
            if got != expected {
                mismatches += 1;
            }
        }
        assert_eq!(mismatches, 0);
    }

    #[test]
    fn depth_three_tree_matches_stagewise_simulation() {
        let mut rng = StdRng::seed_from_u64(53);
        let mut leaf_menus = Vec::new();
        for _ in 0..4 {
            leaf_menus.push(gen::random_menu(&mut rng, 3, 2));
        }
        let mid_left = gen::random_menu(&mut rng, 3, 2);
        let mid_right = gen::random_menu(&mut rng, 3, 2);
        let root = gen::random_menu(&mut rng, 3, 2);
        let tree = AdaptiveTree::node(
            root.clone(),
            vec![
                AdaptiveTree::node(
                    mid_left.clone(),
                    vec![
                        AdaptiveTree::leaf(leaf_menus[0].clone()),
                        AdaptiveTree::leaf(leaf_menus[1].clone()),
                    ],
                ),
                AdaptiveTree::node(
                    mid_right.clone(),
                    vec![
                        AdaptiveTree::leaf(leaf_menus[2].clone()),
                        AdaptiveTree::leaf(leaf_menus[3].clone()),
                    ],
                ),
            ],
        );
        let e = compile_adaptive(&tree).unwrap();
        // 2^7 plans fold into 8 three-choice observations
        assert_eq!(e.menu().len(), 128);
        assert_eq!(e.n_cells(), 8);
        let mut mismatches = 0;
        for k in 0..720 {
            let theta = k as f64 * std::f64::consts::TAU / 720.0;
            let u = UtilityDirection::from_angle(theta);
            let s1 = argmax_set(&u, &root, 0.0).indices[0];
            let mid = if s1 == 0 { &mid_left } else { &mid_right };
            let s2 = argmax_set(&u, mid, 0.0).indices[0];
            let leaf = &leaf_menus[2 * s1 + s2];
            let s3 = argmax_set(&u, leaf, 0.0).indices[0];
            let simulated = format!(
                "{}>{}>{}",
                root.label(s1),
                mid.label(s2),
                leaf.label(s3)
            );
            let choice = argmax_set(&u, e.menu(), 0.0).indices[0];
            let cell = e
                .partition()
                .iter()
                .position(|c| c.contains(&choice))
                .unwrap();
            if e.menu().label(e.partition()[cell][0]) != simulated {
                mismatches += 1;
            }
        }
        assert_eq!(mismatches, 0);
    }

    #[test]
    fn chance_first_game_hides_the_unreached_menu() {
        // the chance device moves first; each realization reveals only the
        // choice from the realized menu
        let leaf = |coords: Vec<f64>| GameNode::Leaf { outcome: Lottery::new(coords).unwrap() };
        let game = DynamicGame {
            root: GameNode::Chance {
                branches: vec![
                    GameBranch {
                        prob: 0.3,
                        child: GameNode::Subject {
                            name: "L".into(),
                            actions: vec![
                                GameAction { name: "a".into(), child: leaf(vec![0.8, 0.1, 0.1]) },
                                GameAction { name: "b".into(), child: leaf(vec![0.1, 0.8, 0.1]) },
                            ],
                        },
                    },
                    GameBranch {
                        prob: 0.7,
                        child: GameNode::Subject {
                            name: "R".into(),
                            actions: vec![
                                GameAction { name: "c".into(), child: leaf(vec![0.1, 0.1, 0.8]) },
                                GameAction { name: "d".into(), child: leaf(vec![0.5, 0.3, 0.2]) },
                            ],
                        },
                    },
                ],
            },
        };
        let out = compile_game(&game).unwrap();
        assert_eq!(out.randomized.atoms().len(), 2);
        assert!((out.randomized.atoms()[0].1 - 0.3).abs() < 1e-12);
        // four strategies, grouped two-and-two under each realization
        for cells in &out.strategy_cells {
            assert_eq!(cells.len(), 2);
            for cell in cells {
                assert_eq!(cell.len(), 2);
            }
        }
        // under the left realization, strategies sharing the L-action merge
        assert_eq!(
            out.strategy_cells[0],
            vec![
                vec!["(a,c)".to_string(), "(a,d)".to_string()],
                vec!["(b,c)".to_string(), "(b,d)".to_string()],
            ]
        );
    }

    #[test]
    fn uneven_tree_rejected() {
        let tree = AdaptiveTree::node(
            Menu::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap(),
            vec![
                AdaptiveTree::leaf(simplex3()),
                AdaptiveTree::node(
                    simplex3(),
                    vec![
                        AdaptiveTree::leaf(simplex3()),
                        AdaptiveTree::leaf(simplex3()),
                        AdaptiveTree::leaf(simplex3()),
                    ],
                ),
            ],
        );
        assert!(matches!(compile_adaptive(&tree), Err(CompileError::UnevenDepth)));
    }

    #[test]
    fn colliding_plans_rejected() {
        // both branch menus equal the root menu and all weights align, so
        // distinct observations meet on the same mixed points
        let m = Menu::from_rows(&[vec![0.5, 0.25, 0.25], vec![0.25, 0.5, 0.25]]).unwrap();
        let tree = AdaptiveTree::node(
            m.clone(),
            vec![AdaptiveTree::leaf(m.clone()), AdaptiveTree::leaf(m)],
        );
        assert!(matches!(compile_adaptive(&tree), Err(CompileError::Collision(_))));
    }

    fn example_game(alpha: f64) -> DynamicGame {
        let leaf = |coords: Vec<f64>| GameNode::Leaf { outcome: Lottery::new(coords).unwrap() };
        DynamicGame {
            root: GameNode::Subject {
                name: "S0".into(),
                actions: vec![
                    GameAction { name: "o".into(), child: leaf(vec![0.2, 0.4, 0.4]) },
                    GameAction {
                        name: "i".into(),
                        child: GameNode::Chance {
                            branches: vec![
                                GameBranch {
                                    prob: alpha,
                                    child: GameNode::Subject {
                                        name: "SL".into(),
                                        actions: vec![
                                            GameAction {
                                                name: "a".into(),
                                                child: leaf(vec![0.8, 0.1, 0.1]),
                                            },
                                            GameAction {
                                                name: "b".into(),
                                                child: leaf(vec![0.1, 0.8, 0.1]),
                                            },
                                        ],
                                    },
                                },
                                GameBranch {
                                    prob: 1.0 - alpha,
                                    child: GameNode::Subject {
                                        name: "SR".into(),
                                        actions: vec![
                                            GameAction {
                                                name: "c".into(),
                                                child: leaf(vec![0.1, 0.1, 0.8]),
                                            },
                                            GameAction {
                                                name: "d".into(),
                                                child: leaf(vec![0.4, 0.4, 0.2]),
                                            },
                                        ],
                                    },
                                },
                            ],
                        },
                    },
                ],
            },
        }
    }

    #[test]
    fn game_compiles_to_two_atoms_with_on_path_cells() {
        let out = compile_game(&example_game(0.5)).unwrap();
        assert_eq!(out.randomized.atoms().len(), 2);
        // 8 strategies, 5 distinct induced lotteries
        assert_eq!(out.randomized.atoms()[0].0.menu().len(), 5);
        let left = &out.strategy_cells[0];
        let right = &out.strategy_cells[1];
        let expect_left: Vec<Vec<String>> = vec![
            vec!["(i,a,c)".into(), "(i,a,d)".into()],
            vec!["(i,b,c)".into(), "(i,b,d)".into()],
            vec![
                "(o,a,c)".into(),
                "(o,a,d)".into(),
                "(o,b,c)".into(),
                "(o,b,d)".into(),
            ],
        ];
        let expect_right: Vec<Vec<String>> = vec![
            vec!["(i,a,c)".into(), "(i,b,c)".into()],
            vec!["(i,a,d)".into(), "(i,b,d)".into()],
            vec![
                "(o,a,c)".into(),
                "(o,a,d)".into(),
                "(o,b,c)".into(),
                "(o,b,d)".into(),
            ],
        ];
        assert_eq!(left, &expect_left);
        assert_eq!(right, &expect_right);
    }

    #[test]
    fn degenerate_chance_collapses_to_one_atom() {
        let out = compile_game(&example_game(1.0)).unwrap();
        assert_eq!(out.randomized.atoms().len(), 1);
        assert_eq!(out.strategy_cells[0].len(), 3);
    }

    #[test]
    fn chanceless_game_is_a_single_experiment() {
        let leaf = |coords: Vec<f64>| GameNode::Leaf { outcome: Lottery::new(coords).unwrap() };
        let game = DynamicGame {
            root: GameNode::Subject {
                name: "S".into(),
                actions: vec![
                    GameAction { name: "u".into(), child: leaf(vec![0.7, 0.2, 0.1]) },
                    GameAction { name: "v".into(), child: leaf(vec![0.1, 0.6, 0.3]) },
                ],
            },
        };
        let out = compile_game(&game).unwrap();
        assert_eq!(out.randomized.atoms().len(), 1);
        assert_eq!(out.randomized.atoms()[0].0.menu().len(), 2);
    }

    #[test]
    fn same_lottery_different_observation_is_a_collision() {
        // two actions lead to the same outcome but are distinguishable
        let leaf = |coords: Vec<f64>| GameNode::Leaf { outcome: Lottery::new(coords).unwrap() };
        let game = DynamicGame {
            root: GameNode::Subject {
                name: "S".into(),
                actions: vec![
                    GameAction { name: "u".into(), child: leaf(vec![0.5, 0.3, 0.2]) },
                    GameAction { name: "v".into(), child: leaf(vec![0.5, 0.3, 0.2]) },
                ],
            },
        };
        assert!(matches!(compile_game(&game), Err(CompileError::Collision(_))));
    }

    #[test]
    fn realize_triangle_fan_recovers_discrete_experiment() {
        let prior = PriorModel::uniform(3, 1);
        let c = cfg();
        let menu = simplex3();
        let faces = enumerate_faces(&menu).unwrap();
        // one cell per proper face
        let groups: Vec<Vec<usize>> = (0..faces.len())
            .filter(|&i| faces[i].witness.is_some())
            .map(|i| vec![i])
            .collect();
        let target = TargetPartition::from_face_groups(vec![menu.clone()], groups).unwrap();
        let out = realize_partition(&target).unwrap();
        let fam = identified_family(&out.experiment, &prior, &c).unwrap();
        let reference = identified_family(&Experiment::discrete(menu), &prior, &c).unwrap();
        assert!(mu_equivalent(&fam, &reference, &prior, &c).unwrap().is_equivalent());
    }

    #[test]
    fn realize_six_sector_target_from_the_battery_pair() {
        // generators: the two menus of the first battery; their average is
        // the hexagon whose fan has six full-dimensional sectors
        let prior = PriorModel::uniform(3, 1);
        let c = cfg();
        let a = Menu::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.5, 0.5, 0.0],
            vec![0.5, 0.0, 0.5],
            vec![0.0, 0.5, 0.5],
        ])
        .unwrap();
        let a2 = Menu::from_rows(&[vec![0.0, 0.6, 0.4], vec![0.0, 0.4, 0.6]]).unwrap();
        let generators = vec![a, a2];
        let average = average_menu(&generators).unwrap();
        let faces = enumerate_faces(&average).unwrap();
        // one cell per sector, boundary rays attached to whichever cell
        let sectors: Vec<usize> = (0..faces.len())
            .filter(|&i| faces[i].extremes.len() == 1 && faces[i].witness.is_some())
            .collect();
        assert_eq!(sectors.len(), 6);
        let mut groups: Vec<Vec<usize>> = sectors.iter().map(|&f| vec![f]).collect();
        for (i, face) in faces.iter().enumerate() {
            if face.extremes.len() >= 2 && face.witness.is_some() {
                groups[i % 6].push(i);
            }
        }
        let target = TargetPartition::from_face_groups(generators.clone(), groups).unwrap();
        let out = realize_partition(&target).unwrap();
        let fam = identified_family(&out.experiment, &prior, &c).unwrap();
        let (measures, _) = prior.measure_cells(target.cells(), &c).unwrap();
        let t_fam = IdentifiedFamily {
            cells: target.cells().to_vec().into_iter().zip(measures).collect(),
            ties: 0,
        };
        assert!(mu_equivalent(&fam, &t_fam, &prior, &c).unwrap().is_equivalent());
        // also equivalent to the battery itself observed perfectly
        let battery = compile_batch(&generators).unwrap().experiment;
        let b_fam = identified_family(&battery, &prior, &c).unwrap();
        assert!(mu_equivalent(&fam, &b_fam, &prior, &c).unwrap().is_equivalent());

        // a coarse two-cell regrouping of the same fan realizes too
        let mut coarse: Vec<Vec<usize>> = vec![Vec::new(), Vec::new()];
        for (pos, face) in faces.iter().enumerate() {
            if face.witness.is_some() {
                coarse[usize::from(pos % 2 == 0)].push(pos);
            }
        }
        let coarse_target = TargetPartition::from_face_groups(generators, coarse).unwrap();
        let out = realize_partition(&coarse_target).unwrap();
        let fam = identified_family(&out.experiment, &prior, &c).unwrap();
        let (measures, _) = prior.measure_cells(coarse_target.cells(), &c).unwrap();
        let t_fam = IdentifiedFamily {
            cells: coarse_target.cells().to_vec().into_iter().zip(measures).collect(),
            ties: 0,
        };
        assert!(mu_equivalent(&fam, &t_fam, &prior, &c).unwrap().is_equivalent());
    }

    #[test]
    fn realize_random_fan_groupings() {
        let prior = PriorModel::uniform(3, 1);
        let c = cfg();
        let mut rng = StdRng::seed_from_u64(61);
        for trial in 0..10 {
            let n1 = rng.random_range(3..5);
            let n2 = rng.random_range(2..5);
            let g1 = gen::random_menu(&mut rng, 3, n1);
            let g2 = gen::random_menu(&mut rng, 3, n2);
            let generators = vec![g1, g2];
            let average = average_menu(&generators).unwrap();
            let faces = enumerate_faces(&average).unwrap();
            let proper: Vec<usize> = (0..faces.len())
                .filter(|&i| faces[i].witness.is_some())
                .collect();
            let k = rng.random_range(2..5.min(proper.len()));
            let mut groups: Vec<Vec<usize>> = vec![Vec::new(); k];
            for (pos, &f) in proper.iter().enumerate() {
                if pos < k {
                    groups[pos].push(f); // every group non-empty
                } else {
                    let g = rng.random_range(0..k);
                    groups[g].push(f);
                }
            }
            let target = TargetPartition::from_face_groups(generators, groups).unwrap();
            let out = realize_partition(&target).unwrap();
            let fam = identified_family(&out.experiment, &prior, &c).unwrap();
            // the target family, measured directly
            let (t_measures, _) = prior.measure_cells(target.cells(), &c).unwrap();
            let t_fam = IdentifiedFamily {
                cells: target.cells().iter().cloned().zip(t_measures).collect(),
                ties: 0,
            };
            let eq = mu_equivalent(&fam, &t_fam, &prior, &c).unwrap();
            assert!(eq.is_equivalent(), "trial {trial}: {eq:?}");
            // masses of the target tile the circle
            assert!((t_fam.total_mass() - 1.0).abs() < 1e-9);
        }
    }
}
