//! Experiments, observability partitions, identifiable families, and the
//! equivalence machinery between them.
//!
//! An experiment is a menu plus a partition of its indices; the analyst
//! observes only which cell the subject's choice fell into. Observing cell
//! `P` identifies the union of the normal cones of `P`'s points, so each
//! experiment induces a family of identifiable sets whose pairwise overlaps
//! are boundaries and carry no prior mass under a regular prior.

use crate::config::EvalConfig;
use crate::geometry::{ConeUnion, GeometryError, Menu};
use crate::prior::{MeasureEstimate, PriorError, PriorModel};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IdentError {
    #[error("partition is invalid: {0}")]
    BadPartition(String),
    #[error("cells {i} and {j} overlap with mass {mass}, violating unambiguous observability")]
    OverlapViolation { i: usize, j: usize, mass: f64 },
    #[error("merge specification is invalid: {0}")]
    BadMerge(String),
    #[error("atom weights must be positive and sum to one (sum {0})")]
    BadWeights(f64),
    #[error("randomized experiment needs at least one atom")]
    NoAtoms,
    #[error("panel valuation failed: {0}")]
    PanelValue(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Prior(#[from] PriorError),
}

/// A decision problem with an observability partition over its indices.
///
/// Cells are index sets, not point values, so the structure survives float
/// drift in the lotteries themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    menu: Menu,
    partition: Vec<Vec<usize>>,
}

impl Experiment {
    /// Structural constructor: cells must be non-empty, disjoint, and cover
    /// the menu. Cells built from menu indices automatically satisfy the
    /// measurability and zero-overlap conditions under any regular prior,
    /// because distinct points share cones only on boundary hyperplanes.
    pub fn new(menu: Menu, partition: Vec<Vec<usize>>) -> Result<Self, IdentError> {
        let n = menu.len();
        let mut seen = vec![false; n];
        if partition.is_empty() {
            return Err(IdentError::BadPartition("no cells".into()));
        }
        for (k, cell) in partition.iter().enumerate() {
            if cell.is_empty() {
                return Err(IdentError::BadPartition(format!("cell {k} is empty")));
            }
            for &i in cell {
                if i >= n {
                    return Err(IdentError::BadPartition(format!(
                        "cell {k} references point {i} of a {n}-point menu"
                    )));
                }
                if seen[i] {
                    return Err(IdentError::BadPartition(format!("point {i} appears twice")));
                }
                seen[i] = true;
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(IdentError::BadPartition("cells do not cover the menu".into()));
        }
        let mut partition = partition;
        for cell in &mut partition {
            cell.sort_unstable();
        }
        Ok(Experiment { menu, partition })
    }

    /// Constructor that additionally verifies, against a prior, that no two
    /// cells identify overlapping sets of positive mass.
    pub fn validated(
        menu: Menu,
        partition: Vec<Vec<usize>>,
        prior: &PriorModel,
        cfg: &EvalConfig,
    ) -> Result<Self, IdentError> {
        let e = Experiment::new(menu, partition)?;
        e.check_no_overlap(prior, cfg)?;
        Ok(e)
    }

    /// Every point observed perfectly.
    pub fn discrete(menu: Menu) -> Self {
        let partition = (0..menu.len()).map(|i| vec![i]).collect();
        Experiment { menu, partition }
    }

    /// Nothing observed beyond participation.
    pub fn trivial(menu: Menu) -> Self {
        let partition = vec![(0..menu.len()).collect()];
        Experiment { menu, partition }
    }

    pub fn menu(&self) -> &Menu {
        &self.menu
    }

    pub fn partition(&self) -> &[Vec<usize>] {
        &self.partition
    }

    pub fn n_cells(&self) -> usize {
        self.partition.len()
    }

    /// Identifiable set of one cell: the union of its points' normal cones.
    pub fn cell_union(&self, k: usize) -> ConeUnion {
        ConeUnion::from_menu_cell(&self.menu, &self.partition[k])
    }

    /// Verify that distinct cells identify essentially disjoint sets.
    pub fn check_no_overlap(&self, prior: &PriorModel, cfg: &EvalConfig) -> Result<(), IdentError> {
        let unions: Vec<ConeUnion> = (0..self.n_cells()).map(|k| self.cell_union(k)).collect();
        for i in 0..unions.len() {
            for j in (i + 1)..unions.len() {
                let overlap = unions[i].intersect(&unions[j]);
                let m = prior.measure(&overlap, cfg)?;
                let limit = if m.exact {
                    cfg.exact_tol
                } else {
                    (cfg.sigma * m.std_error).max(cfg.tie_rate_abort)
                };
                if m.value > limit {
                    return Err(IdentError::OverlapViolation { i, j, mass: m.value });
                }
            }
        }
        Ok(())
    }

    /// Merge cells according to the given index pairs (transitively) and
    /// return the coarsened experiment.
    pub fn coarsen(&self, merges: &[(usize, usize)]) -> Result<Experiment, IdentError> {
        let n = self.partition.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, i: usize) -> usize {
            if parent[i] != i {
                let r = find(parent, parent[i]);
                parent[i] = r;
            }
            parent[i]
        }
        for &(a, b) in merges {
            if a >= n || b >= n {
                return Err(IdentError::BadMerge(format!(
                    "cell pair ({a}, {b}) out of range for {n} cells"
                )));
            }
            let ra = find(&mut parent, a);
            let rb = find(&mut parent, b);
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut group_of_root = std::collections::BTreeMap::new();
        for k in 0..n {
            let r = find(&mut parent, k);
            let g = *group_of_root.entry(r).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[g].extend(self.partition[k].iter().copied());
        }
        Experiment::new(self.menu.clone(), groups)
    }
}

/// A finitely supported lottery over experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomizedExperiment {
    atoms: Vec<(Experiment, f64)>,
}

impl RandomizedExperiment {
    pub fn new(atoms: Vec<(Experiment, f64)>) -> Result<Self, IdentError> {
        if atoms.is_empty() {
            return Err(IdentError::NoAtoms);
        }
        let sum: f64 = atoms.iter().map(|(_, w)| w).sum();
        if atoms.iter().any(|(_, w)| *w <= 0.0) || (sum - 1.0).abs() > 1e-12 {
            return Err(IdentError::BadWeights(sum));
        }
        Ok(RandomizedExperiment { atoms })
    }

    pub fn degenerate(e: Experiment) -> Self {
        RandomizedExperiment { atoms: vec![(e, 1.0)] }
    }

    pub fn uniform(experiments: Vec<Experiment>) -> Result<Self, IdentError> {
        let n = experiments.len();
        if n == 0 {
            return Err(IdentError::NoAtoms);
        }
        let w = 1.0 / n as f64;
        Ok(RandomizedExperiment {
            atoms: experiments.into_iter().map(|e| (e, w)).collect(),
        })
    }

    pub fn atoms(&self) -> &[(Experiment, f64)] {
        &self.atoms
    }
}

/// The identifiable sets of an experiment, one per partition cell, with
/// their prior masses.
#[derive(Debug, Clone)]
pub struct IdentifiedFamily {
    pub cells: Vec<(ConeUnion, MeasureEstimate)>,
    /// Monte-Carlo draws that landed in two or more cells (always zero on
    /// the exact path).
    pub ties: usize,
}

impl IdentifiedFamily {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Cells whose mass is meaningfully positive at the configured scale.
    pub fn positive_cells(&self, cfg: &EvalConfig) -> Vec<usize> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, (_, m))| is_positive(m, cfg))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.cells.iter().map(|(_, m)| m.value).sum()
    }
}

fn is_positive(m: &MeasureEstimate, cfg: &EvalConfig) -> bool {
    if m.exact {
        m.value > cfg.exact_tol
    } else {
        m.value > cfg.sigma * m.std_error
    }
}

/// Compute the identified family of an experiment under a prior.
pub fn identified_family(
    e: &Experiment,
    prior: &PriorModel,
    cfg: &EvalConfig,
) -> Result<IdentifiedFamily, IdentError> {
    let unions: Vec<ConeUnion> = (0..e.n_cells()).map(|k| e.cell_union(k)).collect();
    let (measures, ties) = prior.measure_cells(&unions, cfg)?;
    Ok(IdentifiedFamily {
        cells: unions.into_iter().zip(measures).collect(),
        ties,
    })
}

/// A measure-preserving cell bijection between two identified families.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matching {
    /// Pairs of cell indices `(i in F1, j in F2)` over positive cells.
    pub pairs: Vec<(usize, usize)>,
}

/// Outcome of a family equivalence test.
#[derive(Debug, Clone)]
pub enum MuEquivalence {
    Equivalent(Matching),
    Failed { witness: String },
}

impl MuEquivalence {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, MuEquivalence::Equivalent(_))
    }

    pub fn matching(&self) -> Option<&Matching> {
        match self {
            MuEquivalence::Equivalent(m) => Some(m),
            MuEquivalence::Failed { .. } => None,
        }
    }
}

/// Equality of two masses within the statistical tolerance, re-measured at
/// doubled sample sizes while the comparison is borderline.
fn measures_match(
    prior: &PriorModel,
    a: &ConeUnion,
    b: &ConeUnion,
    cfg: &EvalConfig,
) -> Result<bool, PriorError> {
    let mut n = cfg.n_samples;
    loop {
        let local = EvalConfig { n_samples: n, ..cfg.clone() };
        let ma = prior.measure(a, &local)?;
        let mb = prior.measure(b, &local)?;
        let diff = (ma.value - mb.value).abs();
        if ma.exact && mb.exact {
            return Ok(diff <= cfg.exact_tol);
        }
        let se = (ma.std_error.powi(2) + mb.std_error.powi(2)).sqrt().max(1e-12);
        let threshold = cfg.sigma * se;
        // widen the sample when the verdict sits near the threshold
        if (diff - threshold).abs() <= 2.0 * se && n < cfg.adapt_cap {
            n = (n * 2).min(cfg.adapt_cap);
            continue;
        }
        return Ok(diff <= threshold);
    }
}

/// Test whether two identified families are equal up to null sets by
/// exhibiting the measure-preserving bijection between their positive
/// cells: each positive cell of one family must line up with exactly one
/// cell of the other carrying the same mass and a full-mass intersection.
pub fn mu_equivalent(
    f1: &IdentifiedFamily,
    f2: &IdentifiedFamily,
    prior: &PriorModel,
    cfg: &EvalConfig,
) -> Result<MuEquivalence, IdentError> {
    let pos1 = f1.positive_cells(cfg);
    let pos2 = f2.positive_cells(cfg);
    if pos1.len() != pos2.len() {
        return Ok(MuEquivalence::Failed {
            witness: format!("{} positive cells versus {}", pos1.len(), pos2.len()),
        });
    }
    let mut pairs = Vec::new();
    let mut used = vec![false; pos2.len()];
    for &i in &pos1 {
        let w = &f1.cells[i].0;
        let mut found: Option<usize> = None;
        for (slot, &j) in pos2.iter().enumerate() {
            let v = &f2.cells[j].0;
            // mass(W) = mass(W & V) = mass(V)
            let wv = w.intersect(v);
            if measures_match(prior, w, v, cfg)? && measures_match(prior, w, &wv, cfg)? {
                if let Some(prev) = found {
                    return Ok(MuEquivalence::Failed {
                        witness: format!("cell {i} matches both cells {} and {j}", pos2[prev]),
                    });
                }
                found = Some(slot);
            }
        }
        match found {
            Some(slot) => {
                if used[slot] {
                    return Ok(MuEquivalence::Failed {
                        witness: format!("cell {} matched twice", pos2[slot]),
                    });
                }
                used[slot] = true;
                pairs.push((i, pos2[slot]));
            }
            None => {
                return Ok(MuEquivalence::Failed {
                    witness: format!("no partner for cell {i}"),
                });
            }
        }
    }
    Ok(MuEquivalence::Equivalent(Matching { pairs }))
}

/// Reference transform: replace a family of possibly overlapping cells by
/// the sequential set differences, which form a genuine partition that is
/// equivalent to the original family up to null sets.
pub fn disjointify(cells: &[ConeUnion]) -> Result<Vec<ConeUnion>, GeometryError> {
    let mut out: Vec<ConeUnion> = Vec::with_capacity(cells.len());
    for (i, w) in cells.iter().enumerate() {
        let mut piece = w.clone();
        for v in &cells[..i] {
            piece = piece.difference(v)?;
        }
        out.push(piece);
    }
    Ok(out)
}

/// Transparency of a set: merging a cell equal to it into any sibling never
/// changes an experiment's value. Tested over the panel of experiments
/// reconstructable from the set's menu origin; when no panel can be built,
/// the prior-mass criterion (mass zero) decides. Under an expected-value
/// functional the two criteria agree away from degenerate edge cases, and
/// the tests cross-check them.
pub fn is_transparent<F, E>(
    v: &ConeUnion,
    prior: &PriorModel,
    cfg: &EvalConfig,
    tol: f64,
    panel_value: F,
) -> Result<bool, IdentError>
where
    F: Fn(&Experiment) -> Result<f64, E>,
    E: std::fmt::Display,
{
    if v.is_empty_union() {
        return Ok(true);
    }
    let panel = v.origin().and_then(|origin| {
        let n = origin.menu.len();
        if origin.cell.len() >= n {
            return None;
        }
        let rest: Vec<usize> = (0..n).filter(|i| !origin.cell.contains(i)).collect();
        let mut partition = vec![origin.cell.clone()];
        partition.extend(rest.iter().map(|&i| vec![i]));
        Experiment::new(origin.menu.clone(), partition).ok()
    });
    if let Some(base) = panel {
        let score =
            |e: &Experiment| panel_value(e).map_err(|err| IdentError::PanelValue(err.to_string()));
        let base_value = score(&base)?;
        for sibling in 1..base.n_cells() {
            let merged = base.coarsen(&[(0, sibling)])?;
            if (score(&merged)? - base_value).abs() > tol {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    let mass = prior.measure(v, cfg)?;
    Ok(if mass.exact {
        mass.value <= cfg.exact_tol
    } else {
        mass.value <= cfg.sigma * mass.std_error
    })
}

// --- JSON form ------------------------------------------------------------

pub const SCHEMA_TAG: &str = "eiv/1";

#[derive(Serialize, Deserialize)]
struct ExperimentDto {
    #[serde(skip_serializing_if = "Option::is_none")]
    schema: Option<String>,
    menu: Menu,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    labels: Option<Vec<String>>,
    partition: Vec<Vec<usize>>,
}

impl Serialize for Experiment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ExperimentDto {
            schema: Some(SCHEMA_TAG.to_string()),
            menu: self.menu.clone(),
            labels: self.menu.labels().map(|ls| ls.to_vec()),
            partition: self.partition.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Experiment {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let dto = ExperimentDto::deserialize(d)?;
        if let Some(tag) = &dto.schema {
            if tag != SCHEMA_TAG {
                return Err(serde::de::Error::custom(format!("unknown schema tag {tag}")));
            }
        }
        let menu = match dto.labels {
            Some(labels) => Menu::with_labels(dto.menu.points().to_vec(), labels)
                .map_err(serde::de::Error::custom)?,
            None => dto.menu,
        };
        Experiment::new(menu, dto.partition).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct AtomDto {
    weight: f64,
    experiment: Experiment,
}

#[derive(Serialize, Deserialize)]
struct RandomizedDto {
    #[serde(skip_serializing_if = "Option::is_none")]
    schema: Option<String>,
    atoms: Vec<AtomDto>,
}

impl Serialize for RandomizedExperiment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RandomizedDto {
            schema: Some(SCHEMA_TAG.to_string()),
            atoms: self
                .atoms
                .iter()
                .map(|(e, w)| AtomDto { weight: *w, experiment: e.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RandomizedExperiment {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let dto = RandomizedDto::deserialize(d)?;
        let atoms = dto.atoms.into_iter().map(|a| (a.experiment, a.weight)).collect();
        RandomizedExperiment::new(atoms).map_err(serde::de::Error::custom)
    }
}
