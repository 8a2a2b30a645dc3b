//! Identification indices and the expected-identification-value functional.
//!
//! An index assigns a subjective value to learning that the subject's
//! utility lies in a given set. A randomized experiment is then worth the
//! expected index value of the identification it will produce: per atom,
//! the sum over cells of index times prior mass, averaged over atoms.
//!
//! Every index is normalized so that learning nothing is worth nothing, and
//! a usable index should never price refinement negatively; `verify_t1`
//! spot-checks that property on random nested pairs.

use crate::config::EvalConfig;
use crate::geometry::{ConeUnion, GeometryError, UtilityDirection};
use crate::identification::{identified_family, IdentError, RandomizedExperiment};
use crate::prior::{PriorError, PriorModel};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ValuationError {
    #[error("index is undefined on a null identification")]
    NullIdentification,
    #[error("set does not match any union of the table's named cells: {0}")]
    UnknownCell(String),
    #[error("invalid probability vector: {0}")]
    BadProbVector(String),
    #[error("invalid table: {0}")]
    BadTable(String),
    #[error(transparent)]
    Prior(#[from] PriorError),
    #[error(transparent)]
    Ident(#[from] IdentError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Payoff of a binary action against a utility type, for promotion-style
/// indices.
pub type PayoffFn = Arc<dyn Fn(bool, &UtilityDirection) -> f64 + Send + Sync>;

/// Values on the subset lattice of a named partition.
///
/// Keys are sorted index sets into `partition`; a table may price any cell
/// union it names but nothing outside its own partition algebra.
#[derive(Debug, Clone)]
pub struct TableIndex {
    partition: Vec<ConeUnion>,
    values: BTreeMap<Vec<usize>, f64>,
}

impl TableIndex {
    pub fn new(
        partition: Vec<ConeUnion>,
        values: BTreeMap<Vec<usize>, f64>,
    ) -> Result<Self, ValuationError> {
        if partition.is_empty() {
            return Err(ValuationError::BadTable("empty partition".into()));
        }
        let full: Vec<usize> = (0..partition.len()).collect();
        match values.get(&full) {
            Some(v) if v.abs() <= 1e-12 => {}
            Some(v) => {
                return Err(ValuationError::BadTable(format!(
                    "the full union must be worth zero, got {v}"
                )))
            }
            None => {
                return Err(ValuationError::BadTable(
                    "missing a value for the full union".into(),
                ))
            }
        }
        for key in values.keys() {
            if key.is_empty() || key.windows(2).any(|w| w[0] >= w[1]) {
                return Err(ValuationError::BadTable(format!("malformed key {key:?}")));
            }
            if key.iter().any(|&i| i >= partition.len()) {
                return Err(ValuationError::BadTable(format!("key {key:?} out of range")));
            }
        }
        Ok(TableIndex { partition, values })
    }

    /// Build the full subset lattice from a function of prior mass, using
    /// `tau(S) = f(mass(S)) / mass(S)`. Concave `f` vanishing at 0 and 1
    /// yields a table that prices information weakly positively.
    pub fn from_measure_fn(
        partition: Vec<ConeUnion>,
        prior: &PriorModel,
        cfg: &EvalConfig,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self, ValuationError> {
        let n = partition.len();
        assert!(n <= 16, "table lattice is desk-scale only");
        let masses: Vec<f64> = partition
            .iter()
            .map(|c| prior.measure(c, cfg).map(|m| m.value))
            .collect::<Result<_, _>>()?;
        let mut values = BTreeMap::new();
        for mask in 1u32..(1u32 << n) {
            let key: Vec<usize> = (0..n).filter(|b| mask >> b & 1 == 1).collect();
            let mass: f64 = key.iter().map(|&i| masses[i]).sum();
            let v = if key.len() == n { 0.0 } else { f(mass) / mass.max(1e-300) };
            values.insert(key, v);
        }
        TableIndex::new(partition, values)
    }

    pub fn partition(&self) -> &[ConeUnion] {
        &self.partition
    }

    pub fn values(&self) -> &BTreeMap<Vec<usize>, f64> {
        &self.values
    }

    pub fn value_of(&self, key: &[usize]) -> Option<f64> {
        self.values.get(key).copied()
    }

    /// Identify `w` as a union of named cells by measure matching: a cell
    /// belongs when essentially all of it lies inside `w`, and the matched
    /// union must exhaust `w`'s mass.
    fn resolve(
        &self,
        w: &ConeUnion,
        prior: &PriorModel,
        cfg: &EvalConfig,
    ) -> Result<Vec<usize>, ValuationError> {
        let tol = resolve_tol(prior, cfg);
        let mut key = Vec::new();
        let mut covered = 0.0;
        for (i, cell) in self.partition.iter().enumerate() {
            let cell_mass = prior.measure(cell, cfg)?.value;
            let inside = prior.measure(&cell.intersect(w), cfg)?.value;
            if cell_mass > tol && inside >= cell_mass - tol {
                key.push(i);
                covered += cell_mass;
            } else if inside > tol {
                return Err(ValuationError::UnknownCell(format!(
                    "set straddles named cell {i}"
                )));
            }
        }
        let w_mass = prior.measure(w, cfg)?.value;
        if (w_mass - covered).abs() > tol * (key.len() as f64 + 1.0) {
            return Err(ValuationError::UnknownCell(format!(
                "mass {w_mass} not exhausted by matched cells ({covered})"
            )));
        }
        if key.is_empty() {
            return Err(ValuationError::UnknownCell("set has no named mass".into()));
        }
        Ok(key)
    }

    /// Check the positive-information inequality on every disjoint split
    /// the table can express.
    pub fn is_subadditive(&self) -> bool {
        for (k1, v1) in &self.values {
            for (k2, v2) in &self.values {
                if k1.iter().any(|i| k2.contains(i)) {
                    continue;
                }
                let mut joined: Vec<usize> = k1.iter().chain(k2.iter()).copied().collect();
                joined.sort_unstable();
                if let Some(vj) = self.values.get(&joined) {
                    if *vj > v1 + v2 + 1e-12 {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn resolve_tol(prior: &PriorModel, cfg: &EvalConfig) -> f64 {
    if prior.supports_exact() && cfg.path != crate::config::PathPolicy::ForceMonteCarlo {
        1e-7
    } else {
        cfg.sigma / (cfg.n_samples as f64).sqrt()
    }
}

/// The identification index: how much learning `u* in W` is worth.
#[derive(Clone)]
pub enum IdentificationIndex {
    /// Log-loss of the prior mass: rarer identifications are worth more.
    Entropy,
    /// Worth one exactly when the identification settles the hypothesis
    /// `u* in w_star`, in either direction.
    HypothesisTest { w_star: ConeUnion },
    /// Value of an optimal binary action taken against the identified set.
    Promotion { payoff: PayoffFn },
    /// Explicit values on a named partition and its unions, weighted by
    /// prior mass like every other index.
    Table(TableIndex),
    /// Explicit per-set values summed without prior weighting; the table
    /// must be subadditive across disjoint unions so that refining an
    /// observation never loses value.
    BeliefFreeNu(TableIndex),
}

impl std::fmt::Debug for IdentificationIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IdentificationIndex::Entropy => write!(f, "Entropy"),
            IdentificationIndex::HypothesisTest { .. } => write!(f, "HypothesisTest"),
            IdentificationIndex::Promotion { .. } => write!(f, "Promotion"),
            IdentificationIndex::Table(_) => write!(f, "Table"),
            IdentificationIndex::BeliefFreeNu(_) => write!(f, "BeliefFreeNu"),
        }
    }
}

impl IdentificationIndex {
    pub fn belief_free_nu(table: TableIndex) -> Result<Self, ValuationError> {
        if !table.is_subadditive() {
            return Err(ValuationError::BadTable(
                "belief-free table must be subadditive over disjoint unions".into(),
            ));
        }
        Ok(IdentificationIndex::BeliefFreeNu(table))
    }

    fn is_belief_free(&self) -> bool {
        matches!(self, IdentificationIndex::BeliefFreeNu(_))
    }
}

/// Index value of one identifiable set.
pub fn tau(
    index: &IdentificationIndex,
    w: &ConeUnion,
    prior: &PriorModel,
    cfg: &EvalConfig,
) -> Result<f64, ValuationError> {
    match index {
        IdentificationIndex::Entropy => {
            let m = prior.measure(w, cfg)?;
            if m.value <= 0.0 || (m.exact && m.value <= cfg.exact_tol) {
                return Err(ValuationError::NullIdentification);
            }
            Ok(-m.value.ln())
        }
        IdentificationIndex::HypothesisTest { w_star } => {
            let settles_inside = w.difference(w_star)?.has_no_interior()?;
            let settles_outside = w.intersect(w_star).has_no_interior()?;
            Ok(if settles_inside || settles_outside { 1.0 } else { 0.0 })
        }
        IdentificationIndex::Promotion { payoff } => {
            let draws = prior.sample(cfg.n_samples)?;
            let n = draws.len() as f64;
            let mut take = 0.0;
            let mut pass = 0.0;
            for u in &draws {
                if w.contains(u, cfg.tie_tol) {
                    take += payoff(true, u) / n;
                    pass += payoff(false, u) / n;
                }
            }
            Ok(take.max(pass))
        }
        IdentificationIndex::Table(table) | IdentificationIndex::BeliefFreeNu(table) => {
            let key = table.resolve(w, prior, cfg)?;
            table
                .value_of(&key)
                .ok_or_else(|| ValuationError::UnknownCell(format!("no value for {key:?}")))
        }
    }
}

/// Per-cell contribution inside one atom's valuation.
#[derive(Debug, Clone, Serialize)]
pub struct CellValue {
    pub cell: usize,
    pub mass: f64,
    pub mass_std_error: f64,
    pub tau: f64,
    pub contribution: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AtomValue {
    pub weight: f64,
    pub value: f64,
    pub std_error: f64,
    pub cells: Vec<CellValue>,
}

/// An expected-identification-value result with its error estimate and the
/// full per-atom, per-cell breakdown.
#[derive(Debug, Clone, Serialize)]
pub struct EivValue {
    pub value: f64,
    pub std_error: f64,
    pub atoms: Vec<AtomValue>,
}

/// Expected identification value of a randomized experiment: per atom the
/// sum over positive-mass cells of index times mass (or the bare index sum
/// in belief-free mode), then the weight-averaged total. Null cells are
/// stripped before the index ever sees them.
pub fn eiv(
    pi: &RandomizedExperiment,
    index: &IdentificationIndex,
    prior: &PriorModel,
    cfg: &EvalConfig,
) -> Result<EivValue, ValuationError> {
    let mut atoms = Vec::new();
    let mut value = 0.0;
    let mut var = 0.0;
    for (e, weight) in pi.atoms() {
        let fam = identified_family(e, prior, cfg)?;
        let positive = fam.positive_cells(cfg);
        let mut cells = Vec::new();
        let mut v_atom = 0.0;
        let mut var_atom = 0.0;
        for k in positive {
            let (w, m) = &fam.cells[k];
            let t = tau(index, w, prior, cfg)?;
            let contribution = if index.is_belief_free() { t } else { t * m.value };
            v_atom += contribution;
            if !m.exact && !index.is_belief_free() {
                // first-order error propagation through the mass estimate
                let sensitivity = match index {
                    IdentificationIndex::Entropy => (m.value.ln() + 1.0).abs(),
                    _ => t.abs(),
                };
                var_atom += (sensitivity * m.std_error).powi(2);
            }
            cells.push(CellValue {
                cell: k,
                mass: m.value,
                mass_std_error: m.std_error,
                tau: t,
                contribution,
            });
        }
        value += weight * v_atom;
        var += (weight * var_atom.sqrt()).powi(2);
        atoms.push(AtomValue {
            weight: *weight,
            value: v_atom,
            std_error: var_atom.sqrt(),
            cells,
        });
    }
    Ok(EivValue { value, std_error: var.sqrt(), atoms })
}

/// One violation found by `verify_t1`.
#[derive(Debug, Clone, Serialize)]
pub struct T1Witness {
    pub trial: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct T1Report {
    pub trials: usize,
    pub checked: usize,
    pub violations: Vec<T1Witness>,
}

impl T1Report {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Spot-check that the index never prices refinement negatively: for random
/// nested pairs `W` inside `V` built from menu cells (or, for table
/// indices, from the table's own partition),
/// `tau(W) mass(W|V) + tau(V \ W) (1 - mass(W|V)) >= tau(V) - tol`,
/// with equality when the refinement is null.
pub fn verify_t1(
    index: &IdentificationIndex,
    prior: &PriorModel,
    trials: usize,
    seed: u64,
    tol: f64,
    cfg: &EvalConfig,
) -> Result<T1Report, ValuationError> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let mut checked = 0;

    for trial in 0..trials {
        let (w, v_rest, detail) = match index {
            IdentificationIndex::Table(t) | IdentificationIndex::BeliefFreeNu(t) => {
                nested_pair_from_cells(&mut rng, t.partition(), "table cell")
            }
            _ => {
                let n_points = rng.random_range(3..7);
                let menu = crate::gen::random_menu(&mut rng, 3, n_points);
                let cells: Vec<ConeUnion> = (0..menu.len())
                    .map(|i| ConeUnion::from_menu_cell(&menu, &[i]))
                    .collect();
                nested_pair_from_cells(&mut rng, &cells, "menu cell")
            }
        };
        let v = w.union(&v_rest);
        let mv = prior.measure(&v, cfg)?.value;
        if mv <= cfg.exact_tol {
            continue; // degenerate V, nothing to test
        }
        let mw = prior.measure(&w, cfg)?.value;
        let cond = mw / mv;
        let tau_v = tau(index, &v, prior, cfg)?;
        // null parts carry coefficient zero and are never priced
        let lhs = if mw <= cfg.exact_tol {
            tau(index, &v_rest, prior, cfg)? * (1.0 - cond)
        } else if (mv - mw).abs() <= cfg.exact_tol {
            tau(index, &w, prior, cfg)? * cond
        } else {
            let tau_w = tau(index, &w, prior, cfg)?;
            let tau_rest = tau(index, &v_rest, prior, cfg)?;
            tau_w * cond + tau_rest * (1.0 - cond)
        };
        checked += 1;
        let equality_required = mw <= cfg.exact_tol;
        let bad = if equality_required {
            (lhs - tau_v).abs() > tol
        } else {
            lhs < tau_v - tol
        };
        if bad {
            violations.push(T1Witness { trial, lhs, rhs: tau_v, detail });
        }
    }
    Ok(T1Report { trials, checked, violations })
}

/// Draw disjoint nested material from a family of cells: `W` is a union of
/// some cells, the rest of `V` a union of further disjoint ones.
fn nested_pair_from_cells(
    rng: &mut StdRng,
    cells: &[ConeUnion],
    what: &str,
) -> (ConeUnion, ConeUnion, String) {
    let dim = cells.first().map(|c| c.dim()).unwrap_or(3);
    let n = cells.len();
    let mut w = ConeUnion::empty(dim);
    let mut rest = ConeUnion::empty(dim);
    let mut w_ids = Vec::new();
    let mut rest_ids = Vec::new();
    for (i, cell) in cells.iter().enumerate() {
        match rng.random_range(0..3) {
            0 => {
                w = w.union(cell);
                w_ids.push(i);
            }
            1 => {
                rest = rest.union(cell);
                rest_ids.push(i);
            }
            _ => {}
        }
    }
    if w_ids.is_empty() {
        let i = rng.random_range(0..n);
        w = w.union(&cells[i]);
        w_ids.push(i);
        rest_ids.retain(|&j| j != i);
        if rest_ids.len() < rest.cones().len() {
            // rebuild rest without the stolen cell
            rest = ConeUnion::empty(dim);
            for &j in &rest_ids {
                rest = rest.union(&cells[j]);
            }
        }
    }
    (w, rest, format!("{what}s W={w_ids:?} extra={rest_ids:?}"))
}

/// A finite probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(entries: Vec<f64>) -> Result<Self, ValuationError> {
        if entries.is_empty() {
            return Err(ValuationError::BadProbVector("empty".into()));
        }
        if entries.iter().any(|&p| !(0.0..=1.0 + 1e-12).contains(&p)) {
            return Err(ValuationError::BadProbVector("entry outside [0, 1]".into()));
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(ValuationError::BadProbVector(format!("sum {sum}")));
        }
        Ok(ProbVector(entries))
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    /// Reduction of a compound lottery: marginal `p` over conditionals.
    pub fn compound(
        p: &ProbVector,
        conditionals: &[ProbVector],
    ) -> Result<ProbVector, ValuationError> {
        if conditionals.len() != p.0.len() {
            return Err(ValuationError::BadProbVector(
                "conditional count must match marginal length".into(),
            ));
        }
        let mut out = Vec::new();
        for (pi, q) in p.0.iter().zip(conditionals) {
            for qj in &q.0 {
                out.push(pi * qj);
            }
        }
        ProbVector::new(out)
    }
}

/// Shannon entropy in nats, with `0 log 0 = 0`.
pub fn eta(p: &ProbVector) -> f64 {
    p.0.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}
