//! Prior models over utility directions: deterministic samplers, measure
//! estimation for cone unions, conditionals, and the exact arc oracle for
//! three outcomes.

pub mod arc;

use crate::config::{EvalConfig, PathPolicy};
use crate::geometry::{ConeUnion, GeometryError, UtilityDirection};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PriorError {
    #[error("conditioning event has measure zero")]
    ConditioningOnNull,
    #[error("tie rate {rate} exceeds the abort threshold {limit}; prior is not regular for this menu")]
    TieRateExceeded { rate: f64, limit: f64 },
    #[error("rejection sampling failed to hit a mixture patch after {0} draws")]
    PatchRejectionLimit(usize),
    #[error("exact path requested but unavailable for this prior")]
    ExactUnavailable,
    #[error("invalid prior: {0}")]
    BadParams(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// How the prior distributes mass over the utility sphere.
#[derive(Debug, Clone)]
pub enum PriorKind {
    /// Uniform on the unit sphere of the zero-sum hyperplane.
    UniformSphere { dim: usize },
    /// Weighted mixture of uniform-sphere patches, each a cone-union region
    /// sampled by rejection.
    Mixture { dim: usize, patches: Vec<(f64, ConeUnion)> },
    /// A fixed list of directions with equal weight.
    Empirical { samples: Vec<UtilityDirection> },
}

/// A prior over utility directions with a deterministic, seeded sampler.
///
/// Each sample index gets its own random substream, so results are
/// bit-identical regardless of batching or thread count.
#[derive(Debug, Clone)]
pub struct PriorModel {
    kind: PriorKind,
    seed: u64,
}

/// A measure value with its sampling error. `exact` marks values from the
/// arc oracle, which carry no sampling error at all.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub exact: bool,
}

impl MeasureEstimate {
    pub fn exact(value: f64) -> Self {
        MeasureEstimate { value, std_error: 0.0, n_samples: 0, exact: true }
    }

    pub fn from_counts(hits: usize, n: usize) -> Self {
        let p = hits as f64 / n as f64;
        MeasureEstimate {
            value: p,
            std_error: (p * (1.0 - p) / n as f64).sqrt(),
            n_samples: n,
            exact: false,
        }
    }
}

const PATCH_REJECTION_LIMIT: usize = 100_000;

impl PriorModel {
    pub fn uniform(dim: usize, seed: u64) -> Self {
        PriorModel { kind: PriorKind::UniformSphere { dim }, seed }
    }

    pub fn empirical(samples: Vec<UtilityDirection>, seed: u64) -> Result<Self, PriorError> {
        if samples.is_empty() {
            return Err(PriorError::BadParams("empirical prior needs samples".into()));
        }
        let dim = samples[0].dim();
        if samples.iter().any(|s| s.dim() != dim) {
            return Err(PriorError::BadParams("mixed dimensions in empirical samples".into()));
        }
        Ok(PriorModel { kind: PriorKind::Empirical { samples }, seed })
    }

    pub fn mixture(
        dim: usize,
        patches: Vec<(f64, ConeUnion)>,
        seed: u64,
    ) -> Result<Self, PriorError> {
        if patches.is_empty() {
            return Err(PriorError::BadParams("mixture prior needs patches".into()));
        }
        let total: f64 = patches.iter().map(|(w, _)| w).sum();
        if patches.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(PriorError::BadParams("patch weights must be non-negative and sum to one".into()));
        }
        Ok(PriorModel { kind: PriorKind::Mixture { dim, patches }, seed })
    }

    pub fn kind(&self) -> &PriorKind {
        &self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            PriorKind::UniformSphere { dim } => *dim,
            PriorKind::Mixture { dim, .. } => *dim,
            PriorKind::Empirical { samples } => samples[0].dim(),
        }
    }

    /// True when measures of cone unions can be computed exactly.
    pub fn supports_exact(&self) -> bool {
        matches!(&self.kind, PriorKind::UniformSphere { dim: 3 })
    }

    fn use_exact(&self, cfg: &EvalConfig) -> Result<bool, PriorError> {
        match cfg.path {
            PathPolicy::PreferExact => Ok(self.supports_exact()),
            PathPolicy::RequireExact => {
                if self.supports_exact() {
                    Ok(true)
                } else {
                    Err(PriorError::ExactUnavailable)
                }
            }
            PathPolicy::ForceMonteCarlo => Ok(false),
        }
    }

    /// The `i`-th draw. Deterministic in `(seed, i)` alone.
    pub fn sample_at(&self, i: usize) -> Result<UtilityDirection, PriorError> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(i as u64);
        match &self.kind {
            PriorKind::UniformSphere { dim } => Ok(sphere_draw(&mut rng, *dim)),
            PriorKind::Empirical { samples } => {
                let j = rng.random_range(0..samples.len());
                Ok(samples[j].clone())
            }
            PriorKind::Mixture { dim, patches } => {
                let mut pick = rng.random_range(0.0..1.0);
                let mut region = &patches[patches.len() - 1].1;
                for (w, r) in patches {
                    if pick < *w {
                        region = r;
                        break;
                    }
                    pick -= w;
                }
                for _ in 0..PATCH_REJECTION_LIMIT {
                    let u = sphere_draw(&mut rng, *dim);
                    if region.contains(&u, 0.0) {
                        return Ok(u);
                    }
                }
                Err(PriorError::PatchRejectionLimit(PATCH_REJECTION_LIMIT))
            }
        }
    }

    /// `n` i.i.d. draws. For an empirical prior with `n` equal to the stored
    /// sample count, the stored set itself is returned (no bootstrap).
    pub fn sample(&self, n: usize) -> Result<Vec<UtilityDirection>, PriorError> {
        if let PriorKind::Empirical { samples } = &self.kind {
            if n == samples.len() {
                return Ok(samples.clone());
            }
        }
        (0..n).map(|i| self.sample_at(i)).collect()
    }

    /// Prior mass of a cone union.
    pub fn measure(
        &self,
        w: &ConeUnion,
        cfg: &EvalConfig,
    ) -> Result<MeasureEstimate, PriorError> {
        if self.use_exact(cfg)? {
            return Ok(MeasureEstimate::exact(arc::union_arcs(w).measure()));
        }
        let draws = self.measure_draws(cfg.n_samples)?;
        let hits = draws.iter().filter(|u| w.contains(u, cfg.tie_tol)).count();
        Ok(MeasureEstimate::from_counts(hits, draws.len()))
    }

    /// Conditional mass of `w` given `v`.
    pub fn conditional_measure(
        &self,
        w: &ConeUnion,
        v: &ConeUnion,
        cfg: &EvalConfig,
    ) -> Result<MeasureEstimate, PriorError> {
        if self.use_exact(cfg)? {
            let vm = arc::union_arcs(v).total();
            if vm <= arc::ANG_TOL {
                return Err(PriorError::ConditioningOnNull);
            }
            let wm = arc::union_arcs(&w.intersect(v)).total();
            return Ok(MeasureEstimate::exact((wm / vm).clamp(0.0, 1.0)));
        }
        let draws = self.measure_draws(cfg.n_samples)?;
        let mut in_v = 0usize;
        let mut in_both = 0usize;
        for u in &draws {
            if v.contains(u, cfg.tie_tol) {
                in_v += 1;
                if w.contains(u, cfg.tie_tol) {
                    in_both += 1;
                }
            }
        }
        if in_v == 0 {
            return Err(PriorError::ConditioningOnNull);
        }
        Ok(MeasureEstimate::from_counts(in_both, in_v))
    }

    /// Measures of the cells of a partition of utility space, classifying
    /// every draw into the first cell containing it. A draw within the
    /// membership tolerance of two or more cells counts as a tie; the run
    /// aborts when ties exceed the configured rate.
    pub fn measure_cells(
        &self,
        cells: &[ConeUnion],
        cfg: &EvalConfig,
    ) -> Result<(Vec<MeasureEstimate>, usize), PriorError> {
        if self.use_exact(cfg)? {
            let out = cells
                .iter()
                .map(|c| MeasureEstimate::exact(arc::union_arcs(c).measure()))
                .collect();
            return Ok((out, 0));
        }
        let draws = self.measure_draws(cfg.n_samples)?;
        let n = draws.len();
        let mut hits = vec![0usize; cells.len()];
        let mut ties = 0usize;
        for u in &draws {
            let mut matched: Option<usize> = None;
            let mut multi = false;
            for (k, cell) in cells.iter().enumerate() {
                if cell.contains(u, cfg.tie_tol) {
                    if matched.is_none() {
                        matched = Some(k);
                    } else {
                        multi = true;
                    }
                }
            }
            if let Some(k) = matched {
                hits[k] += 1;
            }
            if multi {
                ties += 1;
            }
        }
        let rate = ties as f64 / n as f64;
        if rate > cfg.tie_rate_abort {
            return Err(PriorError::TieRateExceeded { rate, limit: cfg.tie_rate_abort });
        }
        Ok((hits.iter().map(|&h| MeasureEstimate::from_counts(h, n)).collect(), ties))
    }

    /// Draws used for measure estimation: the full stored set for an
    /// empirical prior, `n` substream draws otherwise.
    fn measure_draws(&self, n: usize) -> Result<Vec<UtilityDirection>, PriorError> {
        match &self.kind {
            PriorKind::Empirical { samples } => Ok(samples.clone()),
            _ => self.sample(n),
        }
    }
}

/// One uniform draw from the unit sphere of the zero-sum hyperplane:
/// i.i.d. normals (Box-Muller), projected and normalized.
fn sphere_draw(rng: &mut ChaCha8Rng, dim: usize) -> UtilityDirection {
    loop {
        let mut raw = Vec::with_capacity(dim + 1);
        while raw.len() < dim {
            let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.random_range(0.0..1.0);
            let r = (-2.0 * u1.ln()).sqrt();
            raw.push(r * (std::f64::consts::TAU * u2).cos());
            raw.push(r * (std::f64::consts::TAU * u2).sin());
        }
        raw.truncate(dim);
        if let Ok(u) = UtilityDirection::new(raw) {
            return u;
        }
    }
}

// --- JSON form ------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum PriorDto {
    Uniform {
        l: usize,
        seed: u64,
    },
    Empirical {
        samples: Vec<Vec<f64>>,
        #[serde(default)]
        seed: u64,
    },
    Mixture {
        l: usize,
        seed: u64,
        patches: Vec<PatchDto>,
    },
}

#[derive(Serialize, Deserialize)]
struct PatchDto {
    weight: f64,
    region: ConeUnion,
}

impl Serialize for PriorModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let dto = match &self.kind {
            PriorKind::UniformSphere { dim } => PriorDto::Uniform { l: *dim, seed: self.seed },
            PriorKind::Empirical { samples } => PriorDto::Empirical {
                samples: samples.iter().map(|u| u.coords().to_vec()).collect(),
                seed: self.seed,
            },
            PriorKind::Mixture { dim, patches } => PriorDto::Mixture {
                l: *dim,
                seed: self.seed,
                patches: patches
                    .iter()
                    .map(|(w, r)| PatchDto { weight: *w, region: r.clone() })
                    .collect(),
            },
        };
        dto.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PriorModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let dto = PriorDto::deserialize(d)?;
        let model = match dto {
            PriorDto::Uniform { l, seed } => PriorModel::uniform(l, seed),
            PriorDto::Empirical { samples, seed } => {
                let dirs = samples
                    .into_iter()
                    .map(UtilityDirection::new)
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(serde::de::Error::custom)?;
                PriorModel::empirical(dirs, seed).map_err(serde::de::Error::custom)?
            }
            PriorDto::Mixture { l, seed, patches } => {
                let patches = patches.into_iter().map(|p| (p.weight, p.region)).collect();
                PriorModel::mixture(l, patches, seed).map_err(serde::de::Error::custom)?
            }
        };
        Ok(model)
    }
}
