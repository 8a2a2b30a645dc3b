//! Convex geometry over the lottery simplex and the utility sphere.
//!
//! Lotteries live in the probability simplex of `R^l`; linear utilities are
//! canonicalized to zero-sum unit vectors so that each affine utility class
//! has exactly one representative. Menus are finite lottery sets, and the
//! identification machinery is built on normal cones of menus at their
//! points.

mod cone;

pub use cone::{
    cone_contains, cone_equal, cone_is_empty_interior, enumerate_faces, extreme_indices,
    extreme_points, normal_cone, normal_cone_at, relative_interior_point, ConeOrigin, ConeUnion,
    Face, Halfspace, PolyCone,
};

use crate::lp::LpError;
use serde::de::{SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Tolerance for point deduplication and simplex/normalization checks.
pub const EPS_GEOM: f64 = 1e-9;

/// Slack threshold below which an LP feasibility answer counts as empty.
pub const DELTA_STRICT: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("lottery needs at least two outcomes, got {0}")]
    TooFewOutcomes(usize),
    #[error("lottery coordinates must be non-negative and sum to one (got sum {sum}, min {min})")]
    NotAProbability { sum: f64, min: f64 },
    #[error("menu must contain at least one lottery")]
    EmptyMenu,
    #[error("menu points {0} and {1} coincide within tolerance")]
    DuplicatePoint(usize, usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("utility direction is numerically zero after projection")]
    ZeroDirection,
    #[error("point is not a member of the menu")]
    PointNotInMenu,
    #[error("mixture weight {0} outside [0, 1]")]
    BadWeight(f64),
    #[error("mixture weights must sum to one (got {0})")]
    BadWeightSum(f64),
    #[error("label count {0} does not match point count {1}")]
    BadLabels(usize, usize),
    #[error("linear program failed: {0}")]
    Lp(#[from] LpError),
}

/// A probability vector over `l` outcomes, stored renormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct Lottery {
    coords: Vec<f64>,
}

impl Lottery {
    pub fn new(coords: Vec<f64>) -> Result<Self, GeometryError> {
        if coords.len() < 2 {
            return Err(GeometryError::TooFewOutcomes(coords.len()));
        }
        let sum: f64 = coords.iter().sum();
        let min = coords.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(sum.is_finite()) || (sum - 1.0).abs() > 1e-6 || min < -EPS_GEOM {
            return Err(GeometryError::NotAProbability { sum, min });
        }
        let mut c: Vec<f64> = coords.iter().map(|&v| v.max(0.0)).collect();
        let s: f64 = c.iter().sum();
        for v in &mut c {
            *v /= s;
        }
        Ok(Lottery { coords: c })
    }

    /// Degenerate lottery putting all mass on `outcome`.
    pub fn point_mass(dim: usize, outcome: usize) -> Self {
        let mut c = vec![0.0; dim];
        c[outcome] = 1.0;
        Lottery { coords: c }
    }

    /// Convex combination `alpha self + (1 - alpha) other`.
    pub fn mix(&self, alpha: f64, other: &Lottery) -> Lottery {
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
            .collect();
        Lottery { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn distance(&self, other: &Lottery) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl Serialize for Lottery {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.coords.len()))?;
        for v in &self.coords {
            seq.serialize_element(v)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Lottery {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(d)?;
        Lottery::new(coords).map_err(serde::de::Error::custom)
    }
}

/// A decision problem: a finite, duplicate-free, ordered set of lotteries.
#[derive(Debug, Clone, PartialEq)]
pub struct Menu {
    points: Vec<Lottery>,
    labels: Option<Vec<String>>,
}

impl Menu {
    pub fn new(points: Vec<Lottery>) -> Result<Self, GeometryError> {
        if points.is_empty() {
            return Err(GeometryError::EmptyMenu);
        }
        let dim = points[0].dim();
        for p in &points {
            if p.dim() != dim {
                return Err(GeometryError::DimensionMismatch(dim, p.dim()));
            }
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if points[i].distance(&points[j]) < EPS_GEOM {
                    return Err(GeometryError::DuplicatePoint(i, j));
                }
            }
        }
        Ok(Menu { points, labels: None })
    }

    pub fn with_labels(points: Vec<Lottery>, labels: Vec<String>) -> Result<Self, GeometryError> {
        if labels.len() != points.len() {
            return Err(GeometryError::BadLabels(labels.len(), points.len()));
        }
        let mut menu = Menu::new(points)?;
        menu.labels = Some(labels);
        Ok(menu)
    }

    /// Convenience constructor from raw probability vectors.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, GeometryError> {
        let points = rows
            .iter()
            .map(|r| Lottery::new(r.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        Menu::new(points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn point(&self, i: usize) -> &Lottery {
        &self.points[i]
    }

    pub fn points(&self) -> &[Lottery] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(ls) => ls[i].clone(),
            None => format!("p{i}"),
        }
    }

    /// Index of the menu point equal to `x` within tolerance.
    pub fn position_of(&self, x: &Lottery) -> Option<usize> {
        self.points.iter().position(|p| p.distance(x) < EPS_GEOM)
    }

    /// Restrict to a subset of indices, keeping labels.
    pub fn select(&self, indices: &[usize]) -> Result<Menu, GeometryError> {
        let points: Vec<Lottery> = indices.iter().map(|&i| self.points[i].clone()).collect();
        match &self.labels {
            Some(ls) => {
                let labels = indices.iter().map(|&i| ls[i].clone()).collect();
                Menu::with_labels(points, labels)
            }
            None => Menu::new(points),
        }
    }
}

impl Serialize for Menu {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.points.len()))?;
        for p in &self.points {
            seq.serialize_element(p)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Menu {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct MenuVisitor;
        impl<'de> Visitor<'de> for MenuVisitor {
            type Value = Menu;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a sequence of probability vectors")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Menu, A::Error> {
                let mut points = Vec::new();
                while let Some(p) = seq.next_element::<Lottery>()? {
                    points.push(p);
                }
                Menu::new(points).map_err(serde::de::Error::custom)
            }
        }
        d.deserialize_seq(MenuVisitor)
    }
}

/// A linear utility canonicalized to the zero-sum hyperplane with unit norm.
///
/// Adding constants or rescaling by a positive factor never changes choices,
/// so this picks one representative per equivalence class of affine
/// utilities.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityDirection {
    coords: Vec<f64>,
}

impl UtilityDirection {
    pub fn new(raw: Vec<f64>) -> Result<Self, GeometryError> {
        if raw.len() < 2 {
            return Err(GeometryError::TooFewOutcomes(raw.len()));
        }
        let mean: f64 = raw.iter().sum::<f64>() / raw.len() as f64;
        let mut c: Vec<f64> = raw.iter().map(|v| v - mean).collect();
        let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(GeometryError::ZeroDirection);
        }
        for v in &mut c {
            *v /= norm;
        }
        Ok(UtilityDirection { coords: c })
    }

    /// Orthonormal basis of the zero-sum plane for three outcomes.
    fn basis3() -> ([f64; 3], [f64; 3]) {
        let s2 = 2.0_f64.sqrt();
        let s6 = 6.0_f64.sqrt();
        ([1.0 / s2, -1.0 / s2, 0.0], [1.0 / s6, 1.0 / s6, -2.0 / s6])
    }

    /// Point of the utility circle at `theta` (three outcomes only).
    pub fn from_angle(theta: f64) -> UtilityDirection {
        let (e1, e2) = Self::basis3();
        let (c, s) = (theta.cos(), theta.sin());
        UtilityDirection {
            coords: vec![
                c * e1[0] + s * e2[0],
                c * e1[1] + s * e2[1],
                c * e1[2] + s * e2[2],
            ],
        }
    }

    /// Angle on the utility circle (three outcomes only), in `[0, 2pi)`.
    pub fn to_angle(&self) -> f64 {
        debug_assert_eq!(self.coords.len(), 3);
        let (e1, e2) = Self::basis3();
        let c = self.coords.iter().zip(e1).map(|(u, e)| u * e).sum::<f64>();
        let s = self.coords.iter().zip(e2).map(|(u, e)| u * e).sum::<f64>();
        let a = s.atan2(c);
        if a < 0.0 {
            a + std::f64::consts::TAU
        } else {
            a
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Expected utility of a lottery.
    pub fn value(&self, x: &Lottery) -> f64 {
        self.coords.iter().zip(x.coords()).map(|(u, p)| u * p).sum()
    }

    pub fn dot(&self, v: &[f64]) -> f64 {
        self.coords.iter().zip(v).map(|(u, w)| u * w).sum()
    }
}

impl Serialize for UtilityDirection {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.coords.len()))?;
        for v in &self.coords {
            seq.serialize_element(v)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for UtilityDirection {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(d)?;
        UtilityDirection::new(coords).map_err(serde::de::Error::custom)
    }
}

/// Result of an argmax query over a menu.
#[derive(Debug, Clone, PartialEq)]
pub struct ArgmaxResult {
    pub indices: Vec<usize>,
    pub tie: bool,
}

/// Indices of menu points within `tol` of the best expected utility.
pub fn argmax_set(u: &UtilityDirection, menu: &Menu, tol: f64) -> ArgmaxResult {
    let values: Vec<f64> = menu.points().iter().map(|p| u.value(p)).collect();
    let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let indices: Vec<usize> = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= best - tol)
        .map(|(i, _)| i)
        .collect();
    let tie = indices.len() >= 2;
    ArgmaxResult { indices, tie }
}

/// A mixed menu with the provenance of every output point.
///
/// `parents[k]` lists, for output point `k`, every tuple of source indices
/// (one per input menu) whose weighted combination lands on that point.
/// Points with more than one tuple are ambiguous decompositions.
#[derive(Debug, Clone)]
pub struct Mixture {
    pub menu: Menu,
    pub parents: Vec<Vec<Vec<usize>>>,
}

/// Weighted Minkowski combination of several menus.
pub fn minkowski_mix(weights: &[f64], menus: &[&Menu]) -> Result<Mixture, GeometryError> {
    if menus.is_empty() {
        return Err(GeometryError::EmptyMenu);
    }
    if weights.len() != menus.len() {
        return Err(GeometryError::DimensionMismatch(weights.len(), menus.len()));
    }
    let dim = menus[0].dim();
    for m in menus {
        if m.dim() != dim {
            return Err(GeometryError::DimensionMismatch(dim, m.dim()));
        }
    }
    for &w in weights {
        if !(0.0..=1.0 + EPS_GEOM).contains(&w) {
            return Err(GeometryError::BadWeight(w));
        }
    }
    let wsum: f64 = weights.iter().sum();
    if (wsum - 1.0).abs() > 1e-9 {
        return Err(GeometryError::BadWeightSum(wsum));
    }

    let mut points: Vec<Lottery> = Vec::new();
    let mut parents: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut tuple = vec![0usize; menus.len()];
    loop {
        let mut coords = vec![0.0; dim];
        for (k, menu) in menus.iter().enumerate() {
            let p = menu.point(tuple[k]);
            for (d, c) in coords.iter_mut().enumerate() {
                *c += weights[k] * p.coords()[d];
            }
        }
        let point = Lottery::new(coords).expect("convex combination stays in the simplex");
        match points.iter().position(|q| q.distance(&point) < EPS_GEOM) {
            Some(i) => parents[i].push(tuple.clone()),
            None => {
                points.push(point);
                parents.push(vec![tuple.clone()]);
            }
        }
        // advance the index tuple
        let mut k = 0;
        loop {
            tuple[k] += 1;
            if tuple[k] < menus[k].len() {
                break;
            }
            tuple[k] = 0;
            k += 1;
            if k == menus.len() {
                let menu = Menu::new(points)?;
                return Ok(Mixture { menu, parents });
            }
        }
    }
}

/// Two-menu convex mixture `alpha A + (1 - alpha) B`.
pub fn mix_menus(alpha: f64, a: &Menu, b: &Menu) -> Result<Mixture, GeometryError> {
    minkowski_mix(&[alpha, 1.0 - alpha], &[a, b])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex_vertices() -> Menu {
        Menu::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap()
    }

    #[test]
    fn lottery_renormalizes() {
        let l = Lottery::new(vec![0.5, 0.5 + 3e-10, -3e-10]).unwrap();
        let sum: f64 = l.coords().iter().sum();
        assert_eq!(sum, 1.0);
        assert!(l.coords()[2] >= 0.0);
    }

    #[test]
    fn lottery_rejects_bad_sum() {
        assert!(Lottery::new(vec![0.5, 0.6]).is_err());
        assert!(Lottery::new(vec![0.5, 0.6, -0.1]).is_err());
    }

    #[test]
    fn menu_rejects_duplicates() {
        let err = Menu::from_rows(&[vec![0.5, 0.5, 0.0], vec![0.5, 0.5, 1e-12]]);
        assert!(matches!(err, Err(GeometryError::DuplicatePoint(0, 1))));
    }

    #[test]
    fn direction_is_canonical() {
        let u = UtilityDirection::new(vec![5.0, 3.0, 1.0]).unwrap();
        let sum: f64 = u.coords().iter().sum();
        let norm: f64 = u.coords().iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(sum.abs() < 1e-12);
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn angle_round_trip() {
        for k in 0..24 {
            let theta = k as f64 * std::f64::consts::TAU / 24.0;
            let u = UtilityDirection::from_angle(theta);
            let back = u.to_angle();
            let diff = (back - theta).abs();
            assert!(diff < 1e-9 || (diff - std::f64::consts::TAU).abs() < 1e-9);
        }
    }

    #[test]
    fn argmax_picks_vertex() {
        let menu = simplex_vertices();
        let u = UtilityDirection::new(vec![1.0, 0.0, 0.0]).unwrap();
        let r = argmax_set(&u, &menu, 1e-12);
        assert_eq!(r.indices, vec![0]);
        assert!(!r.tie);
    }

    #[test]
    fn ties_never_show_up_at_machine_tolerance() {
        // a million uniform directions against the simplex vertices: the
        // tie set is three zero-length arcs, so the observed frequency is
        // exactly zero
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let menu = simplex_vertices();
        let mut rng = StdRng::seed_from_u64(123);
        let mut ties = 0usize;
        for _ in 0..1_000_000 {
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            let u = UtilityDirection::from_angle(theta);
            if argmax_set(&u, &menu, 1e-12).tie {
                ties += 1;
            }
        }
        assert_eq!(ties, 0);
    }

    #[test]
    fn argmax_singleton_menu() {
        let menu = Menu::from_rows(&[vec![1.0, 0.0, 0.0]]).unwrap();
        let u = UtilityDirection::new(vec![0.0, 1.0, -1.0]).unwrap();
        let r = argmax_set(&u, &menu, 1e-12);
        assert_eq!(r.indices, vec![0]);
    }

    #[test]
    fn mix_alpha_one_is_identity() {
        let a = simplex_vertices();
        let b = Menu::from_rows(&[vec![0.6, 0.4, 0.0], vec![0.2, 0.2, 0.6]]).unwrap();
        let mixed = mix_menus(1.0, &a, &b).unwrap();
        assert_eq!(mixed.menu.len(), a.len());
        for i in 0..a.len() {
            assert!(mixed.menu.point(i).distance(a.point(i)) < 1e-12);
            // every b-parent collapses onto the same output point
            assert_eq!(mixed.parents[i].len(), b.len());
        }
    }

    #[test]
    fn mix_singletons() {
        let a = Menu::from_rows(&[vec![1.0, 0.0, 0.0]]).unwrap();
        let b = Menu::from_rows(&[vec![0.0, 1.0, 0.0]]).unwrap();
        let mixed = mix_menus(0.5, &a, &b).unwrap();
        assert_eq!(mixed.menu.len(), 1);
        assert!(mixed.menu.point(0).distance(&Lottery::new(vec![0.5, 0.5, 0.0]).unwrap()) < 1e-12);
    }

    #[test]
    fn battery_mix_has_hexagon_and_interior() {
        // Half/half mixture of a four-point menu and a two-point menu giving
        // six extreme points plus two interior ones.
        let a = Menu::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.5, 0.5, 0.0],
            vec![0.5, 0.0, 0.5],
            vec![0.0, 0.5, 0.5],
        ])
        .unwrap();
        let a2 = Menu::from_rows(&[vec![0.0, 0.6, 0.4], vec![0.0, 0.4, 0.6]]).unwrap();
        let mixed = mix_menus(0.5, &a, &a2).unwrap();
        assert_eq!(mixed.menu.len(), 8);
        for ps in &mixed.parents {
            assert_eq!(ps.len(), 1);
        }
    }

    #[test]
    fn ambiguous_mixture_points_are_never_extreme() {
        // when a mixed point decomposes two ways, it is the midpoint of the
        // two cross-decomposed points, so cell assignment by any parent is
        // irrelevant: the point identifies nothing on its own
        // the menus share a difference vector, so one cross pair collides
        let a = Menu::from_rows(&[vec![0.6, 0.3, 0.1], vec![0.4, 0.5, 0.1]]).unwrap();
        let b = Menu::from_rows(&[vec![0.2, 0.2, 0.6], vec![0.4, 0.0, 0.6]]).unwrap();
        let mixed = mix_menus(0.5, &a, &b).unwrap();
        let ambiguous: Vec<usize> = (0..mixed.menu.len())
            .filter(|&k| mixed.parents[k].len() > 1)
            .collect();
        assert!(!ambiguous.is_empty(), "construction should collide");
        let ext = crate::geometry::extreme_indices(&mixed.menu).unwrap();
        for k in ambiguous {
            assert!(!ext.contains(&k), "ambiguous point {k} is extreme");
        }
    }

    #[test]
    fn core_types_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<Lottery>();
        assert_send_sync::<Menu>();
        assert_send_sync::<UtilityDirection>();
        assert_send_sync::<super::PolyCone>();
        assert_send_sync::<super::ConeUnion>();
    }

    #[test]
    fn mixture_commutes_with_argmax() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..200 {
            let dim = 3;
            let rand_menu = |rng: &mut StdRng, n: usize| {
                let mut pts = Vec::new();
                while pts.len() < n {
                    let mut c: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..1.0)).collect();
                    let s: f64 = c.iter().sum();
                    c.iter_mut().for_each(|v| *v /= s);
                    let l = Lottery::new(c).unwrap();
                    if pts.iter().all(|p: &Lottery| p.distance(&l) > 1e-3) {
                        pts.push(l);
                    }
                }
                Menu::new(pts).unwrap()
            };
            let a = rand_menu(&mut rng, 3);
            let b = rand_menu(&mut rng, 3);
            let alpha = rng.random_range(0.05..0.95);
            let u = UtilityDirection::new((0..dim).map(|_| rng.random_range(-1.0..1.0)).collect());
            let Ok(u) = u else { continue };
            let ia = argmax_set(&u, &a, 0.0).indices[0];
            let ib = argmax_set(&u, &b, 0.0).indices[0];
            let mixed = mix_menus(alpha, &a, &b).unwrap();
            let best = a.point(ia).mix(alpha, b.point(ib));
            let k = mixed.menu.position_of(&best).unwrap();
            let am = argmax_set(&u, &mixed.menu, 1e-12);
            assert!(am.indices.contains(&k));
        }
    }
}
