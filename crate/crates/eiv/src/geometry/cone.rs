//! Polyhedral cones in utility space and the LP-backed predicates on them.
//!
//! Cones are kept in H-representation: a list of outward normals `g` each
//! meaning the halfspace `u . g <= 0`. Redundant halfspaces are not removed;
//! every predicate tolerates them. A halfspace may be flagged strict, which
//! is how relative interiors of cones are encoded (affine equalities become
//! opposite non-strict pairs, facet inequalities become strict).

use super::{GeometryError, Lottery, Menu, UtilityDirection, DELTA_STRICT};
use crate::lp::{self, Constraint, Outcome, Program};
use serde::{Deserialize, Serialize};

/// One halfspace `u . normal <= 0` (or `< 0` when `strict`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    #[serde(default)]
    pub strict: bool,
}

impl Halfspace {
    pub fn closed(normal: Vec<f64>) -> Self {
        Halfspace { normal, strict: false }
    }

    pub fn strict(normal: Vec<f64>) -> Self {
        Halfspace { normal, strict: true }
    }

    fn norm(&self) -> f64 {
        self.normal.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Signed slack of `u`, normalized so tolerances are scale-free.
    /// Negative values are inside the halfspace.
    fn margin(&self, u: &UtilityDirection) -> f64 {
        let n = self.norm();
        if n < 1e-14 {
            return 0.0; // vacuous constraint: u . 0 = 0
        }
        u.dot(&self.normal) / n
    }
}

/// A polyhedral cone `{u : u . g_k <= 0 for all k}` on the zero-sum
/// hyperplane. Contains the origin and is closed under positive scaling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyCone {
    dim: usize,
    halfspaces: Vec<Halfspace>,
}

impl PolyCone {
    pub fn new(dim: usize, halfspaces: Vec<Halfspace>) -> Self {
        PolyCone { dim, halfspaces }
    }

    /// The whole utility space: no constraints.
    pub fn whole_space(dim: usize) -> Self {
        PolyCone { dim, halfspaces: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn is_whole_space(&self) -> bool {
        self.halfspaces.is_empty()
    }

    /// Closed membership: every halfspace satisfied within `tol`, strict
    /// flags ignored. This is membership in the cone's closure.
    pub fn contains(&self, u: &UtilityDirection, tol: f64) -> bool {
        self.halfspaces.iter().all(|h| h.margin(u) <= tol)
    }

    /// Flag-aware membership: strict halfspaces must clear `-tol`, closed
    /// ones are allowed up to `+tol`. For relative-interior encodings this
    /// tests membership in the relative interior.
    pub fn contains_ri(&self, u: &UtilityDirection, tol: f64) -> bool {
        self.halfspaces.iter().all(|h| {
            if h.strict {
                h.margin(u) <= -tol
            } else {
                h.margin(u) <= tol
            }
        })
    }

    /// Worst (largest) normalized margin over all halfspaces; negative when
    /// strictly inside every one. Useful for boundary diagnostics.
    pub fn worst_margin(&self, u: &UtilityDirection) -> f64 {
        self.halfspaces
            .iter()
            .map(|h| h.margin(u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Intersection: concatenation of halfspace lists.
    pub fn intersect(&self, other: &PolyCone) -> PolyCone {
        let mut halfspaces = self.halfspaces.clone();
        halfspaces.extend(other.halfspaces.iter().cloned());
        PolyCone { dim: self.dim, halfspaces }
    }

    /// The complement as a finite union of (mostly strict) halfspace cones.
    pub fn complement_pieces(&self) -> Vec<PolyCone> {
        self.halfspaces
            .iter()
            .map(|h| {
                let flipped = Halfspace {
                    normal: h.normal.iter().map(|v| -v).collect(),
                    strict: !h.strict,
                };
                PolyCone { dim: self.dim, halfspaces: vec![flipped] }
            })
            .collect()
    }
}

/// LP over the zero-sum hyperplane with unit box bounds.
///
/// Builds `maximize objective . (u, s)` over `u` in the box intersected with
/// the hyperplane, where `s` is an optional extra slack variable appended to
/// `u`. All cone constraints are homogeneous, so any strictly feasible point
/// can be rescaled; the box just keeps the LP bounded.
fn zero_sum_program(dim: usize, with_slack: bool) -> Program {
    let n = dim + usize::from(with_slack);
    let mut constraints = Vec::new();
    let mut row = vec![0.0; n];
    for c in row.iter_mut().take(dim) {
        *c = 1.0;
    }
    constraints.push(Constraint::eq(row, 0.0));
    for i in 0..dim {
        let mut up = vec![0.0; n];
        up[i] = 1.0;
        constraints.push(Constraint::le(up, 1.0));
        let mut down = vec![0.0; n];
        down[i] = -1.0;
        constraints.push(Constraint::le(down, 1.0));
    }
    if with_slack {
        let mut cap = vec![0.0; n];
        cap[dim] = 1.0;
        constraints.push(Constraint::le(cap, 1.0));
    }
    Program { n_vars: n, objective: vec![0.0; n], constraints }
}

/// Maximize the common slack of the `strict` normals subject to the `closed`
/// normals and `equalities`. Returns a witness direction when the optimum
/// clears `DELTA_STRICT`.
///
/// With no strict normals the slack objective is uninformative, so the
/// routine instead probes the coordinate directions for any point of norm
/// at least `DELTA_STRICT` (valid because all constraints are homogeneous).
pub(crate) fn strict_feasible_point(
    dim: usize,
    strict: &[&[f64]],
    closed: &[&[f64]],
    equalities: &[&[f64]],
) -> Result<Option<UtilityDirection>, GeometryError> {
    let push_rows = |p: &mut Program, with_slack: bool| {
        let n = dim + usize::from(with_slack);
        for g in closed {
            let mut row = vec![0.0; n];
            row[..dim].copy_from_slice(g);
            p.constraints.push(Constraint::le(row, 0.0));
        }
        for g in equalities {
            let mut row = vec![0.0; n];
            row[..dim].copy_from_slice(g);
            p.constraints.push(Constraint::eq(row, 0.0));
        }
    };

    if strict.is_empty() {
        for d in 0..dim {
            for sign in [1.0, -1.0] {
                let mut p = zero_sum_program(dim, false);
                push_rows(&mut p, false);
                p.objective[d] = sign;
                if let Outcome::Optimal { value, point } = lp::solve(&p)? {
                    if value >= DELTA_STRICT {
                        if let Ok(u) = UtilityDirection::new(point) {
                            return Ok(Some(u));
                        }
                    }
                }
            }
        }
        return Ok(None);
    }

    let mut p = zero_sum_program(dim, true);
    push_rows(&mut p, true);
    for g in strict {
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut row = vec![0.0; dim + 1];
        row[..dim].copy_from_slice(g);
        // degenerate normals make the strict side empty on the hyperplane
        if norm < 1e-14 {
            return Ok(None);
        }
        row[dim] = norm;
        p.constraints.push(Constraint::le(row, 0.0));
    }
    p.objective[dim] = 1.0;
    match lp::solve(&p)? {
        Outcome::Optimal { value, point } if value >= DELTA_STRICT => {
            let u = UtilityDirection::new(point[..dim].to_vec())
                .map_err(|_| GeometryError::ZeroDirection)?;
            Ok(Some(u))
        }
        Outcome::Optimal { .. } | Outcome::Infeasible => Ok(None),
        Outcome::Unbounded => Ok(None), // cannot happen inside the box
    }
}

/// True when no utility direction satisfies every halfspace strictly.
///
/// For full-dimensional cones this detects emptiness of the interior; cones
/// encoding a relative interior with equality pairs always report true here
/// because a lower-dimensional cone has no interior at all.
pub fn cone_is_empty_interior(cone: &PolyCone) -> Result<bool, GeometryError> {
    let strict: Vec<&[f64]> = cone.halfspaces.iter().map(|h| h.normal.as_slice()).collect();
    Ok(strict_feasible_point(cone.dim, &strict, &[], &[])?.is_none())
}

/// A point in the relative interior honoring the cone's strict flags, if one
/// of norm at least `DELTA_STRICT` exists.
pub fn relative_interior_point(cone: &PolyCone) -> Result<Option<UtilityDirection>, GeometryError> {
    let strict: Vec<&[f64]> = cone
        .halfspaces
        .iter()
        .filter(|h| h.strict)
        .map(|h| h.normal.as_slice())
        .collect();
    let closed: Vec<&[f64]> = cone
        .halfspaces
        .iter()
        .filter(|h| !h.strict)
        .map(|h| h.normal.as_slice())
        .collect();
    strict_feasible_point(cone.dim, &strict, &closed, &[])
}

/// Containment of closures: `inner` is a subset of `outer` (up to the LP
/// slack threshold). Checked one halfspace of `outer` at a time: if some
/// point of `inner` violates it by more than the threshold, containment
/// fails. Strict flags are ignored; this compares closures.
pub fn cone_contains(outer: &PolyCone, inner: &PolyCone) -> Result<bool, GeometryError> {
    for h in &outer.halfspaces {
        let norm = h.norm();
        if norm < 1e-14 {
            continue;
        }
        let mut p = zero_sum_program(inner.dim, false);
        for g in &inner.halfspaces {
            let mut row = vec![0.0; inner.dim];
            row.copy_from_slice(&g.normal);
            p.constraints.push(Constraint::le(row, 0.0));
        }
        for (d, v) in h.normal.iter().enumerate() {
            p.objective[d] = v / norm;
        }
        match lp::solve(&p)? {
            Outcome::Optimal { value, .. } => {
                if value > DELTA_STRICT {
                    return Ok(false);
                }
            }
            Outcome::Infeasible => return Ok(true), // inner is empty
            Outcome::Unbounded => unreachable!("box-bounded program"),
        }
    }
    Ok(true)
}

/// Equality of closures via mutual containment.
pub fn cone_equal(a: &PolyCone, b: &PolyCone) -> Result<bool, GeometryError> {
    Ok(cone_contains(a, b)? && cone_contains(b, a)?)
}

/// Where a cone union came from, when it was built as the identifiable set
/// of a menu cell. Kept so the set can later be re-embedded as a cell of a
/// concrete experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeOrigin {
    pub menu: Menu,
    pub cell: Vec<usize>,
}

/// A finite union of polyhedral cones; membership is the disjunction of the
/// members' predicates.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeUnion {
    dim: usize,
    cones: Vec<PolyCone>,
    origin: Option<ConeOrigin>,
}

impl ConeUnion {
    pub fn new(dim: usize, cones: Vec<PolyCone>) -> Self {
        ConeUnion { dim, cones, origin: None }
    }

    pub fn empty(dim: usize) -> Self {
        ConeUnion { dim, cones: Vec::new(), origin: None }
    }

    pub fn whole(dim: usize) -> Self {
        ConeUnion { dim, cones: vec![PolyCone::whole_space(dim)], origin: None }
    }

    /// The identifiable set of choosing within `cell` out of `menu`: the
    /// union of the normal cones of the cell's points.
    pub fn from_menu_cell(menu: &Menu, cell: &[usize]) -> ConeUnion {
        let cones = cell.iter().map(|&i| normal_cone_at(menu, i)).collect();
        ConeUnion {
            dim: menu.dim(),
            cones,
            origin: Some(ConeOrigin { menu: menu.clone(), cell: cell.to_vec() }),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cones(&self) -> &[PolyCone] {
        &self.cones
    }

    pub fn origin(&self) -> Option<&ConeOrigin> {
        self.origin.as_ref()
    }

    pub fn with_origin(mut self, origin: ConeOrigin) -> Self {
        self.origin = Some(origin);
        self
    }

    pub fn is_empty_union(&self) -> bool {
        self.cones.is_empty()
    }

    pub fn contains(&self, u: &UtilityDirection, tol: f64) -> bool {
        self.cones.iter().any(|c| c.contains(u, tol))
    }

    pub fn contains_ri(&self, u: &UtilityDirection, tol: f64) -> bool {
        self.cones.iter().any(|c| c.contains_ri(u, tol))
    }

    /// Pairwise intersection of the two unions.
    pub fn intersect(&self, other: &ConeUnion) -> ConeUnion {
        let mut cones = Vec::with_capacity(self.cones.len() * other.cones.len());
        for a in &self.cones {
            for b in &other.cones {
                cones.push(a.intersect(b));
            }
        }
        ConeUnion { dim: self.dim, cones, origin: None }
    }

    /// Set difference `self \ other`, distributed into cone pieces. Pieces
    /// with no strictly feasible point are pruned to curb the blowup.
    pub fn difference(&self, other: &ConeUnion) -> Result<ConeUnion, GeometryError> {
        let mut pieces: Vec<PolyCone> = self.cones.clone();
        for sub in &other.cones {
            if sub.is_whole_space() {
                return Ok(ConeUnion::empty(self.dim));
            }
            let complements = sub.complement_pieces();
            let mut next = Vec::new();
            for piece in &pieces {
                for comp in &complements {
                    let candidate = piece.intersect(comp);
                    if !piece_is_trivially_empty(&candidate)? {
                        next.push(candidate);
                    }
                }
            }
            pieces = next;
        }
        Ok(ConeUnion { dim: self.dim, cones: pieces, origin: None })
    }

    /// Union with another set (concatenation; no simplification).
    pub fn union(&self, other: &ConeUnion) -> ConeUnion {
        let mut cones = self.cones.clone();
        cones.extend(other.cones.iter().cloned());
        ConeUnion { dim: self.dim, cones, origin: None }
    }

    /// True when the set carries no mass under any regular prior: every
    /// member cone is lower-dimensional (no point satisfies all of its
    /// constraints strictly).
    pub fn has_no_interior(&self) -> Result<bool, GeometryError> {
        for c in &self.cones {
            if !cone_is_empty_interior(c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn piece_is_trivially_empty(cone: &PolyCone) -> Result<bool, GeometryError> {
    Ok(relative_interior_point(cone)?.is_none())
}

/// JSON form of a cone union: either the identifiable set of a menu cell,
/// written `{"menu": [...], "cells": [...]}`, or an explicit list of
/// H-representation cones.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ConeUnionDto {
    FromMenu { menu: Menu, cells: Vec<usize> },
    Explicit { cones: Vec<PolyCone> },
}

impl Serialize for ConeUnion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let dto = match &self.origin {
            Some(o) => ConeUnionDto::FromMenu { menu: o.menu.clone(), cells: o.cell.clone() },
            None => ConeUnionDto::Explicit { cones: self.cones.clone() },
        };
        dto.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConeUnion {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match ConeUnionDto::deserialize(d)? {
            ConeUnionDto::FromMenu { menu, cells } => {
                if cells.iter().any(|&i| i >= menu.len()) {
                    return Err(serde::de::Error::custom("cell index out of range"));
                }
                Ok(ConeUnion::from_menu_cell(&menu, &cells))
            }
            ConeUnionDto::Explicit { cones } => {
                let dim = cones
                    .first()
                    .map(|c| c.dim())
                    .ok_or_else(|| serde::de::Error::custom("empty cone list"))?;
                if cones.iter().any(|c| c.dim() != dim) {
                    return Err(serde::de::Error::custom("mixed cone dimensions"));
                }
                Ok(ConeUnion::new(dim, cones))
            }
        }
    }
}

/// Normal cone of the menu at point index `i`: all directions making that
/// point a maximizer. One halfspace `u . (y - x) <= 0` per other point `y`;
/// redundant ones are kept.
pub fn normal_cone_at(menu: &Menu, i: usize) -> PolyCone {
    let x = menu.point(i);
    let halfspaces = menu
        .points()
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, y)| {
            let normal = y
                .coords()
                .iter()
                .zip(x.coords())
                .map(|(yc, xc)| yc - xc)
                .collect();
            Halfspace::closed(normal)
        })
        .collect();
    PolyCone::new(menu.dim(), halfspaces)
}

/// Normal cone at a lottery that must be a member of the menu.
pub fn normal_cone(menu: &Menu, x: &Lottery) -> Result<PolyCone, GeometryError> {
    let i = menu.position_of(x).ok_or(GeometryError::PointNotInMenu)?;
    Ok(normal_cone_at(menu, i))
}

/// Indices of the extreme points of the menu's convex hull, decided by LP:
/// a point is extreme exactly when it is not a convex combination of the
/// other menu points.
pub fn extreme_indices(menu: &Menu) -> Result<Vec<usize>, GeometryError> {
    let n = menu.len();
    let dim = menu.dim();
    let mut out = Vec::new();
    for i in 0..n {
        if n == 1 {
            out.push(i);
            continue;
        }
        // feasibility: lambda >= 0, sum lambda = 1, sum lambda x_j = x_i
        let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        let m = others.len();
        let mut constraints = Vec::new();
        for (k, _) in others.iter().enumerate() {
            let mut row = vec![0.0; m];
            row[k] = -1.0;
            constraints.push(Constraint::le(row, 0.0));
        }
        let mut ones = vec![1.0; m];
        constraints.push(Constraint::eq(std::mem::take(&mut ones), 1.0));
        for d in 0..dim {
            let row: Vec<f64> = others.iter().map(|&j| menu.point(j).coords()[d]).collect();
            constraints.push(Constraint::eq(row, menu.point(i).coords()[d]));
        }
        let p = Program { n_vars: m, objective: vec![0.0; m], constraints };
        match lp::solve(&p)? {
            Outcome::Infeasible => out.push(i),
            Outcome::Optimal { .. } => {}
            Outcome::Unbounded => unreachable!("feasibility program"),
        }
    }
    Ok(out)
}

/// The sub-menu of extreme points of the convex hull.
pub fn extreme_points(menu: &Menu) -> Result<Menu, GeometryError> {
    let idx = extreme_indices(menu)?;
    menu.select(&idx)
}

/// A face of the menu's convex hull, found by brute force over subsets of
/// extreme points.
#[derive(Debug, Clone)]
pub struct Face {
    /// Menu indices of the extreme points spanning the face.
    pub extremes: Vec<usize>,
    /// Barycenter of those extreme points (a relative-interior point).
    pub barycenter: Lottery,
    /// Relative interior of the face's normal cone, encoded with equality
    /// pairs plus strict facet constraints.
    pub ri_cone: PolyCone,
    /// A utility direction deep inside `ri_cone`, when one exists. `None`
    /// for the top face of a full-dimensional hull, whose normal cone is
    /// the origin alone.
    pub witness: Option<UtilityDirection>,
}

/// Enumerate the faces of `conv(menu)` by testing every nonempty subset of
/// extreme points: a subset spans a face exactly when some direction is
/// maximized on precisely that subset (equalities inside, strict outside).
pub fn enumerate_faces(menu: &Menu) -> Result<Vec<Face>, GeometryError> {
    let ext = extreme_indices(menu)?;
    let k = ext.len();
    assert!(k <= 16, "face enumeration is desk-scale only");
    let dim = menu.dim();
    let mut faces = Vec::new();
    for mask in 1u32..(1u32 << k) {
        let subset: Vec<usize> = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| ext[b]).collect();
        let anchor = menu.point(subset[0]);
        let mut equalities: Vec<Vec<f64>> = Vec::new();
        for &i in &subset[1..] {
            equalities.push(diff(menu.point(i), anchor));
        }
        let mut strict: Vec<Vec<f64>> = Vec::new();
        for &z in &ext {
            if !subset.contains(&z) {
                strict.push(diff(menu.point(z), anchor));
            }
        }
        let strict_refs: Vec<&[f64]> = strict.iter().map(|v| v.as_slice()).collect();
        let eq_refs: Vec<&[f64]> = equalities.iter().map(|v| v.as_slice()).collect();
        let witness = strict_feasible_point(dim, &strict_refs, &[], &eq_refs)?;
        let is_top = subset.len() == k;
        if witness.is_none() && !is_top {
            continue;
        }
        // relative-interior encoding: equality pairs + strict facets
        let mut halfspaces = Vec::new();
        for e in &equalities {
            halfspaces.push(Halfspace::closed(e.clone()));
            halfspaces.push(Halfspace::closed(e.iter().map(|v| -v).collect()));
        }
        for s in &strict {
            halfspaces.push(Halfspace::strict(s.clone()));
        }
        let mut coords = vec![0.0; dim];
        for &i in &subset {
            for (d, c) in coords.iter_mut().enumerate() {
                *c += menu.point(i).coords()[d] / subset.len() as f64;
            }
        }
        faces.push(Face {
            extremes: subset,
            barycenter: Lottery::new(coords).expect("barycenter stays in the simplex"),
            ri_cone: PolyCone::new(dim, halfspaces),
            witness,
        });
    }
    Ok(faces)
}

fn diff(a: &Lottery, b: &Lottery) -> Vec<f64> {
    a.coords().iter().zip(b.coords()).map(|(x, y)| x - y).collect()
}
