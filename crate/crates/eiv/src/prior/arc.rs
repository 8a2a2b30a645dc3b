//! Exact measure on the utility circle for three outcomes.
//!
//! On the zero-sum plane of `R^3` the unit utilities form a circle, and a
//! halfspace `u . g <= 0` cuts it in a closed half-circle. A polyhedral cone
//! is therefore an intersection of half-circles (an arc), and a cone union
//! is a finite arc union whose normalized length is its uniform-prior mass.

use crate::geometry::{ConeUnion, PolyCone, UtilityDirection};
use std::f64::consts::{PI, TAU};

/// Angular tolerance for merging and deduplicating interval endpoints.
pub const ANG_TOL: f64 = 1e-12;

/// Canonical arc set: sorted, disjoint segments inside `[0, 2pi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcSet {
    segs: Vec<(f64, f64)>,
}

impl ArcSet {
    pub fn empty() -> Self {
        ArcSet { segs: Vec::new() }
    }

    pub fn full() -> Self {
        ArcSet { segs: vec![(0.0, TAU)] }
    }

    /// Build from raw segments, splitting wrap-arounds and merging overlaps.
    pub fn from_segments(raw: &[(f64, f64)]) -> Self {
        let mut segs: Vec<(f64, f64)> = Vec::new();
        for &(lo, hi) in raw {
            if hi - lo >= TAU - ANG_TOL {
                return ArcSet::full();
            }
            if hi - lo < ANG_TOL {
                continue;
            }
            let lo_n = lo.rem_euclid(TAU);
            let hi_n = lo_n + (hi - lo);
            if hi_n <= TAU + ANG_TOL {
                segs.push((lo_n, hi_n.min(TAU)));
            } else {
                segs.push((lo_n, TAU));
                segs.push((0.0, hi_n - TAU));
            }
        }
        segs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (lo, hi) in segs {
            match merged.last_mut() {
                Some(last) if lo <= last.1 + ANG_TOL => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        ArcSet { segs: merged }
    }

    pub fn segments(&self) -> &[(f64, f64)] {
        &self.segs
    }

    /// Total angular length. The `+ 0.0` keeps the empty sum's sign bit
    /// positive.
    pub fn total(&self) -> f64 {
        self.segs.iter().map(|(lo, hi)| hi - lo).sum::<f64>() + 0.0
    }

    /// Normalized length: the uniform measure of the set on the circle.
    pub fn measure(&self) -> f64 {
        (self.total() / TAU).clamp(0.0, 1.0)
    }

    pub fn intersect(&self, other: &ArcSet) -> ArcSet {
        let mut out = Vec::new();
        for &(a0, a1) in &self.segs {
            for &(b0, b1) in &other.segs {
                let lo = a0.max(b0);
                let hi = a1.min(b1);
                if hi - lo > ANG_TOL {
                    out.push((lo, hi));
                }
            }
        }
        ArcSet::from_segments(&out)
    }

    pub fn union(&self, other: &ArcSet) -> ArcSet {
        let mut all = self.segs.clone();
        all.extend(&other.segs);
        ArcSet::from_segments(&all)
    }
}

/// Arc cut out by one halfspace `u . g <= 0`.
///
/// Degenerate normals (zero projection on the plane) constrain nothing when
/// closed; a strict constraint on them is unsatisfiable.
fn halfspace_arc(normal: &[f64], strict: bool) -> ArcSet {
    // components of the normal in the plane basis
    let u_c = UtilityDirection::from_angle(0.0);
    let u_s = UtilityDirection::from_angle(PI / 2.0);
    let c: f64 = u_c.dot(normal);
    let s: f64 = u_s.dot(normal);
    let r = (c * c + s * s).sqrt();
    if r < 1e-13 {
        return if strict { ArcSet::empty() } else { ArcSet::full() };
    }
    // r cos(theta - phi) <= 0  <=>  theta in [phi + pi/2, phi + 3pi/2]
    let phi = s.atan2(c);
    ArcSet::from_segments(&[(phi + PI / 2.0, phi + 3.0 * PI / 2.0)])
}

/// Exact arc set of a cone: intersection of its halfspace arcs. Strictness
/// flags only matter on boundaries, which are length zero; they are honored
/// solely for degenerate normals.
pub fn cone_arcs(cone: &PolyCone) -> ArcSet {
    assert_eq!(cone.dim(), 3, "arc oracle is specific to three outcomes");
    let mut acc = ArcSet::full();
    for h in cone.halfspaces() {
        acc = acc.intersect(&halfspace_arc(&h.normal, h.strict));
        if acc.segs.is_empty() {
            break;
        }
    }
    acc
}

/// Exact arc set of a cone union.
pub fn union_arcs(w: &ConeUnion) -> ArcSet {
    let mut acc = ArcSet::empty();
    for cone in w.cones() {
        acc = acc.union(&cone_arcs(cone));
    }
    acc
}
