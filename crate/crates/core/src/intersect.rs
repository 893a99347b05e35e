//! Self-contact detection for fold polygons.
//!
//! Candidate pairs come from a uniform grid whose cell size is the common
//! segment length, so every segment touches at most four cells. A pair is
//! examined only in the cell holding the lower-left corner of the overlap
//! of the two (tolerance-padded) bounding boxes, which makes candidates
//! unique without a dedup pass.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::checks::find_condition;
use crate::error::{DragonError, Result};
use crate::hull::{boundary_polyline, build_hull, membership, transform_hull};
use crate::params::{params_from_alpha, AngleParams};
use crate::polygon::{generate_recursive, make_pi0, make_pi1, FoldPolygon, Point};

// ---------------------------------------------------------------------------
// Robust orientation

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn two_product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Adds `b` to a nonoverlapping expansion, keeping it nonoverlapping and
/// free of zero components.
fn grow_expansion(e: &mut Vec<f64>, b: f64) {
    let mut q = b;
    let mut out = Vec::with_capacity(e.len() + 1);
    for &x in e.iter() {
        let (s, err) = two_sum(q, x);
        if err != 0.0 {
            out.push(err);
        }
        q = s;
    }
    if q != 0.0 {
        out.push(q);
    }
    *e = out;
}

/// `(b - a) x (c - a)` with the exact sign: positive when `a, b, c` turn
/// left, zero when collinear.
///
/// Uses the floating-point value when it clears a forward error bound and
/// otherwise sums the six exact products of the expanded determinant.
pub fn orient2d(a: Point, b: Point, c: Point) -> f64 {
    let left = (b.x - a.x) * (c.y - a.y);
    let right = (b.y - a.y) * (c.x - a.x);
    let det = left - right;
    let bound = (3.0 + 16.0 * f64::EPSILON) * f64::EPSILON * (left.abs() + right.abs());
    if det.abs() > bound {
        return det;
    }
    orient2d_exact(a, b, c)
}

fn orient2d_exact(a: Point, b: Point, c: Point) -> f64 {
    // bx cy - bx ay - ax cy - by cx + by ax + ay cx
    let terms = [
        two_product(b.x, c.y),
        two_product(-b.x, a.y),
        two_product(-a.x, c.y),
        two_product(-b.y, c.x),
        two_product(b.y, a.x),
        two_product(a.y, c.x),
    ];
    let mut e = Vec::with_capacity(12);
    for (hi, lo) in terms {
        grow_expansion(&mut e, lo);
        grow_expansion(&mut e, hi);
    }
    // Components are nonoverlapping and increasing in magnitude, so the
    // rounded sum has the sign of the largest one.
    e.iter().sum()
}

// ---------------------------------------------------------------------------
// Pair classification

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ContactKind {
    ProperCrossing,
    EndpointOnInterior,
    VertexCoincidence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContactEvent {
    pub kind: ContactKind,
    pub seg_i: usize,
    pub seg_j: usize,
    pub location: Point,
    /// Negative for crossings (depth relative to the segment length),
    /// otherwise the contact distance relative to the segment length.
    pub separation: f64,
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> (f64, f64) {
    let d = b - a;
    let t = ((p - a).dot(d) / d.dot(d)).clamp(0.0, 1.0);
    (p.dist(a + d * t), t)
}

fn line_distance(p: Point, a: Point, b: Point) -> f64 {
    (b - a).cross(p - a).abs() / a.dist(b)
}

/// Classifies two non-adjacent segments. `tol` is an absolute distance and
/// `length` the common segment length used to normalise separations.
pub fn classify_pair(
    (i, s0, s1): (usize, Point, Point),
    (j, t0, t1): (usize, Point, Point),
    tol: f64,
    length: f64,
) -> Option<ContactEvent> {
    let event = |kind, location, separation| {
        Some(ContactEvent {
            kind,
            seg_i: i.min(j),
            seg_j: i.max(j),
            location,
            separation,
        })
    };

    // Collinear overlap of positive length.
    if line_distance(t0, s0, s1) <= tol && line_distance(t1, s0, s1) <= tol {
        let dir = (s1 - s0) * (1.0 / s0.dist(s1));
        let proj = |p: Point| (p - s0).dot(dir);
        let (a0, a1) = (0.0_f64, s0.dist(s1));
        let (b0, b1) = {
            let (u, v) = (proj(t0), proj(t1));
            (u.min(v), u.max(v))
        };
        let lo = a0.max(b0);
        let hi = a1.min(b1);
        if hi - lo > tol {
            let mid = s0 + dir * (0.5 * (lo + hi));
            return event(ContactKind::ProperCrossing, mid, -(hi - lo) / length);
        }
    }

    // Shared vertices.
    let mut best: Option<(f64, Point)> = None;
    for p in [s0, s1] {
        for r in [t0, t1] {
            let d = p.dist(r);
            if d <= tol && best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, p));
            }
        }
    }
    if let Some((d, p)) = best {
        return event(ContactKind::VertexCoincidence, p, d / length);
    }

    // An endpoint on the other segment's interior.
    let mut best: Option<(f64, Point)> = None;
    for (p, a, b) in [(s0, t0, t1), (s1, t0, t1), (t0, s0, s1), (t1, s0, s1)] {
        let (d, t) = point_segment_distance(p, a, b);
        if d <= tol && t > 0.0 && t < 1.0 && best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, p));
        }
    }
    if let Some((d, p)) = best {
        return event(ContactKind::EndpointOnInterior, p, d / length);
    }

    // Strict transversal crossing.
    let o1 = orient2d(s0, s1, t0);
    let o2 = orient2d(s0, s1, t1);
    let o3 = orient2d(t0, t1, s0);
    let o4 = orient2d(t0, t1, s1);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        let d = s1 - s0;
        let e = t1 - t0;
        let t = (t0 - s0).cross(e) / d.cross(e);
        let depth = [
            line_distance(t0, s0, s1),
            line_distance(t1, s0, s1),
            line_distance(s0, t0, t1),
            line_distance(s1, t0, t1),
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
        return event(ContactKind::ProperCrossing, s0 + d * t, -depth / length);
    }
    None
}

// ---------------------------------------------------------------------------
// Grid

#[derive(Debug, Clone, Copy)]
struct Bbox {
    min: Point,
    max: Point,
}

impl Bbox {
    fn of(a: Point, b: Point, pad: f64) -> Self {
        Self {
            min: Point::new(a.x.min(b.x) - pad, a.y.min(b.y) - pad),
            max: Point::new(a.x.max(b.x) + pad, a.y.max(b.y) + pad),
        }
    }

    fn overlaps(&self, o: &Self) -> bool {
        self.min.x <= o.max.x && o.min.x <= self.max.x && self.min.y <= o.max.y && o.min.y <= self.max.y
    }
}

struct Grid {
    origin: Point,
    cell: f64,
}

impl Grid {
    fn index(&self, p: Point) -> (i64, i64) {
        (
            ((p.x - self.origin.x) / self.cell).floor() as i64,
            ((p.y - self.origin.y) / self.cell).floor() as i64,
        )
    }
}

fn segment_boxes(poly: &FoldPolygon, pad: f64) -> Vec<Bbox> {
    poly.vertices.windows(2).map(|w| Bbox::of(w[0], w[1], pad)).collect()
}

/// Non-adjacent segment pairs `(i, j)`, `i < j`, whose padded bounding boxes
/// overlap, found through the grid. Sorted.
pub fn candidate_pairs(poly: &FoldPolygon, tol: f64) -> Vec<(usize, usize)> {
    let length = poly.edge_length();
    let boxes = segment_boxes(poly, tol * length);
    let mut pairs = grid_pairs(&boxes, length);
    pairs.par_sort_unstable();
    pairs
}

fn grid_pairs(boxes: &[Bbox], cell: f64) -> Vec<(usize, usize)> {
    if boxes.is_empty() {
        return Vec::new();
    }
    let origin = boxes.iter().fold(Point::new(f64::INFINITY, f64::INFINITY), |m, b| {
        Point::new(m.x.min(b.min.x), m.y.min(b.min.y))
    });
    let grid = Grid { origin, cell };
    let mut entries: Vec<((i64, i64), u32)> = boxes
        .par_iter()
        .enumerate()
        .flat_map_iter(|(k, b)| {
            let (x0, y0) = grid.index(b.min);
            let (x1, y1) = grid.index(b.max);
            (x0..=x1).flat_map(move |x| (y0..=y1).map(move |y| ((x, y), k as u32)))
        })
        .collect();
    entries.par_sort_unstable();

    let mut starts = vec![0];
    for w in 1..entries.len() {
        if entries[w].0 != entries[w - 1].0 {
            starts.push(w);
        }
    }
    starts.push(entries.len());

    starts
        .par_windows(2)
        .flat_map_iter(|w| {
            let group = &entries[w[0]..w[1]];
            let cell_key = group[0].0;
            let grid = &grid;
            group.iter().enumerate().flat_map(move |(x, &(_, i))| {
                group[x + 1..].iter().filter_map(move |&(_, j)| {
                    let (i, j) = (i.min(j) as usize, i.max(j) as usize);
                    if j == i + 1 {
                        return None;
                    }
                    let (a, b) = (&boxes[i], &boxes[j]);
                    if !a.overlaps(b) {
                        return None;
                    }
                    let corner = Point::new(a.min.x.max(b.min.x), a.min.y.max(b.min.y));
                    (grid.index(corner) == cell_key).then_some((i, j))
                })
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingReport {
    pub level: u32,
    pub alpha_deg: f64,
    pub proper_crossings: usize,
    pub endpoint_on_interior: usize,
    pub vertex_coincidences: usize,
    pub events: Vec<ContactEvent>,
    pub truncated: bool,
    pub wall_time_ms: f64,
}

impl CrossingReport {
    pub fn total(&self) -> usize {
        self.proper_crossings + self.endpoint_on_interior + self.vertex_coincidences
    }
}

/// Default contact tolerance, relative to the segment length.
pub const DEFAULT_CONTACT_TOL: f64 = 1e-9;

/// All contacts between non-adjacent segments of `poly`. `tol` is relative
/// to the segment length.
pub fn find_contacts(poly: &FoldPolygon, tol: f64) -> Result<CrossingReport> {
    find_contacts_limited(poly, tol, usize::MAX)
}

/// Like [`find_contacts`] but keeps at most `max_events` events in the
/// report; the counts always cover every event.
pub fn find_contacts_limited(poly: &FoldPolygon, tol: f64, max_events: usize) -> Result<CrossingReport> {
    if poly.level < 1 {
        return Err(DragonError::Precondition("contact search needs n >= 1".into()));
    }
    if !(tol >= 0.0) {
        return Err(DragonError::Domain {
            name: "tol",
            value: tol,
            domain: "tol >= 0",
        });
    }
    let start = Instant::now();
    let length = poly.edge_length();
    let abs_tol = tol * length;
    let boxes = segment_boxes(poly, abs_tol);
    let v = &poly.vertices;
    let mut events: Vec<ContactEvent> = grid_pairs(&boxes, length)
        .into_par_iter()
        .filter_map(|(i, j)| classify_pair((i, v[i], v[i + 1]), (j, v[j], v[j + 1]), abs_tol, length))
        .collect();
    events.par_sort_unstable_by(|a, b| (a.seg_i, a.seg_j).cmp(&(b.seg_i, b.seg_j)));
    Ok(build_report(poly, events, max_events, start))
}

fn build_report(poly: &FoldPolygon, mut events: Vec<ContactEvent>, max_events: usize, start: Instant) -> CrossingReport {
    let count = |k| events.iter().filter(|e| e.kind == k).count();
    let proper_crossings = count(ContactKind::ProperCrossing);
    let endpoint_on_interior = count(ContactKind::EndpointOnInterior);
    let vertex_coincidences = count(ContactKind::VertexCoincidence);
    let truncated = events.len() > max_events;
    events.truncate(max_events);
    CrossingReport {
        level: poly.level,
        alpha_deg: poly.params.alpha_deg,
        proper_crossings,
        endpoint_on_interior,
        vertex_coincidences,
        events,
        truncated,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

/// All-pairs reference implementation.
pub fn find_contacts_brute_force(poly: &FoldPolygon, tol: f64) -> CrossingReport {
    let start = Instant::now();
    let length = poly.edge_length();
    let abs_tol = tol * length;
    let v = &poly.vertices;
    let n = poly.segment_count();
    let mut events = Vec::new();
    for i in 0..n {
        for j in i + 2..n {
            if let Some(e) = classify_pair((i, v[i], v[i + 1]), (j, v[j], v[j + 1]), abs_tol, length) {
                events.push(e);
            }
        }
    }
    build_report(poly, events, usize::MAX, start)
}

fn has_crossing(n: u32, alpha: f64) -> Result<bool> {
    let poly = generate_recursive(n, &params_from_alpha(alpha)?)?;
    Ok(find_contacts(&poly, DEFAULT_CONTACT_TOL)?.proper_crossings > 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalBracket {
    pub level: u32,
    pub alpha_lo: f64,
    pub alpha_hi: f64,
    pub evaluations: u32,
}

/// Bisection on "level `n` has a proper crossing". The low end of the
/// bracket must cross and the high end must not.
pub fn empirical_critical_angle(n: u32, bracket: [f64; 2], tol: f64) -> Result<CriticalBracket> {
    let [mut lo, mut hi] = bracket;
    let invalid = |reason: &str| DragonError::InvalidBracket {
        lo: bracket[0],
        hi: bracket[1],
        reason: reason.to_string(),
    };
    if !(lo < hi) || !(tol > 0.0) {
        return Err(invalid("need lo < hi and tol > 0"));
    }
    if !has_crossing(n, lo)? {
        return Err(invalid("no proper crossing at the low end"));
    }
    if has_crossing(n, hi)? {
        return Err(invalid("proper crossing at the high end"));
    }
    let mut evaluations = 2;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if has_crossing(n, mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
        evaluations += 1;
    }
    Ok(CriticalBracket {
        level: n,
        alpha_lo: lo,
        alpha_hi: hi,
        evaluations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedCheck {
    pub name: &'static str,
    /// Slack of the inequality; positive means it holds.
    pub value: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem1Report {
    pub level: u32,
    pub alpha_deg: f64,
    pub checks: Vec<NamedCheck>,
    pub pass: bool,
}

/// Samples per turn used for the end-segment distance checks.
const END_CHECK_SAMPLES: usize = 720;

/// Numeric checks for the two end segments, which the hull does not cover.
pub fn theorem1_boundary_checks(n: u32, params: &AngleParams) -> Result<Theorem1Report> {
    if n < 4 {
        return Err(DragonError::Precondition(format!("end-segment checks need n >= 4, got {n}")));
    }
    let qn = params.qpow(n as f64);
    let base = build_hull(params);
    let left = transform_hull(&base, &make_pi0(params));
    let right = transform_hull(&base, &make_pi1(params));

    let clearance = |h: &crate::hull::HullModel, centre: Point| -> f64 {
        let dist = boundary_polyline(h, END_CHECK_SAMPLES, crate::checks::BOUNDARY_MIN_RADIUS)
            .into_iter()
            .map(|p| p.dist(centre))
            .fold(f64::INFINITY, f64::min);
        let outside = -membership(h, centre).margin;
        // Both the distance and being outside must hold.
        if outside > 0.0 {
            dist - qn
        } else {
            outside.min(dist - qn)
        }
    };

    let mut checks = vec![
        NamedCheck {
            name: "first-segment-clearance",
            value: clearance(&right, base.anchors.p00),
            pass: false,
        },
        NamedCheck {
            name: "last-segment-clearance",
            value: clearance(&left, base.anchors.p01),
            pass: false,
        },
        NamedCheck {
            name: "end-segment-length",
            value: params.q - qn - qn,
            pass: false,
        },
        NamedCheck {
            name: "radial-bound",
            value: (find_condition("T1-case2")?.evaluate)(params),
            pass: false,
        },
    ];
    for c in &mut checks {
        c.pass = c.value > 0.0;
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(Theorem1Report {
        level: n,
        alpha_deg: params.alpha_deg,
        checks,
        pass,
    })
}
