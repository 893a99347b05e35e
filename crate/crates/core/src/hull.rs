//! The spiral hull that contains every paperfolding polygon of a fixed angle.
//!
//! The hull is bounded by five logarithmic spirals:
//!
//! * `a` (outer) and `b` (inner) about `P(0,0)`,
//! * `c` (outer) and `d` (inner) about `P(0,1)`, the `pi_1` images of `a`, `b`,
//! * `e` about `P(1,1)`, closing the gap between `a` and `d`.
//!
//! It is the union of four regions `S1..S4`; `T1` and `T2` are two auxiliary
//! subsets used when reasoning about images of the hull. Regions are
//! described in unwrapped polar angles, so a point belongs to a spiral band
//! if *some* winding branch `theta - 360 k` satisfies the band's radial
//! sandwich and angular bounds.
//!
//! Membership reports a signed margin rather than a boolean: the minimum over
//! a region's inequalities of the slack divided by the local outer radius.
//! Boundary points sit exactly on spirals, so callers compare the margin
//! with a small negative tolerance.

use std::f64::consts::TAU;

use log::warn;
use serde::Serialize;

use crate::error::{DragonError, Result};
use crate::params::AngleParams;
use crate::polygon::{make_pi0, make_pi1, Point, Similarity, MAX_LEVEL};

/// Closed angular interval in degrees; `lo == None` means unbounded below.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngularDomain {
    pub lo: Option<f64>,
    pub hi: f64,
}

impl AngularDomain {
    pub fn below(hi: f64) -> Self {
        Self { lo: None, hi }
    }

    pub fn between(lo: f64, hi: f64) -> Self {
        Self { lo: Some(lo), hi }
    }

    pub fn contains(&self, phi: f64, eps: f64) -> bool {
        phi <= self.hi + eps && self.lo.is_none_or(|lo| phi >= lo - eps)
    }

    fn shifted(&self, by: f64) -> Self {
        Self {
            lo: self.lo.map(|l| l + by),
            hi: self.hi + by,
        }
    }
}

/// `r(phi) = amplitude * q^(-(phi - phase) / beta)` about `center`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spiral {
    pub center: Point,
    pub amplitude: f64,
    pub phase_deg: f64,
    pub params: AngleParams,
    pub domain: AngularDomain,
    /// Wider domain some arguments use (`e'`, and `c` up to `-alpha - beta`).
    pub extension: Option<AngularDomain>,
}

impl Spiral {
    fn new(center: Point, amplitude: f64, phase_deg: f64, params: AngleParams, domain: AngularDomain) -> Self {
        Self {
            center,
            amplitude,
            phase_deg,
            params,
            domain,
            extension: None,
        }
    }

    fn with_extension(mut self, ext: AngularDomain) -> Self {
        self.extension = Some(ext);
        self
    }

    /// Formula value with no domain check.
    #[inline]
    pub fn radius_unchecked(&self, phi_deg: f64) -> f64 {
        self.amplitude * self.params.q.powf(-(phi_deg - self.phase_deg) / self.params.beta_deg)
    }

    /// The domain in force, honouring the extension flag.
    pub fn effective_domain(&self, allow_extension: bool) -> AngularDomain {
        match (allow_extension, self.extension) {
            (true, Some(ext)) => ext,
            _ => self.domain,
        }
    }

    /// Growth rate `d ln r / d phi` per radian.
    #[inline]
    pub fn log_slope(&self) -> f64 {
        -self.params.q.ln() / self.params.beta_rad()
    }

    /// Polar angle at which the radius equals `r`.
    pub fn angle_at_radius(&self, r: f64) -> f64 {
        self.phase_deg - self.params.beta_deg * (r / self.amplitude).ln() / self.params.q.ln()
    }

    pub fn point_at(&self, phi_deg: f64) -> Point {
        self.center.polar_offset(self.radius_unchecked(phi_deg), phi_deg)
    }

    /// Unit tangent at `phi`, pointing towards increasing `phi`.
    pub fn tangent_at(&self, phi_deg: f64) -> Point {
        let (s, c) = phi_deg.to_radians().sin_cos();
        let k = self.log_slope();
        let t = Point::new(k * c - s, k * s + c);
        t * (1.0 / t.norm())
    }

    /// Image under a similarity: centre mapped, amplitude scaled, phase
    /// and domains shifted by the rotation.
    pub fn transformed(&self, sim: &Similarity) -> Self {
        Self {
            center: sim.apply(self.center),
            amplitude: self.amplitude * sim.scale,
            phase_deg: self.phase_deg + sim.rotation_deg,
            params: self.params,
            domain: self.domain.shifted(sim.rotation_deg),
            extension: self.extension.map(|d| d.shifted(sim.rotation_deg)),
        }
    }
}

/// Spiral radius at `phi`, rejecting angles outside the (optionally
/// extended) domain.
pub fn spiral_radius(s: &Spiral, phi_deg: f64, allow_extension: bool) -> Result<f64> {
    let dom = s.effective_domain(allow_extension);
    if !dom.contains(phi_deg, 1e-9) {
        return Err(DragonError::Domain {
            name: "phi_deg",
            value: phi_deg,
            domain: "spiral angular domain",
        });
    }
    Ok(s.radius_unchecked(phi_deg))
}

/// Constant angle between radius and tangent of the hull spirals, in
/// degrees: `tan(tau) = beta / ln(2 cos beta)` with beta in radians.
pub fn spiral_tangent_angle(params: &AngleParams) -> f64 {
    (params.beta_rad() / (2.0 * params.beta_rad().cos()).ln())
        .atan()
        .to_degrees()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HullAnchors {
    pub p00: Point,
    pub p01: Point,
    pub p11: Point,
    pub p21: Point,
    pub p23: Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NamedPoints {
    pub a: Point,
    pub b: Point,
    pub c: Point,
    pub d: Point,
    pub e: Point,
    pub f: Point,
    pub g: Point,
    pub h: Point,
}

impl NamedPoints {
    fn map(&self, sim: &Similarity) -> Self {
        Self {
            a: sim.apply(self.a),
            b: sim.apply(self.b),
            c: sim.apply(self.c),
            d: sim.apply(self.d),
            e: sim.apply(self.e),
            f: sim.apply(self.f),
            g: sim.apply(self.g),
            h: sim.apply(self.h),
        }
    }
}

/// The hull, possibly placed on a segment by a similarity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HullModel {
    pub params: AngleParams,
    /// Maps the base hull onto this one.
    pub placement: Similarity,
    pub anchors: HullAnchors,
    pub a: Spiral,
    pub b: Spiral,
    pub c: Spiral,
    pub d: Spiral,
    pub e: Spiral,
    pub points: NamedPoints,
    /// Radius of the arc `BC` about `P(1,1)`: `q^3 / (1 - q^4)`.
    pub arc_radius: f64,
}

/// Builds the base hull on `Q_0`. Outside the angle window `[90, 108]` the
/// construction is still carried out, but a warning is logged because the
/// containment arguments do not apply there.
pub fn build_hull(params: &AngleParams) -> HullModel {
    if !params.in_hull_window() {
        warn!(
            "alpha = {} is outside [90, 108]; the hull is not guaranteed to contain the polygons",
            params.alpha_deg
        );
    }
    construct_hull(params)
}

/// [`build_hull`] without the window warning, for sweeps over wide ranges.
pub(crate) fn construct_hull(params: &AngleParams) -> HullModel {
    let p = *params;
    let (alpha, beta, q) = (p.alpha_deg, p.beta_deg, p.q);
    let outer = p.series_factor();
    let inner = 1.0 - q * q * outer;

    let pi0 = make_pi0(&p);
    let pi1 = make_pi1(&p);
    let p00 = Point::ORIGIN;
    let p01 = Point::new(1.0, 0.0);
    let p11 = pi0.apply(p01);
    let anchors = HullAnchors {
        p00,
        p01,
        p11,
        p21: pi0.apply(p11),
        p23: pi1.apply(p11),
    };

    let a = Spiral::new(p00, outer, 0.0, p, AngularDomain::below(-beta));
    let b = Spiral::new(p00, inner, 0.0, p, AngularDomain::below(0.0));
    let c = Spiral::new(p01, outer, -alpha, p, AngularDomain::below(-180.0))
        .with_extension(AngularDomain::below(-alpha - beta));
    let d = Spiral::new(p01, inner, -alpha, p, AngularDomain::below(-alpha - beta));
    let e = Spiral::new(p11, outer, 4.0 * beta, p, AngularDomain::between(-beta, beta))
        .with_extension(AngularDomain::between(-180.0 - beta, -beta));

    let arc_radius = q.powi(3) * outer;
    let pa = a.point_at(-beta);
    let pb = b.point_at(-beta);
    let tangent = b.tangent_at(-beta);
    // Second intersection of the tangent line at B with the circle about
    // P(1,1) through B.
    let pg = pb + tangent * (-2.0 * (pb - p11).dot(tangent));
    let points = NamedPoints {
        a: pa,
        b: pb,
        c: d.point_at(-alpha - beta),
        d: Point::new(q, 0.0),
        e: a.point_at(-180.0 - beta),
        f: b.point_at(0.0),
        g: pg,
        h: c.point_at(-alpha - beta),
    };

    HullModel {
        params: p,
        placement: Similarity::IDENTITY,
        anchors,
        a,
        b,
        c,
        d,
        e,
        points,
        arc_radius,
    }
}

/// Image of a hull under a similarity.
pub fn transform_hull(hull: &HullModel, sim: &Similarity) -> HullModel {
    let anchors = HullAnchors {
        p00: sim.apply(hull.anchors.p00),
        p01: sim.apply(hull.anchors.p01),
        p11: sim.apply(hull.anchors.p11),
        p21: sim.apply(hull.anchors.p21),
        p23: sim.apply(hull.anchors.p23),
    };
    HullModel {
        params: hull.params,
        placement: sim.compose(&hull.placement),
        anchors,
        a: hull.a.transformed(sim),
        b: hull.b.transformed(sim),
        c: hull.c.transformed(sim),
        d: hull.d.transformed(sim),
        e: hull.e.transformed(sim),
        points: hull.points.map(sim),
        arc_radius: hull.arc_radius * sim.scale,
    }
}

/// Composition of `pi_0` / `pi_1` that maps `Q_0` onto segment `k` of `Q_n`.
///
/// The map always sends `P(0,0)` to the even endpoint of the segment, so
/// for odd `k` the segment is traversed backwards.
pub fn segment_map(n: u32, k: u64, params: &AngleParams) -> Result<Similarity> {
    if n > MAX_LEVEL {
        return Err(DragonError::Resource {
            level: n,
            max: MAX_LEVEL,
        });
    }
    let count = 1u64 << n;
    if k >= count {
        return Err(DragonError::IndexOutOfRange {
            level: n,
            index: k,
            count,
        });
    }
    let pi0 = make_pi0(params);
    let pi1 = make_pi1(params);
    let mut map = Similarity::IDENTITY;
    let mut idx = k;
    for level in (1..=n).rev() {
        let half = 1u64 << (level - 1);
        if idx < half {
            map = map.compose(&pi0);
        } else {
            map = map.compose(&pi1);
            idx = 2 * half - idx - 1;
        }
    }
    Ok(map)
}

/// Hull placed on segment `P(n,k) P(n,k+1)`.
pub fn hull_for_segment(n: u32, k: u64, params: &AngleParams) -> Result<HullModel> {
    let map = segment_map(n, k, params)?;
    Ok(transform_hull(&build_hull(params), &map))
}

/// Tags for the regions of the hull.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Region {
    S1,
    S2,
    S3,
    S4,
    T1,
    T2,
}

impl Region {
    pub const ALL: [Region; 6] = [Region::S1, Region::S2, Region::S3, Region::S4, Region::T1, Region::T2];
    /// The regions whose union is the hull.
    pub const COVER: [Region; 4] = [Region::S1, Region::S2, Region::S3, Region::S4];
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipResult {
    /// Regions whose margin is at least `-tol`.
    pub tags: Vec<Region>,
    /// Best margin over `S1..S4`; non-negative means inside the hull.
    pub margin: f64,
    /// Margin per region, in [`Region::ALL`] order.
    pub region_margins: [f64; 6],
}

impl MembershipResult {
    pub fn is_member(&self, tol: f64) -> bool {
        self.margin >= -tol
    }

    pub fn has(&self, r: Region) -> bool {
        self.tags.contains(&r)
    }
}

/// Smallest radius, relative to the hull's scale, used to normalise margins.
pub const RADIUS_FLOOR: f64 = 1e-6;

/// Distance, relative to the coordinate magnitude, below which a point is
/// taken to be a band's centre.
const CENTRE_SNAP: f64 = 1e-13;

/// Upper or lower radial bound of a band.
#[derive(Clone, Copy)]
enum Bound<'a> {
    Zero,
    Constant(f64),
    Spiral(&'a Spiral),
}

impl Bound<'_> {
    #[inline]
    fn at(&self, phi: f64) -> f64 {
        match self {
            Bound::Zero => 0.0,
            Bound::Constant(r) => *r,
            Bound::Spiral(s) => s.radius_unchecked(phi),
        }
    }
}

struct Band<'a> {
    center: Point,
    lower: Bound<'a>,
    upper: Bound<'a>,
    domain: AngularDomain,
}

/// Margin of `p` in a band, maximised over winding branches.
///
/// Slacks are divided by the branch's outer radius, floored at `floor` so
/// that points a few ulps from a centre are not judged on rounding noise.
fn band_margin(band: &Band<'_>, p: Point, floor: f64) -> f64 {
    let v = p - band.center;
    let dist = v.norm();
    if dist <= CENTRE_SNAP * (1.0 + band.center.norm()) {
        // The centre, up to coordinate rounding: inside when the band
        // reaches down to radius zero, otherwise a limit point of the
        // winding band.
        return match band.lower {
            Bound::Zero => 1.0,
            _ => 0.0,
        };
    }
    let theta = v.angle_deg();
    let hi = band.domain.hi;
    // Largest branch no more than half a turn past the upper bound.
    let turns = ((theta - (hi + 180.0)) / 360.0).ceil();
    let mut phi = theta - 360.0 * turns;
    let mut best = f64::NEG_INFINITY;
    for _ in 0..100_000 {
        if let Some(lo) = band.domain.lo {
            if phi < lo - 180.0 {
                break;
            }
        }
        let outer = band.upper.at(phi);
        let scale = outer.max(floor);
        let mut m = (outer - dist) / scale;
        if !matches!(band.lower, Bound::Zero) {
            m = m.min((dist - band.lower.at(phi)) / scale);
        }
        m = m.min((hi - phi).to_radians() * dist / scale);
        if let Some(lo) = band.domain.lo {
            m = m.min((phi - lo).to_radians() * dist / scale);
        }
        best = best.max(m);
        // Further branches only shrink the outer radius.
        if phi <= hi && outer < dist && matches!(band.upper, Bound::Spiral(_)) {
            break;
        }
        phi -= 360.0;
    }
    best
}

impl HullModel {
    fn region_band(&self, region: Region) -> Band<'_> {
        match region {
            Region::S1 => Band {
                center: self.a.center,
                lower: Bound::Spiral(&self.b),
                upper: Bound::Spiral(&self.a),
                domain: AngularDomain::below(self.a.domain.hi),
            },
            Region::S2 => Band {
                center: self.a.center,
                lower: Bound::Spiral(&self.b),
                upper: Bound::Constant(self.params.q * self.placement.scale),
                domain: AngularDomain::between(self.a.domain.hi, self.b.domain.hi),
            },
            Region::S3 => Band {
                center: self.c.center,
                lower: Bound::Spiral(&self.d),
                upper: Bound::Spiral(&self.c),
                domain: AngularDomain::below(self.d.domain.hi),
            },
            Region::S4 => Band {
                center: self.e.center,
                lower: Bound::Zero,
                upper: Bound::Spiral(&self.e),
                domain: self.e.domain,
            },
            Region::T1 => Band {
                center: self.e.center,
                lower: Bound::Zero,
                upper: Bound::Spiral(&self.e),
                domain: self.e.effective_domain(true),
            },
            Region::T2 => {
                let hi = self.e.effective_domain(true).lo.expect("e' is bounded below");
                Band {
                    center: self.e.center,
                    lower: Bound::Zero,
                    upper: Bound::Constant(self.arc_radius),
                    domain: AngularDomain::between(hi - self.params.alpha_deg, hi),
                }
            }
        }
    }

    /// Signed margin of `p` in one region.
    pub fn region_margin(&self, region: Region, p: Point) -> f64 {
        let band = self.region_band(region);
        let m = band_margin(&band, p, RADIUS_FLOOR * self.placement.scale);
        if region == Region::T2 {
            // Also on the P(1,1) side of the tangent to b at B.
            let phi_b = self.b.domain.hi - self.params.beta_deg;
            let t = self.b.tangent_at(phi_b);
            let side = |x: Point| t.cross(x - self.points.b);
            let reference = side(self.anchors.p11).signum();
            m.min(reference * side(p) / self.arc_radius)
        } else {
            m
        }
    }

    /// Largest distance from `P(0,0)` of any hull point: `a(-beta)`.
    pub fn outer_radius(&self) -> f64 {
        self.a.radius_unchecked(self.a.domain.hi)
    }
}

/// Region membership of `p` with the default tolerance.
pub fn membership(hull: &HullModel, p: Point) -> MembershipResult {
    membership_with_tol(hull, p, crate::params::DEFAULT_TOLERANCE)
}

pub fn membership_with_tol(hull: &HullModel, p: Point, tol: f64) -> MembershipResult {
    let mut region_margins = [0.0; 6];
    let mut tags = Vec::new();
    for (slot, r) in region_margins.iter_mut().zip(Region::ALL) {
        *slot = hull.region_margin(r, p);
        if *slot >= -tol {
            tags.push(r);
        }
    }
    let margin = region_margins[..4].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    MembershipResult {
        tags,
        margin,
        region_margins,
    }
}

/// Samples `phi` from `from` towards `to` (either direction) with an angular
/// step of at most `360 / samples_per_turn` that also keeps consecutive
/// samples no further apart than the chord budget `max_gap`.
fn march(s: &Spiral, from: f64, to: f64, samples_per_turn: usize, max_gap: f64) -> Vec<Point> {
    let base_step = 360.0 / samples_per_turn as f64;
    let stretch = (1.0 + s.log_slope().powi(2)).sqrt();
    let dir = if to >= from { 1.0 } else { -1.0 };
    let mut out = vec![s.point_at(from)];
    let mut phi = from;
    loop {
        // Arc length per degree at the larger end of the step.
        let r = s.radius_unchecked(phi).max(s.radius_unchecked(phi + dir * base_step));
        let arc_per_deg = r * stretch * TAU / 360.0;
        let step = base_step.min(max_gap / arc_per_deg);
        let next = phi + dir * step;
        if (to - next) * dir <= 0.0 {
            out.push(s.point_at(to));
            break;
        }
        out.push(s.point_at(next));
        phi = next;
    }
    out
}

/// Appends `seg`, dropping its first point when it repeats the last one.
fn append(pts: &mut Vec<Point>, seg: Vec<Point>) {
    let skip = usize::from(!pts.is_empty());
    pts.extend(seg.into_iter().skip(skip));
}

/// Closed polyline along the hull boundary.
///
/// Order: `a` from its centre out to `A`, `e` from `A` to `C`, `d` from `C`
/// in to its centre, `c` from that centre out to `F`, then `b` from `F` in
/// to `P(0,0)`; the first point is repeated at the end. Windings stop once
/// the radius drops below `min_radius` (relative to the hull's scale).
///
/// Consecutive samples are never further apart than a circle of radius
/// `a(-beta)` sampled `samples_per_turn` times.
pub fn boundary_polyline(hull: &HullModel, samples_per_turn: usize, min_radius: f64) -> Vec<Point> {
    let n = samples_per_turn.max(8);
    let r_min = min_radius.max(1e-300) * hull.placement.scale;
    let max_gap = TAU * hull.outer_radius() / n as f64;
    let inner_end = |s: &Spiral| s.angle_at_radius(r_min).min(s.domain.hi);

    let mut pts: Vec<Point> = Vec::new();
    let a_hi = hull.a.domain.hi;
    append(&mut pts, march(&hull.a, inner_end(&hull.a), a_hi, n, max_gap));
    let e_dom = hull.e.domain;
    append(&mut pts, march(&hull.e, e_dom.lo.unwrap(), e_dom.hi, n, max_gap));
    let d_hi = hull.d.domain.hi;
    append(&mut pts, march(&hull.d, d_hi, inner_end(&hull.d), n, max_gap));
    // The inner end of d and the inner end of c are distinct points near
    // P(0,1); the short jump between them stays inside the hull.
    pts.extend(march(&hull.c, inner_end(&hull.c), hull.c.domain.hi, n, max_gap));
    let b_hi = hull.b.domain.hi;
    append(&mut pts, march(&hull.b, b_hi, inner_end(&hull.b), n, max_gap));
    let first = pts[0];
    pts.push(first);
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::params_from_alpha;
    use crate::polygon::generate_recursive;
    use approx::assert_abs_diff_eq;

    const WINDOW: [f64; 5] = [90.0, 95.0, 98.195, 100.0, 108.0];

    #[test]
    fn a0_at_minus_beta_right_angle() {
        let p = params_from_alpha(90.0).unwrap();
        let h = build_hull(&p);
        let r = spiral_radius(&h.a, -45.0, false).unwrap();
        assert_abs_diff_eq!(r, 0.5f64.sqrt() / 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(r, 0.9428090, epsilon = 5e-8);
    }

    #[test]
    fn arc_radius_at_108() {
        let h = build_hull(&params_from_alpha(108.0).unwrap());
        // q^3 = 0.2360680, so q^3 / (1 - q^4) = 0.2763932.
        let q = (5f64.sqrt() - 1.0) / 2.0;
        assert_abs_diff_eq!(h.arc_radius, q.powi(3) / (1.0 - q.powi(4)), epsilon = 1e-14);
        assert_abs_diff_eq!(h.arc_radius, 0.2763932, epsilon = 5e-8);
    }

    #[test]
    fn spiral_radius_examples() {
        for a in WINDOW {
            let p = params_from_alpha(a).unwrap();
            let h = build_hull(&p);
            let q = p.q;
            let outer = p.series_factor();
            let beta = p.beta_deg;
            assert_abs_diff_eq!(spiral_radius(&h.a, -beta, false).unwrap(), q * outer, epsilon = 1e-13);
            assert_abs_diff_eq!(
                spiral_radius(&h.b, 0.0, false).unwrap(),
                1.0 - q * q * outer,
                epsilon = 1e-13
            );
            assert_abs_diff_eq!(
                spiral_radius(&h.a, -beta - 360.0, false).unwrap(),
                q * outer * q.powf(360.0 / beta),
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn spiral_domain_errors() {
        let p = params_from_alpha(100.0).unwrap();
        let h = build_hull(&p);
        assert!(spiral_radius(&h.a, 0.0, false).is_err());
        assert!(spiral_radius(&h.e, -90.0, false).is_err());
        assert!(spiral_radius(&h.e, -90.0, true).is_ok());
        assert!(spiral_radius(&h.c, -170.0, false).is_err());
        assert!(spiral_radius(&h.c, -170.0, true).is_ok());
        assert!(spiral_radius(&h.c, -120.0, true).is_err());
        let ext_hi = -p.alpha_deg - p.beta_deg;
        assert!(spiral_radius(&h.c, ext_hi, true).is_ok());
        assert!(spiral_radius(&h.c, ext_hi, false).is_err());
    }

    #[test]
    fn hull_invariants() {
        for a in WINDOW {
            let p = params_from_alpha(a).unwrap();
            let h = build_hull(&p);
            let (q, beta) = (p.q, p.beta_deg);
            let outer = p.series_factor();
            // a and e meet at A.
            assert_abs_diff_eq!(h.a.radius_unchecked(-beta), q * outer, epsilon = 1e-13);
            assert_abs_diff_eq!(h.e.radius_unchecked(-beta), q.powi(5) * outer, epsilon = 1e-13);
            assert!(h.a.point_at(-beta).dist(h.e.point_at(-beta)) < 1e-13);
            // e ends at C on d.
            assert!(h.e.point_at(beta).dist(h.points.c) < 1e-13);
            // c at -180 is F on b.
            assert!(h.c.point_at(-180.0).dist(h.points.f) < 1e-13);
            // named distances
            assert_abs_diff_eq!(h.points.f.norm(), 1.0 - q * q * outer, epsilon = 1e-13);
            assert_abs_diff_eq!(h.points.d.norm(), q, epsilon = 1e-15);
            assert_abs_diff_eq!(h.points.b.norm(), h.b.radius_unchecked(-beta), epsilon = 1e-13);
            assert_abs_diff_eq!(h.anchors.p11.dist(h.points.b), h.arc_radius, epsilon = 1e-13);
            assert_abs_diff_eq!(h.anchors.p11.dist(h.points.c), h.arc_radius, epsilon = 1e-13);
            assert_abs_diff_eq!(h.anchors.p11.dist(h.points.g), h.arc_radius, epsilon = 1e-13);
            // H by the law of cosines
            let hn = q * (1.0 - q * q + q.powi(6)).sqrt() * outer;
            assert_abs_diff_eq!(h.points.h.norm(), hn, epsilon = 1e-13);
            let tan_lambda = (4.0 * q * q - 1.0).sqrt() / (1.0 - 2.0 * q.powi(4));
            assert_abs_diff_eq!(
                h.points.h.angle_deg().to_radians().tan().abs(),
                tan_lambda,
                epsilon = 1e-11
            );
            // A, B, E are on the line through P(0,0) and P(1,1).
            for pt in [h.points.a, h.points.b, h.points.e] {
                assert!(pt.cross(h.anchors.p11).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn tangent_angle_examples() {
        let tau = spiral_tangent_angle(&params_from_alpha(90.0).unwrap());
        assert_abs_diff_eq!(tau, 66.19, epsilon = 5e-3);
        assert!(tau > 45.0);
        let tau = spiral_tangent_angle(&params_from_alpha(108.0).unwrap());
        assert!(tau > 36.0);
        // tau grows with beta over the whole range where it is defined.
        let mut prev = 0.0;
        for i in 0..=440 {
            let beta = 1.0 + 0.1 * i as f64;
            let p = params_from_alpha(180.0 - 2.0 * beta).unwrap();
            let t = spiral_tangent_angle(&p);
            assert!(t > prev && t > beta, "beta {beta}");
            prev = t;
        }
        let small = spiral_tangent_angle(&params_from_alpha(180.0 - 2.0 * 0.01).unwrap());
        assert!(small < 0.02, "tau -> 0 as beta -> 0, got {small}");
    }

    #[test]
    fn tangent_matches_finite_difference() {
        let p = params_from_alpha(100.0).unwrap();
        let h = build_hull(&p);
        for phi in [-40.0, -200.0, -725.0] {
            let t = h.a.tangent_at(phi);
            let d = 1e-6;
            let fd = h.a.point_at(phi + d) - h.a.point_at(phi - d);
            let fd = fd * (1.0 / fd.norm());
            assert!(t.dist(fd) < 1e-6);
            // angle between radius and tangent is tau (or its supplement)
            let radial = h.a.point_at(phi) - h.a.center;
            let ang = radial.cross(t).atan2(radial.dot(t)).to_degrees().abs();
            assert_abs_diff_eq!(ang, spiral_tangent_angle(&p), epsilon = 1e-6);
        }
    }

    #[test]
    fn membership_examples() {
        for a in WINDOW {
            let p = params_from_alpha(a).unwrap();
            let h = build_hull(&p);
            let m = membership(&h, h.anchors.p11);
            assert!(m.has(Region::S4) && m.is_member(0.0));
            let m = membership(&h, h.points.d);
            assert!(m.has(Region::S3), "D at alpha {a}: {m:?}");
            let m = membership(&h, h.points.h);
            assert!(m.has(Region::S1), "H at alpha {a}: {m:?}");
            // far away points are outside
            for far in [Point::new(3.0, 0.0), Point::new(0.5, 2.0), Point::new(-1.0, -1.0)] {
                let m = membership(&h, far);
                assert!(m.tags.is_empty() && m.margin < -0.1);
            }
        }
    }

    #[test]
    fn membership_centres_and_bands() {
        let p = params_from_alpha(100.0).unwrap();
        let h = build_hull(&p);
        assert!(membership(&h, Point::ORIGIN).is_member(0.0));
        assert!(membership(&h, Point::new(1.0, 0.0)).is_member(0.0));
        // midway between b and a on the branch at -beta - 360
        let phi = -p.beta_deg - 360.0;
        let r = 0.5 * (h.a.radius_unchecked(phi) + h.b.radius_unchecked(phi));
        let m = membership(&h, h.a.center.polar_offset(r, phi));
        assert!(m.has(Region::S1) && m.margin > 0.1);
        // between the turns (inside b of one branch, outside a of the next)
        let r_gap = 0.5 * (h.b.radius_unchecked(phi) + h.a.radius_unchecked(phi - 360.0));
        let m = membership(&h, h.a.center.polar_offset(r_gap, phi));
        assert!(!m.is_member(1e-9), "{m:?}");
    }

    #[test]
    fn t_regions_inside_s_regions() {
        // T1 ⊂ S1 and T2 ⊂ S2 ∪ S3, checked on a polar grid about P(1,1).
        for a in WINDOW {
            let p = params_from_alpha(a).unwrap();
            let h = build_hull(&p);
            for i in 1..60 {
                for j in 0..=40 {
                    let phi = -180.0 - p.beta_deg - p.alpha_deg + (p.alpha_deg + 180.0) * i as f64 / 60.0;
                    let r = h.arc_radius * 1.2 * j as f64 / 40.0;
                    let pt = h.e.center.polar_offset(r, phi);
                    let m = membership(&h, pt);
                    if h.region_margin(Region::T1, pt) > 1e-12 {
                        assert!(m.region_margins[0] >= -1e-9, "T1 ⊄ S1 at {pt:?}, alpha {a}");
                    }
                    if h.region_margin(Region::T2, pt) > 1e-12 {
                        let s23 = m.region_margins[1].max(m.region_margins[2]);
                        assert!(s23 >= -1e-9, "T2 ⊄ S2 ∪ S3 at {pt:?}, alpha {a}");
                    }
                }
            }
        }
    }

    #[test]
    fn transform_examples() {
        let p = params_from_alpha(100.0).unwrap();
        let h = build_hull(&p);
        let (pi0, pi1) = (make_pi0(&p), make_pi1(&p));
        let h0 = transform_hull(&h, &pi0);
        // a -> a1: same formula, domain phi <= -2 beta
        for phi in [-90.0, -300.0, -1000.0] {
            assert_abs_diff_eq!(h0.a.radius_unchecked(phi), h.a.radius_unchecked(phi), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(h0.a.domain.hi, -2.0 * p.beta_deg, epsilon = 1e-12);
        // c -> c2 about P(1,1): exponent -(phi + 2 alpha) / beta
        let h1 = transform_hull(&h, &pi1);
        assert!(h1.c.center.dist(h.anchors.p11) < 1e-15);
        for phi in [-300.0, -500.0] {
            let expect = p.series_factor() * p.q.powf(-(phi + 2.0 * p.alpha_deg) / p.beta_deg);
            assert_abs_diff_eq!(h1.c.radius_unchecked(phi), expect, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(h1.c.domain.hi, p.beta_deg - 360.0, epsilon = 1e-12);
        // identity
        assert_eq!(transform_hull(&h, &Similarity::IDENTITY), h);
    }

    #[test]
    fn tangency_identities() {
        for i in 0..=18 {
            let p = params_from_alpha(90.0 + i as f64).unwrap();
            let h = build_hull(&p);
            let q = p.q;
            let beta = p.beta_deg;
            // c1 = pi_0(c) touches b at B: |P00 B| + |B P11| = q.
            let c1 = h.c.transformed(&make_pi0(&p));
            let bp11 = spiral_radius(&c1, -180.0 - beta, false).unwrap();
            assert_abs_diff_eq!(h.points.b.norm() + bp11, q, epsilon = 1e-9);
            assert!(c1.point_at(-180.0 - beta).dist(h.points.b) < 1e-12);
            // e2 = pi_1(e) touches b at F: |P00 F| + |F P23| + |P23 P01| = 1.
            let e2 = h.e.transformed(&make_pi1(&p));
            let fp23 = spiral_radius(&e2, -180.0, false).unwrap();
            let sum = h.points.f.norm() + fp23 + h.anchors.p23.dist(h.anchors.p01);
            assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-9);
            assert!(e2.point_at(-180.0).dist(h.points.f) < 1e-12);
            assert_abs_diff_eq!(h.anchors.p23.dist(h.anchors.p01), q * q, epsilon = 1e-14);
        }
    }

    #[test]
    fn segment_hulls_follow_the_polygon() {
        let p = params_from_alpha(96.241).unwrap();
        let poly = generate_recursive(4, &p).unwrap();
        let base = build_hull(&p);
        for k in 0..16u64 {
            let hk = hull_for_segment(4, k, &p).unwrap();
            let (even, odd) = if k % 2 == 0 { (k, k + 1) } else { (k + 1, k) };
            let tol = 1e-9 * p.q.powi(4);
            assert!(hk.anchors.p00.dist(poly.vertices[even as usize]) < tol, "k {k}");
            assert!(hk.anchors.p01.dist(poly.vertices[odd as usize]) < tol, "k {k}");
        }
        let h6 = hull_for_segment(4, 6, &p).unwrap();
        assert_abs_diff_eq!(h6.placement.scale, p.q.powi(4), epsilon = 1e-15);
        assert_abs_diff_eq!(h6.placement.rotation_deg.rem_euclid(360.0), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(h6.a.amplitude, base.a.amplitude * p.q.powi(4), epsilon = 1e-15);
        let h10 = hull_for_segment(4, 10, &p).unwrap();
        assert_abs_diff_eq!(
            (h10.placement.rotation_deg - 4.0 * p.beta_deg).rem_euclid(360.0),
            0.0,
            epsilon = 1e-9
        );
        assert_eq!(hull_for_segment(0, 0, &p).unwrap(), base);
        assert!(matches!(hull_for_segment(4, 16, &p), Err(DragonError::IndexOutOfRange { .. })));
    }

    #[test]
    fn segment_maps_match_polygon_at_depth() {
        let p = params_from_alpha(100.0).unwrap();
        let n = 9;
        let poly = generate_recursive(n, &p).unwrap();
        for k in (0..(1u64 << n)).step_by(7) {
            let m = segment_map(n, k, &p).unwrap();
            let s = m.apply(Point::ORIGIN);
            let e = m.apply(Point::new(1.0, 0.0));
            let (even, odd) = if k % 2 == 0 { (k, k + 1) } else { (k + 1, k) };
            assert!(s.dist(poly.vertices[even as usize]) < 1e-12);
            assert!(e.dist(poly.vertices[odd as usize]) < 1e-12);
        }
    }

    #[test]
    fn boundary_closed_and_dense() {
        let p = params_from_alpha(100.0).unwrap();
        let h = build_hull(&p);
        let pts = boundary_polyline(&h, 360, 1e-12);
        assert!(pts[0].dist(*pts.last().unwrap()) < 1e-9);
        let limit = h.a.radius_unchecked(-p.beta_deg) / 50.0;
        let gap = pts.windows(2).map(|w| w[0].dist(w[1])).fold(0.0, f64::max);
        assert!(gap < limit, "gap {gap} vs {limit}");
        for a in WINDOW {
            let h = build_hull(&params_from_alpha(a).unwrap());
            let pts = boundary_polyline(&h, 64, 1e-9);
            assert!(pts[0].dist(*pts.last().unwrap()) < 1e-9);
        }
    }

    #[test]
    fn boundary_points_are_members() {
        for a in WINDOW {
            let h = build_hull(&params_from_alpha(a).unwrap());
            for pt in boundary_polyline(&h, 180, 1e-10) {
                let m = membership(&h, pt);
                assert!(m.margin >= -1e-9, "alpha {a}: {pt:?} margin {}", m.margin);
                assert!(m.margin <= 1e-6, "alpha {a}: boundary point deep inside: {pt:?} {}", m.margin);
            }
        }
    }
}
