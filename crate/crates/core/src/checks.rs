//! Numeric conditions behind the containment and separation arguments,
//! threshold recovery, and sampling-based verification of hull inclusions.
//!
//! Every condition is a residual that is positive exactly when the desired
//! inequality holds.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{DragonError, Result};
use crate::hull::{boundary_polyline, build_hull, transform_hull, HullModel};
use crate::params::{params_from_alpha, AngleParams, DEFAULT_TOLERANCE};
use crate::polygon::{generate_recursive, make_pi0, make_pi1, Point};

/// Range of q over which a condition is claimed to hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuotedRange {
    pub q_min: f64,
    pub q_max: f64,
    /// Human-readable form, e.g. `q > 0.57`.
    pub text: &'static str,
    /// Whether an end of the range is a sign change rather than a
    /// sufficient bound.
    pub sharp: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Condition {
    pub id: &'static str,
    pub description: &'static str,
    #[serde(skip)]
    pub evaluate: fn(&AngleParams) -> f64,
    pub quoted: Option<QuotedRange>,
}

const fn range(q_min: f64, q_max: f64, text: &'static str, sharp: bool) -> Option<QuotedRange> {
    Some(QuotedRange {
        q_min,
        q_max,
        text,
        sharp,
    })
}

/// q at the window ends: alpha = 108 and alpha = 90.
const Q_WINDOW_LO: f64 = 0.618_033_988_749_895;
const Q_WINDOW_HI: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn s(p: &AngleParams) -> f64 {
    p.series_factor()
}

fn inner(p: &AngleParams) -> f64 {
    1.0 - p.q * p.q * s(p)
}

fn l5a(p: &AngleParams) -> f64 {
    let q = p.q;
    let lower = 1.0 - q - inner(p) * q * q;
    let upper = q * q * s(p) - (1.0 - q);
    lower.min(upper)
}

fn l5b(p: &AngleParams) -> f64 {
    let h = crate::hull::construct_hull(p);
    let pt = h.points.h;
    let r = pt.norm();
    let mut phi = pt.angle_deg();
    while phi > h.a.domain.hi {
        phi -= 360.0;
    }
    (h.a.radius_unchecked(phi) - r).min(r - h.b.radius_unchecked(phi))
}

fn l6a(p: &AngleParams) -> f64 {
    let q2 = p.q * p.q;
    let poly = 1.0 - 4.0 * q2 - 2.0 * q2.powi(2) + 12.0 * q2.powi(3) + q2.powi(4) - 4.0 * q2.powi(5);
    -poly
}

fn l6b(p: &AngleParams) -> f64 {
    let b = p.beta_rad();
    b / (2.0 * b.cos()).ln() - b.tan()
}

fn p1a_d1(p: &AngleParams) -> f64 {
    let q = p.q;
    q - inner(p) * q * q - inner(p) * q
}

fn p1b_d2(p: &AngleParams) -> f64 {
    let q = p.q;
    q.powi(3) * s(p) - inner(p) * q * q
}

fn l9_n2(p: &AngleParams) -> f64 {
    let q = p.q;
    -(1.0 - q - q * q - q.powi(4) + q.powi(5))
}

fn l9_perp(p: &AngleParams) -> f64 {
    let q2 = p.q * p.q;
    (4.0 * q2 - 1.0).sqrt() * (1.0 - q2 - q2 * q2 + q2.powi(3)) - 2.0 * (q2 - q2 * q2 - q2.powi(3))
}

fn p3_main(p: &AngleParams) -> f64 {
    let q = p.q;
    1.0 - q * q - q.powi(4) - p.q_alpha_over_beta()
}

fn p3_case1(p: &AngleParams) -> f64 {
    let q = p.q;
    1.0 - p.qpow((180.0 + p.beta_deg) / p.beta_deg) * s(p) - q * q * s(p)
}

fn p3_case2(p: &AngleParams) -> f64 {
    let q = p.q;
    q - q.powi(3) * s(p) - p.qpow((360.0 - p.alpha_deg) / p.beta_deg) * s(p)
}

fn p3_case4(p: &AngleParams) -> f64 {
    let q = p.q;
    q - p.qpow((p.alpha_deg + 2.0 * p.beta_deg) / p.beta_deg) * s(p) - q * q
}

fn p3_case5a(p: &AngleParams) -> f64 {
    let q = p.q;
    q - p.qpow(5.0 + 2.0 * p.alpha_deg / p.beta_deg) * s(p) - q.powi(5) * s(p)
}

fn p3_case5b(p: &AngleParams) -> f64 {
    let q = p.q;
    q - p.qpow((180.0 + p.beta_deg) / p.beta_deg) * s(p) - p.qpow(7.0 + p.alpha_deg / p.beta_deg) * s(p)
}

fn p3_case6(p: &AngleParams) -> f64 {
    let q = p.q;
    q - q * q - q.powi(5) * s(p)
}

fn p3_case7(p: &AngleParams) -> f64 {
    let q = p.q;
    1.0 - q * q - q.powi(4) - q.powi(4) * p.q_alpha_over_beta()
}

fn p3_case8(p: &AngleParams) -> f64 {
    let q = p.q;
    q * q - q.powi(4) * s(p) - q.powi(5) * s(p)
}

fn p3_case9(p: &AngleParams) -> f64 {
    let q = p.q;
    1.0 - q * q - p.qpow((180.0 + p.beta_deg) / p.beta_deg) * s(p) - q.powi(4) * s(p)
}

fn p1a_e1(p: &AngleParams) -> f64 {
    let q = p.q;
    q * q - q.powi(4) * s(p)
}

fn l9_n3(p: &AngleParams) -> f64 {
    let q = p.q;
    q - q.powi(3) - inner(p) * q
}

fn t1_case2(p: &AngleParams) -> f64 {
    1.0 - p.q.powi(4) * p.q_alpha_over_beta() * s(p)
}

/// Both sides of the gap condition for the segments `(4,7)` and `(4,11)`,
/// scaled by `q^-4`: `(lhs, rhs)`, satisfied when `lhs < rhs`.
pub fn lemma11_sides(p: &AngleParams) -> (f64, f64) {
    let q = p.q;
    let lhs = q.powi(3) * s(p) * (p.q_alpha_over_beta() + q * q);
    let b = p.beta_rad();
    let rhs = 2.0 * (b.cos() + (3.0 * b).cos());
    (lhs, rhs)
}

fn l11(p: &AngleParams) -> f64 {
    let (lhs, rhs) = lemma11_sides(p);
    rhs - lhs
}

static CATALOG: [Condition; 22] = [
    Condition {
        id: "L5a",
        description: "B lies between D and the inner spiral at F on the line through P00 and P11",
        evaluate: l5a,
        quoted: range(Q_WINDOW_LO, Q_WINDOW_HI, "0.618 <= q <= 0.7071", false),
    },
    Condition {
        id: "L5b",
        description: "H lies between the inner and outer spiral about P00",
        evaluate: l5b,
        quoted: range(Q_WINDOW_LO, Q_WINDOW_HI, "90 <= alpha <= 108", false),
    },
    Condition {
        id: "L6a",
        description: "arc BC radius below the distance from P11 to the line through P01 and H",
        evaluate: l6a,
        quoted: range(0.524, 0.724, "0.524 <= q <= 0.724", true),
    },
    Condition {
        id: "L6b",
        description: "spiral tangent angle exceeds beta",
        evaluate: l6b,
        quoted: range(0.5, Q_WINDOW_HI, "0 < beta < 45", false),
    },
    Condition {
        id: "P1a-d1",
        description: "image of the inner spiral about P01 stays outside the inner spiral about P00",
        evaluate: p1a_d1,
        quoted: range(0.57, 1.0, "q > 0.57", false),
    },
    Condition {
        id: "P1b-d2",
        description: "image of the inner spiral about P11 reaches past the inner spiral about P00",
        evaluate: p1b_d2,
        quoted: range(0.57, 1.0, "q > 0.57", false),
    },
    Condition {
        id: "L9-n2",
        description: "vertex P(2,2) lies in the band about P00",
        evaluate: l9_n2,
        quoted: range(0.6, 1.0, "0.6 < q < 1", false),
    },
    Condition {
        id: "L9-perp",
        description: "perpendicular foot from P(2,1) stays inside the hull",
        evaluate: l9_perp,
        quoted: range(0.599, 1.0, "q > 0.599 (alpha <= 113)", true),
    },
    Condition {
        id: "P3-main",
        description: "spiral bands of the two half-hulls do not overlap near P11",
        evaluate: p3_main,
        quoted: range(0.5, 0.661_531_4, "alpha >= 98.195", true),
    },
    Condition {
        id: "P3-case1",
        description: "separation of the outer spiral images beyond F",
        evaluate: p3_case1,
        quoted: range(Q_WINDOW_LO, Q_WINDOW_HI, "90 <= alpha <= 108", false),
    },
    Condition {
        id: "P3-case2",
        description: "separation of the second image spirals about P11",
        evaluate: p3_case2,
        quoted: range(Q_WINDOW_LO, Q_WINDOW_HI, "90 <= alpha <= 108", false),
    },
    Condition {
        id: "P3-case4",
        description: "right half-hull band S2 image stays within q^2 of P01",
        evaluate: p3_case4,
        quoted: range(0.5, 0.67, "q < 0.67", false),
    },
    Condition {
        id: "P3-case5a",
        description: "first winding of the e image clears the d image",
        evaluate: p3_case5a,
        quoted: range(Q_WINDOW_LO, Q_WINDOW_HI, "90 <= alpha <= 108", false),
    },
    Condition {
        id: "P3-case5b",
        description: "second winding of the e image clears the c image",
        evaluate: p3_case5b,
        quoted: range(Q_WINDOW_LO, Q_WINDOW_HI, "90 <= alpha <= 108", false),
    },
    Condition {
        id: "P3-case6",
        description: "S4 image stays on its side of P11",
        evaluate: p3_case6,
        quoted: range(0.5, 0.69, "q < 0.69", false),
    },
    Condition {
        id: "P3-case7",
        description: "interleaved spiral bands about P11 are pairwise disjoint",
        evaluate: p3_case7,
        quoted: range(Q_WINDOW_LO, Q_WINDOW_HI, "90 <= alpha <= 108", false),
    },
    Condition {
        id: "P3-case8",
        description: "T1 image clears the band about P11",
        evaluate: p3_case8,
        quoted: range(0.5, 0.68, "q < 0.68", false),
    },
    Condition {
        id: "P3-case9",
        description: "T2 image clears the outer spiral image",
        evaluate: p3_case9,
        quoted: range(0.5, 0.69, "q < 0.69", false),
    },
    Condition {
        id: "P1a-e1",
        description: "image of e stays within q^2 of P11",
        evaluate: p1a_e1,
        quoted: range(Q_WINDOW_LO, Q_WINDOW_HI, "90 <= alpha <= 108", false),
    },
    Condition {
        id: "L9-n3",
        description: "B lies inside the segment P00 P11 shortened by q^3",
        evaluate: l9_n3,
        quoted: range(Q_WINDOW_LO, Q_WINDOW_HI, "90 <= alpha <= 108", false),
    },
    Condition {
        id: "T1-case2",
        description: "radial bound used for the second special segment",
        evaluate: t1_case2,
        quoted: range(Q_WINDOW_LO, Q_WINDOW_HI, "90 <= alpha <= 108", false),
    },
    Condition {
        id: "L11",
        description: "hulls of segments (4,7) and (4,11) leave a gap",
        evaluate: l11,
        quoted: range(0.5, 0.671_546_2, "alpha >= 96.241", true),
    },
];

pub fn condition_catalog() -> &'static [Condition] {
    &CATALOG
}

pub fn find_condition(id: &str) -> Result<&'static Condition> {
    CATALOG
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| DragonError::UnknownCondition(id.to_string()))
}

pub fn evaluate_condition(id: &str, params: &AngleParams) -> Result<f64> {
    Ok((find_condition(id)?.evaluate)(params))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub condition_id: String,
    pub critical_q: f64,
    pub critical_alpha_deg: f64,
    pub alpha_lo: f64,
    pub alpha_hi: f64,
    pub q_lo: f64,
    pub q_hi: f64,
    pub bracket_width: f64,
    pub iterations: u32,
}

/// Bisection on alpha for the sign change of a condition's residual.
pub fn find_threshold(id: &str, bracket: [f64; 2], tol: f64) -> Result<ThresholdResult> {
    let cond = find_condition(id)?;
    let [mut lo, mut hi] = bracket;
    if !(lo < hi) || !(tol > 0.0) {
        return Err(DragonError::InvalidBracket {
            lo,
            hi,
            reason: "need lo < hi and tol > 0".into(),
        });
    }
    let f = |a: f64| -> Result<f64> { Ok((cond.evaluate)(&params_from_alpha(a)?)) };
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 || f_hi == 0.0 || (f_lo > 0.0) == (f_hi > 0.0) {
        return Err(DragonError::NoSignChange { lo, hi, f_lo, f_hi });
    }
    let lo_positive = f_lo > 0.0;
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if (fm > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let mid = 0.5 * (lo + hi);
    // q decreases as alpha increases.
    let q_of = |a: f64| params_from_alpha(a).map(|p| p.q);
    Ok(ThresholdResult {
        condition_id: cond.id.to_string(),
        critical_q: q_of(mid)?,
        critical_alpha_deg: mid,
        alpha_lo: lo,
        alpha_hi: hi,
        q_lo: q_of(hi)?,
        q_hi: q_of(lo)?,
        bracket_width: hi - lo,
        iterations,
    })
}

/// Every sign change of a condition's residual for alpha in `[lo, hi]`,
/// located on a scan with spacing `step` and refined to `tol`.
pub fn condition_roots(id: &str, lo: f64, hi: f64, step: f64, tol: f64) -> Result<Vec<ThresholdResult>> {
    let cond = find_condition(id)?;
    if !(lo < hi) || !(step > 0.0) {
        return Err(DragonError::InvalidBracket {
            lo,
            hi,
            reason: "need lo < hi and step > 0".into(),
        });
    }
    let eval = |a: f64| params_from_alpha(a).map(|p| (cond.evaluate)(&p)).ok().filter(|v| v.is_finite());
    let count = ((hi - lo) / step).ceil() as usize;
    let mut roots = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=count {
        let a = (lo + step * i as f64).min(hi);
        let Some(v) = eval(a) else {
            prev = None;
            continue;
        };
        if let Some((pa, pv)) = prev {
            if (pv > 0.0) != (v > 0.0) {
                roots.push(find_threshold(id, [pa, a], tol)?);
            }
        }
        prev = Some((a, v));
    }
    Ok(roots)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subject {
    HullInvariance,
    PolygonContainment,
    Separation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub subject: Subject,
    pub alpha_deg: f64,
    pub samples: usize,
    pub min_margin: f64,
    pub worst_point: Point,
    pub tolerance: f64,
    pub pass: bool,
}

impl VerificationReport {
    fn from_margins(subject: Subject, alpha_deg: f64, tolerance: f64, margins: Vec<(f64, Point)>) -> Self {
        // Ties keep the earliest sample so the report is order-independent.
        let (min_margin, worst_point) = margins
            .iter()
            .copied()
            .fold((f64::INFINITY, Point::ORIGIN), |best, cur| if cur.0 < best.0 { cur } else { best });
        Self {
            subject,
            alpha_deg,
            samples: margins.len(),
            min_margin,
            worst_point,
            tolerance,
            pass: min_margin >= -tolerance,
        }
    }
}

/// Radius (relative to hull scale) at which boundary windings are cut off.
pub const BOUNDARY_MIN_RADIUS: f64 = 1e-10;

/// Samples the hull boundary, maps it by `pi_0` and `pi_1`, and measures
/// how far inside the hull each image lies.
pub fn verify_hull_invariance(params: &AngleParams, samples_per_turn: usize) -> VerificationReport {
    let hull = build_hull(params);
    let boundary = boundary_polyline(&hull, samples_per_turn, BOUNDARY_MIN_RADIUS);
    let maps = [make_pi0(params), make_pi1(params)];
    let images: Vec<Point> = maps
        .iter()
        .flat_map(|m| boundary.iter().map(move |&p| m.apply(p)))
        .collect();
    let margins = images
        .par_iter()
        .map(|&p| (crate::hull::membership(&hull, p).margin, p))
        .collect();
    VerificationReport::from_margins(Subject::HullInvariance, params.alpha_deg, DEFAULT_TOLERANCE, margins)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContainmentOptions {
    /// Interior sample points per segment.
    pub samples_per_segment: usize,
    /// Also sample the first and last segment, which leave the hull.
    pub include_end_segments: bool,
    pub tolerance: f64,
}

impl Default for ContainmentOptions {
    fn default() -> Self {
        Self {
            samples_per_segment: 9,
            include_end_segments: false,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

/// Every vertex of `Q_n`, and sample points on every segment but the two
/// end segments, must lie in the hull.
pub fn verify_polygon_in_hull(n: u32, params: &AngleParams) -> Result<VerificationReport> {
    verify_polygon_in_hull_with(n, params, &ContainmentOptions::default())
}

pub fn verify_polygon_in_hull_with(
    n: u32,
    params: &AngleParams,
    opts: &ContainmentOptions,
) -> Result<VerificationReport> {
    if n < 2 {
        return Err(DragonError::Precondition(format!("containment needs n >= 2, got {n}")));
    }
    let hull = build_hull(params);
    let poly = generate_recursive(n, params)?;
    let segs = poly.segment_count();
    let per = opts.samples_per_segment;
    let mut points = poly.vertices.clone();
    for k in 0..segs {
        if !opts.include_end_segments && (k == 0 || k + 1 == segs) {
            continue;
        }
        let (a, b) = (poly.vertices[k], poly.vertices[k + 1]);
        for i in 1..=per {
            let t = i as f64 / (per + 1) as f64;
            points.push(a + (b - a) * t);
        }
    }
    let margins = points
        .par_iter()
        .map(|&p| (crate::hull::membership(&hull, p).margin, p))
        .collect();
    Ok(VerificationReport::from_margins(
        Subject::PolygonContainment,
        params.alpha_deg,
        opts.tolerance,
        margins,
    ))
}

/// Relative radius of the disc about `P(1,1)` left out of the separation
/// check, where the two half-hulls touch.
pub const SEPARATION_EXCLUSION: f64 = 1e-6;

/// Samples the boundary of each half-hull and measures how far outside the
/// other half-hull each sample lies.
pub fn verify_separation(params: &AngleParams, samples_per_turn: usize) -> VerificationReport {
    let base = build_hull(params);
    let h0 = transform_hull(&base, &make_pi0(params));
    let h1 = transform_hull(&base, &make_pi1(params));
    let touch = base.anchors.p11;
    let radius = SEPARATION_EXCLUSION * params.q;
    let sample = |h: &HullModel| -> Vec<Point> {
        boundary_polyline(h, samples_per_turn, BOUNDARY_MIN_RADIUS)
            .into_iter()
            .filter(|p| p.dist(touch) > radius)
            .collect()
    };
    let pairs: Vec<(Point, &HullModel)> = sample(&h0)
        .into_iter()
        .map(|p| (p, &h1))
        .chain(sample(&h1).into_iter().map(|p| (p, &h0)))
        .collect();
    let margins = pairs
        .par_iter()
        .map(|&(p, other)| (-crate::hull::membership(other, p).margin, p))
        .collect();
    VerificationReport::from_margins(Subject::Separation, params.alpha_deg, DEFAULT_TOLERANCE, margins)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma11Row {
    pub alpha_deg: f64,
    pub beta_deg: f64,
    pub q: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

pub fn lemma11_table(alphas: &[f64]) -> Result<Vec<Lemma11Row>> {
    alphas
        .iter()
        .map(|&a| {
            let p = params_from_alpha(a)?;
            let (lhs, rhs) = lemma11_sides(&p);
            Ok(Lemma11Row {
                alpha_deg: a,
                beta_deg: p.beta_deg,
                q: p.q,
                lhs,
                rhs,
                satisfied: lhs < rhs,
            })
        })
        .collect()
}

/// The eleven angles 96.235, 96.236, ..., 96.245.
pub fn lemma11_default_alphas() -> Vec<f64> {
    (0..=10).map(|i| (96_235 + i) as f64 / 1000.0).collect()
}

/// Rounds half away from zero at `digits` decimals, first snapping off
/// binary noise so that e.g. 41.8825 rounds to 41.883.
fn round_half_up(x: f64, digits: i32) -> f64 {
    let scale = 10f64.powi(digits);
    let snapped = (x * scale * 1e6).round() / 1e6;
    snapped.round() / scale
}

pub const LEMMA11_HEADER: &str = "alpha(deg)\tbeta(deg)\tq\tleft side\tright side\t<";

/// One tab-separated line: 3 decimals for angles, 7 for the rest.
pub fn format_lemma11_row(row: &Lemma11Row) -> String {
    format!(
        "{:.3}\t{:.3}\t{:.7}\t{:.7}\t{:.7}\t{}",
        round_half_up(row.alpha_deg, 3),
        round_half_up(row.beta_deg, 3),
        row.q,
        row.lhs,
        row.rhs,
        if row.satisfied { "TRUE" } else { "FALSE" }
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma11Geometry {
    /// `|P(4,7) P(4,11)| = 2 q^4 (cos beta + cos 3 beta)`.
    pub gap_length: f64,
    /// Reach of the hull on segment (4,6) towards `P(4,11)`.
    pub s3_reach: f64,
    /// Reach of the hull on segment (4,10) towards `P(4,7)`.
    pub s4_reach: f64,
}

pub fn lemma11_geometry(params: &AngleParams) -> Lemma11Geometry {
    let q4 = params.q.powi(4);
    let b = params.beta_rad();
    let s = params.series_factor();
    Lemma11Geometry {
        gap_length: 2.0 * q4 * (b.cos() + (3.0 * b).cos()),
        s3_reach: q4 * s * params.qpow((params.alpha_deg + 3.0 * params.beta_deg) / params.beta_deg),
        s4_reach: q4 * s * params.q.powi(5),
    }
}
