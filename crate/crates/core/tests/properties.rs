use std::time::{Duration, Instant};

use dragon_core::checks::{condition_catalog, evaluate_condition, find_threshold};
use dragon_core::hull::{build_hull, membership, transform_hull};
use dragon_core::intersect::{
    candidate_pairs, find_contacts, find_contacts_brute_force, orient2d, CrossingReport, DEFAULT_CONTACT_TOL,
};
use dragon_core::{generate_recursive, params_from_alpha, params_from_q, Point, Similarity};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn exact_orient(a: Point, b: Point, c: Point) -> i32 {
    let r = |x: f64| BigRational::from_float(x).unwrap();
    let det = (r(b.x) - r(a.x)) * (r(c.y) - r(a.y)) - (r(b.y) - r(a.y)) * (r(c.x) - r(a.x));
    if det.is_zero() {
        0
    } else if det.is_positive() {
        1
    } else {
        -1
    }
}

fn sign(x: f64) -> i32 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

proptest! {
    #[test]
    fn orient_matches_rational(ax in -10.0..10.0f64, ay in -10.0..10.0f64,
                               bx in -10.0..10.0f64, by in -10.0..10.0f64,
                               t in -3.0..3.0f64, ulps in -4i64..=4) {
        let a = Point::new(ax, ay);
        let b = Point::new(bx, by);
        // A point on (or a few ulps off) the line through a and b.
        let on = a + (b - a) * t;
        let c = Point::new(on.x, f64::from_bits((on.y.to_bits() as i64 + ulps) as u64));
        prop_assert_eq!(sign(orient2d(a, b, c)), exact_orient(a, b, c));
        let d = Point::new(t, ax * by);
        prop_assert_eq!(sign(orient2d(a, b, d)), exact_orient(a, b, d));
    }

    #[test]
    fn orient_on_polygon_vertices(alpha in 90.0..108.0f64, i in 0usize..256, j in 0usize..256, k in 0usize..256) {
        let poly = generate_recursive(8, &params_from_alpha(alpha).unwrap()).unwrap();
        let v = &poly.vertices;
        prop_assert_eq!(sign(orient2d(v[i], v[j], v[k])), exact_orient(v[i], v[j], v[k]));
    }

    #[test]
    fn grid_keeps_every_overlapping_pair(alpha in 88.0..110.0f64, n in 2u32..=9) {
        let poly = generate_recursive(n, &params_from_alpha(alpha).unwrap()).unwrap();
        let pad = DEFAULT_CONTACT_TOL * poly.edge_length();
        let bb: Vec<(Point, Point)> = poly.vertices.windows(2).map(|w| (
            Point::new(w[0].x.min(w[1].x) - pad, w[0].y.min(w[1].y) - pad),
            Point::new(w[0].x.max(w[1].x) + pad, w[0].y.max(w[1].y) + pad),
        )).collect();
        let mut expected = Vec::new();
        for i in 0..bb.len() {
            for j in i + 2..bb.len() {
                let (a, b) = (bb[i], bb[j]);
                if a.0.x <= b.1.x && b.0.x <= a.1.x && a.0.y <= b.1.y && b.0.y <= a.1.y {
                    expected.push((i, j));
                }
            }
        }
        prop_assert_eq!(candidate_pairs(&poly, DEFAULT_CONTACT_TOL), expected);
    }

    #[test]
    fn membership_is_similarity_invariant(alpha in 90.0..108.0f64, r in 0.0..1.2f64, th in -180.0..180.0f64,
                                          rot in -720.0..720.0f64, scale in 0.01..3.0f64,
                                          tx in -2.0..2.0f64, ty in -2.0..2.0f64) {
        let p = params_from_alpha(alpha).unwrap();
        let h = build_hull(&p);
        let sim = Similarity::new(rot, scale, Point::new(tx, ty));
        let moved = transform_hull(&h, &sim);
        let pt = Point::ORIGIN.polar_offset(r, th);
        let m0 = membership(&h, pt).margin;
        let m1 = membership(&moved, sim.apply(pt)).margin;
        prop_assert!((m0 - m1).abs() < 1e-7, "{} vs {}", m0, m1);
    }

    #[test]
    fn segment_blocks_stay_in_segment_hulls(alpha in 98.2..108.0f64, k in 1u64..15) {
        // Each level-4 segment carries a scaled copy of Q_8; its vertices
        // lie in that segment's hull.
        let p = params_from_alpha(alpha).unwrap();
        let poly = generate_recursive(12, &p).unwrap();
        let h = dragon_core::hull::hull_for_segment(4, k, &p).unwrap();
        let block = &poly.vertices[(k as usize) * 256..=(k as usize + 1) * 256];
        for &v in block {
            prop_assert!(membership(&h, v).margin >= -1e-9);
        }
    }
}

fn event_key(r: &CrossingReport) -> Vec<(usize, usize, String)> {
    r.events
        .iter()
        .map(|e| (e.seg_i, e.seg_j, format!("{:?}", e.kind)))
        .collect()
}

#[test]
fn contacts_match_brute_force() {
    for alpha in [90.0, 92.0, 93.06, 95.0, 98.195, 100.0, 108.0] {
        let p = params_from_alpha(alpha).unwrap();
        for n in 1..=8 {
            let poly = generate_recursive(n, &p).unwrap();
            let fast = find_contacts(&poly, DEFAULT_CONTACT_TOL).unwrap();
            let slow = find_contacts_brute_force(&poly, DEFAULT_CONTACT_TOL);
            assert_eq!(fast.events, slow.events, "alpha {alpha} n {n}");
            assert_eq!(event_key(&fast), event_key(&slow));
            for e in &fast.events {
                assert!(e.seg_j > e.seg_i + 1);
            }
        }
    }
}

#[test]
fn contacts_independent_of_thread_count() {
    let poly = generate_recursive(13, &params_from_alpha(93.0).unwrap()).unwrap();
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let mut r = pool.install(|| find_contacts(&poly, DEFAULT_CONTACT_TOL).unwrap());
        r.wall_time_ms = 0.0;
        r
    };
    let one = run(1);
    assert!(one.proper_crossings > 0);
    assert_eq!(one, run(4));
    assert_eq!(one, run(3));
}

fn best_time(n: u32) -> Duration {
    let poly = generate_recursive(n, &params_from_alpha(100.0).unwrap()).unwrap();
    (0..5)
        .map(|_| {
            let t = Instant::now();
            find_contacts(&poly, DEFAULT_CONTACT_TOL).unwrap();
            t.elapsed()
        })
        .min()
        .unwrap()
}

#[test]
fn contact_search_scales_linearly() {
    let (a, b) = (best_time(15), best_time(16));
    let ratio = b.as_secs_f64() / a.as_secs_f64();
    assert!(ratio < 2.5, "n=15 {a:?}, n=16 {b:?}, ratio {ratio}");
}

/// q values of the regression grid: 100 points on [0.524, 1/sqrt 2].
fn q_grid() -> Vec<f64> {
    let (lo, hi) = (0.524, std::f64::consts::FRAC_1_SQRT_2);
    (0..100).map(|i| lo + (hi - lo) * i as f64 / 99.0).collect()
}

#[test]
fn catalog_holds_on_quoted_ranges() {
    for c in condition_catalog() {
        let range = c.quoted.expect("every condition quotes a range");
        let mut checked = 0;
        for q in q_grid() {
            if q < range.q_min || q > range.q_max {
                continue;
            }
            let p = params_from_q(q).unwrap();
            let v = (c.evaluate)(&p);
            assert!(v > 0.0, "{} fails at q = {q} ({}): {v}", c.id, range.text);
            checked += 1;
        }
        assert!(checked > 0, "{} has no grid point in range", c.id);
    }
}

#[test]
fn sharp_ranges_flip_just_outside() {
    for c in condition_catalog() {
        let range = c.quoted.unwrap();
        if !range.sharp {
            continue;
        }
        for end in [range.q_min, range.q_max] {
            if end <= 0.5 || end >= std::f64::consts::FRAC_1_SQRT_2 + 0.05 {
                continue;
            }
            let inside = (end + 0.5 * (range.q_min + range.q_max)) / 2.0;
            let dir = if end == range.q_min { -1.0 } else { 1.0 };
            let outside = end + dir * 2e-3;
            let v_in = (c.evaluate)(&params_from_q(inside).unwrap());
            let v_out = (c.evaluate)(&params_from_q(outside).unwrap());
            assert!(v_in > 0.0 && v_out < 0.0, "{} at {end}: {v_in} {v_out}", c.id);
        }
    }
}

#[test]
fn l6a_sign_pattern() {
    let at = |q: f64| evaluate_condition("L6a", &params_from_q(q).unwrap()).unwrap();
    for q in q_grid() {
        let expect = (0.524..=0.724).contains(&q);
        assert_eq!(at(q) > 0.0, expect, "q = {q}");
    }
    assert!(at(0.52) < 0.0 && at(0.728) < 0.0 && at(0.526) > 0.0 && at(0.722) > 0.0);
}

#[test]
fn l9_perp_threshold_near_113() {
    let t = find_threshold("L9-perp", [108.0, 118.0], 1e-4).unwrap();
    assert!((t.critical_alpha_deg - 113.0).abs() <= 0.5, "{t:?}");
}

#[test]
fn l11_threshold_in_table_gap() {
    let t = find_threshold("L11", [95.0, 97.0], 1e-4).unwrap();
    assert!(t.alpha_lo > 96.240 && t.alpha_hi < 96.241, "{t:?}");
}

#[test]
fn exact_rational_helper_sanity() {
    // Guards the oracle itself: a determinant known to be exactly zero.
    let a = Point::new(0.1, 0.2);
    let b = Point::new(0.3, 0.6);
    let c = Point::new(0.5, 1.0);
    let exact = exact_orient(a, b, c);
    assert_eq!(sign(orient2d(a, b, c)), exact);
}
