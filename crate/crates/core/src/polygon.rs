//! Plane points, direct similarities and the paperfolding polygons `Q_n`.
//!
//! Coordinates are normalised so that `Q_0` runs from `(0, 0)` to `(1, 0)`.
//! Angles are counterclockwise-positive, which puts the first apex
//! `P(1,1)` below the x-axis.

use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::error::{DragonError, Result};
use crate::params::AngleParams;
use crate::sequence::{sigma, FoldSymbol};

/// Largest level the generators will build (2^24 + 1 vertices).
pub const MAX_LEVEL: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Point at distance `r` and polar angle `deg` from `self`.
    #[inline]
    pub fn polar_offset(self, r: f64, deg: f64) -> Self {
        let (s, c) = deg.to_radians().sin_cos();
        Self::new(self.x + r * c, self.y + r * s)
    }

    #[inline]
    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 2-D cross product.
    #[inline]
    pub fn cross(self, o: Self) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist(self, o: Self) -> f64 {
        (self - o).norm()
    }

    /// Polar angle in degrees, in `(-180, 180]`.
    #[inline]
    pub fn angle_deg(self) -> f64 {
        self.y.atan2(self.x).to_degrees()
    }

    #[inline]
    pub fn rotate_deg(self, deg: f64) -> Self {
        let (s, c) = deg.to_radians().sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// A direct similarity `p -> scale * R(rotation) p + translation`.
///
/// The rotation is kept unwrapped (not reduced mod 360) because spiral
/// phases are shifted by it and the hull formulas use unwrapped angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Similarity {
    pub rotation_deg: f64,
    pub scale: f64,
    pub translation: Point,
}

impl Similarity {
    pub const IDENTITY: Similarity = Similarity {
        rotation_deg: 0.0,
        scale: 1.0,
        translation: Point::ORIGIN,
    };

    pub fn new(rotation_deg: f64, scale: f64, translation: Point) -> Self {
        debug_assert!(scale > 0.0);
        Self {
            rotation_deg,
            scale,
            translation,
        }
    }

    #[inline]
    pub fn apply(&self, p: Point) -> Point {
        p.rotate_deg(self.rotation_deg) * self.scale + self.translation
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &Similarity) -> Similarity {
        Similarity {
            rotation_deg: self.rotation_deg + inner.rotation_deg,
            scale: self.scale * inner.scale,
            translation: self.apply(inner.translation),
        }
    }

    pub fn inverse(&self) -> Similarity {
        let rot = -self.rotation_deg;
        let scale = 1.0 / self.scale;
        Similarity {
            rotation_deg: rot,
            scale,
            translation: -(self.translation.rotate_deg(rot) * scale),
        }
    }
}

/// `pi_0`: rotate by `-beta` and scale by `q` about the origin.
pub fn make_pi0(params: &AngleParams) -> Similarity {
    Similarity::new(-params.beta_deg, params.q, Point::ORIGIN)
}

/// `pi_1`: rotate by `beta - 180` and scale by `q` about the origin, then
/// translate by `(1, 0)`.
pub fn make_pi1(params: &AngleParams) -> Similarity {
    Similarity::new(params.beta_deg - 180.0, params.q, Point::new(1.0, 0.0))
}

/// The level-`n` paperfolding polygon: `2^n + 1` vertices, `2^n` edges.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldPolygon {
    pub level: u32,
    pub params: AngleParams,
    pub vertices: Vec<Point>,
}

impl FoldPolygon {
    pub fn segment_count(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Common length of every edge, `q^n`.
    pub fn edge_length(&self) -> f64 {
        self.params.q.powi(self.level as i32)
    }

    pub fn vertex(&self, k: usize) -> Point {
        self.vertices[k]
    }

    pub fn segment(&self, k: usize) -> (Point, Point) {
        (self.vertices[k], self.vertices[k + 1])
    }

    /// Signed turn at interior vertex `k` (positive for a left turn).
    pub fn turn_cross(&self, k: usize) -> f64 {
        let a = self.vertices[k - 1];
        let b = self.vertices[k];
        let c = self.vertices[k + 1];
        (b - a).cross(c - b)
    }

    /// Unsigned interior angle at vertex `k`, in degrees.
    pub fn interior_angle_deg(&self, k: usize) -> f64 {
        let u = self.vertices[k - 1] - self.vertices[k];
        let v = self.vertices[k + 1] - self.vertices[k];
        u.cross(v).abs().atan2(u.dot(v)).to_degrees()
    }
}

fn guard_level(n: u32) -> Result<()> {
    if n > MAX_LEVEL {
        Err(DragonError::Resource {
            level: n,
            max: MAX_LEVEL,
        })
    } else {
        Ok(())
    }
}

/// `Q_n` by `Q_{k+1} = pi_0(Q_k) ∪ pi_1(Q_k)`.
///
/// `pi_0(Q_{n-1})` fills indices `0..=2^(n-1)` in order; `pi_1` reverses
/// traversal, `pi_1(P(n-1, j)) = P(n, 2^n - j)`.
///
/// Every interior vertex is the image of `P(1,1)` under one composed map,
/// so rounding error grows with the number of compositions (at most `n`)
/// and not with the number of vertices.
pub fn generate_recursive(n: u32, params: &AngleParams) -> Result<FoldPolygon> {
    guard_level(n)?;
    let p01 = Point::new(1.0, 0.0);
    let len = 1usize << n;
    let mut vertices = vec![Point::ORIGIN; len + 1];
    vertices[len] = p01;
    if n > 0 {
        let maps = (make_pi0(params), make_pi1(params));
        let apex = maps.0.apply(p01);
        fill_block(&mut vertices[1..len], &Similarity::IDENTITY, true, apex, &maps);
    }
    Ok(FoldPolygon {
        level: n,
        params: *params,
        vertices,
    })
}

const PARALLEL_BLOCK: usize = 1 << 12;

/// Fills the interior vertices of one dyadic block. `map` sends `Q_0` onto
/// the block's chord; `origin_first` says whether it sends `P(0,0)` to the
/// block start (true exactly when the block index is even).
fn fill_block(
    interior: &mut [Point],
    map: &Similarity,
    origin_first: bool,
    apex: Point,
    maps: &(Similarity, Similarity),
) {
    let mid = interior.len() / 2;
    interior[mid] = map.apply(apex);
    if interior.len() == 1 {
        return;
    }
    let via0 = map.compose(&maps.0);
    let via1 = map.compose(&maps.1);
    let (first, second) = if origin_first { (via0, via1) } else { (via1, via0) };
    let (left, rest) = interior.split_at_mut(mid);
    let right = &mut rest[1..];
    // Child 2i is even, child 2i + 1 odd.
    if left.len() >= PARALLEL_BLOCK {
        rayon::join(
            || fill_block(left, &first, true, apex, maps),
            || fill_block(right, &second, false, apex, maps),
        );
    } else {
        fill_block(left, &first, true, apex, maps);
        fill_block(right, &second, false, apex, maps);
    }
}

/// `Q_n` by repeated edge inflation: every edge, directed from its even to
/// its odd endpoint, gets an isosceles apex on its right-hand side.
pub fn generate_inflation(n: u32, params: &AngleParams) -> Result<FoldPolygon> {
    guard_level(n)?;
    let mut vertices = vec![Point::ORIGIN, Point::new(1.0, 0.0)];
    for _ in 0..n {
        let mut next = Vec::with_capacity(2 * vertices.len() - 1);
        for (k, w) in vertices.windows(2).enumerate() {
            let (from, to) = if k % 2 == 0 { (w[0], w[1]) } else { (w[1], w[0]) };
            next.push(w[0]);
            next.push(inflation_apex(from, to, params));
        }
        next.push(*vertices.last().unwrap());
        vertices = next;
    }
    Ok(FoldPolygon {
        level: n,
        params: *params,
        vertices,
    })
}

/// Apex of the isosceles triangle with base `from -> to`, on the right.
#[inline]
fn inflation_apex(from: Point, to: Point, params: &AngleParams) -> Point {
    from + (to - from).rotate_deg(-params.beta_deg) * params.q
}

/// Index chain `k, 16k + 1, 256k + 17, ...` for the left-turn collinear run.
pub fn left_run_indices(n: u32, k: u64, depth: u32) -> Vec<(u32, u64)> {
    let mut out = vec![(n, k)];
    let mut idx = k;
    for m in 1..=depth {
        idx = 16 * idx + 1;
        out.push((n + 4 * m, idx));
    }
    out
}

/// Index chain `k, 16k - 1, 256k - 17, ...` for the right-turn collinear run.
pub fn right_run_indices(n: u32, k: u64, depth: u32) -> Vec<(u32, u64)> {
    let mut out = vec![(n, k)];
    let mut idx = k;
    for m in 1..=depth {
        idx = 16 * idx - 1;
        out.push((n + 4 * m, idx));
    }
    out
}

/// Result of a collinear-run check: the points in order and the largest
/// normalised deviation from the line through the first two.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollinearRun {
    pub points: Vec<Point>,
    pub max_deviation: f64,
    pub collinear: bool,
}

fn vertex_at(level: u32, k: u64, params: &AngleParams, cache: &mut Vec<Option<FoldPolygon>>) -> Result<Point> {
    let slot = level as usize;
    if cache.len() <= slot {
        cache.resize(slot + 1, None);
    }
    if cache[slot].is_none() {
        cache[slot] = Some(generate_recursive(level, params)?);
    }
    let poly = cache[slot].as_ref().unwrap();
    poly.vertices
        .get(k as usize)
        .copied()
        .ok_or(DragonError::IndexOutOfRange {
            level,
            index: k,
            count: poly.vertices.len() as u64,
        })
}

fn run_deviation(points: &[Point]) -> f64 {
    let a = points[0];
    let dir = points[1] - a;
    let len = dir.norm();
    points[2..]
        .iter()
        .map(|&p| (dir.cross(p - a) / len).abs() / len)
        .fold(0.0, f64::max)
}

fn check_run(
    anchor: (u32, u64),
    chain: Vec<(u32, u64)>,
    params: &AngleParams,
    tol: f64,
) -> Result<CollinearRun> {
    let mut cache = Vec::new();
    let mut points = vec![vertex_at(anchor.0, anchor.1, params, &mut cache)?];
    for (lvl, idx) in chain {
        points.push(vertex_at(lvl, idx, params, &mut cache)?);
    }
    let max_deviation = run_deviation(&points);
    Ok(CollinearRun {
        points,
        max_deviation,
        collinear: max_deviation <= tol,
    })
}

/// Left turn at odd `k`: `P(n,k-1)`, `P(n,k)`, `P(n+4,16k+1)`, `P(n+8,256k+17)`, ...
/// lie on one line. Deviation is the cross product normalised by the
/// squared first-edge length.
pub fn check_collinearity_left(
    n: u32,
    k: u64,
    depth: u32,
    params: &AngleParams,
    tol: f64,
) -> Result<CollinearRun> {
    precondition_turn(n, k, depth, FoldSymbol::L)?;
    check_run((n, k - 1), left_run_indices(n, k, depth), params, tol)
}

/// Right turn at odd `k`: `P(n,k+1)`, `P(n,k)`, `P(n+4,16k-1)`, `P(n+8,256k-17)`, ...
/// lie on one line.
pub fn check_collinearity_right(
    n: u32,
    k: u64,
    depth: u32,
    params: &AngleParams,
    tol: f64,
) -> Result<CollinearRun> {
    precondition_turn(n, k, depth, FoldSymbol::R)?;
    check_run((n, k + 1), right_run_indices(n, k, depth), params, tol)
}

fn precondition_turn(n: u32, k: u64, depth: u32, want: FoldSymbol) -> Result<()> {
    if k.is_multiple_of(2) || k >= (1u64 << n) {
        return Err(DragonError::Precondition(format!(
            "k = {k} must be odd and interior at level {n}"
        )));
    }
    if sigma(k) != want {
        return Err(DragonError::Precondition(format!(
            "turn at P({n},{k}) is {}, expected {want}",
            sigma(k)
        )));
    }
    guard_level(n + 4 * depth)
}
