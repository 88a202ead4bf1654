//! One-dimensional sets as finite unions of closed segments, with exact
//! length measure and exact clipping against balls, double cones and
//! annuli. Also hosts the built-in example sets: the T-shape `E`, the
//! dyadic-block set `F`, the parabola set `S`, rotation unions and regular
//! polygons.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{self, Point};
use crate::scaled::ScaledReal;

type P = Point<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SetError {
    #[error("zero-length segment")]
    ZeroLengthSegment,
    #[error("dimension mismatch in segment list")]
    DimensionMismatch,
    #[error("empty segment set")]
    EmptySet,
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("rotation plane must be a pair of orthonormal vectors")]
    NonOrthonormalPlane,
    #[error("geometry error: {0}")]
    Geom(#[from] geom::GeomError),
}

/// A closed segment with cached length.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    p: P,
    q: P,
    length: f64,
}

impl Segment {
    pub fn new(p: P, q: P) -> Result<Self, SetError> {
        if p.dim() != q.dim() {
            return Err(SetError::DimensionMismatch);
        }
        let length = p.dist(&q);
        if length <= geom::coincide_tol(&[&p, &q]) {
            return Err(SetError::ZeroLengthSegment);
        }
        Ok(Segment { p, q, length })
    }

    pub fn start(&self) -> &P {
        &self.p
    }

    pub fn end(&self) -> &P {
        &self.q
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn point_at(&self, t: f64) -> P {
        self.p.lerp(&self.q, t)
    }

    pub fn direction(&self) -> P {
        self.q.sub(&self.p).scale(1.0 / self.length)
    }

    /// Distance from a point to this (closed) segment.
    pub fn dist_to_point(&self, x: &P) -> f64 {
        let v = self.q.sub(&self.p);
        let w = x.sub(&self.p);
        let t = (w.dot(&v) / (self.length * self.length)).clamp(0.0, 1.0);
        x.dist(&self.point_at(t))
    }

    /// Parameter interval of the part inside the closed ball `B_r(x)`,
    /// clipped to `[0, 1]`; `None` when the segment misses the ball.
    pub fn ball_interval(&self, x: &P, r: f64) -> Option<(f64, f64)> {
        let v = self.q.sub(&self.p);
        let w = self.p.sub(x);
        let a = v.dot(&v);
        let b = v.dot(&w);
        let c = w.dot(&w) - r * r;
        let disc = b * b - a * c;
        if disc < 0.0 {
            return None;
        }
        let sq = disc.sqrt();
        let t0 = ((-b - sq) / a).max(0.0);
        let t1 = ((-b + sq) / a).min(1.0);
        if t1 > t0 {
            Some((t0, t1))
        } else {
            None
        }
    }
}

/// A dyadic block on a coordinate axis with `ScaledReal` endpoints; the
/// representation of the set-`F` pieces that live below `f64` range.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledBlock {
    /// 0 = first coordinate axis, 1 = second.
    pub axis: usize,
    pub lo: ScaledReal,
    pub hi: ScaledReal,
}

impl ScaledBlock {
    pub fn length(&self) -> ScaledReal {
        self.hi
            .checked_sub(&self.lo)
            .expect("block endpoints ordered")
    }

    /// Exact length of the block intersected with `[0, r]` on its axis
    /// (the block seen from the origin inside the closed ball of radius
    /// `r`).
    pub fn clipped_length(&self, r: &ScaledReal) -> ScaledReal {
        if *r <= self.lo {
            ScaledReal::ZERO
        } else if *r >= self.hi {
            self.length()
        } else {
            r.checked_sub(&self.lo).unwrap()
        }
    }
}

/// An open double cone: apex, unit direction and half opening angle.
#[derive(Debug, Clone)]
pub struct Cone {
    pub apex: P,
    pub direction: P,
    pub half_angle: f64,
}

impl Cone {
    pub fn new(apex: P, direction: P, half_angle: f64) -> Result<Self, SetError> {
        if apex.dim() != direction.dim() {
            return Err(SetError::DimensionMismatch);
        }
        if (direction.norm() - 1.0).abs() > 1e-14 {
            return Err(SetError::OutOfRange("cone direction must be unit".into()));
        }
        if !(half_angle > 0.0 && half_angle < std::f64::consts::PI) {
            return Err(SetError::OutOfRange("cone half angle must be in (0, pi)".into()));
        }
        Ok(Cone {
            apex,
            direction,
            half_angle,
        })
    }

    /// Membership in the open double cone: the direction from the apex is
    /// strictly within `half_angle` of the axis or its negation.
    pub fn contains(&self, y: &P) -> bool {
        let d = y.sub(&self.apex);
        let n2 = d.dot(&d);
        if n2 == 0.0 {
            return false;
        }
        let proj = d.dot(&self.direction);
        let cos_eps = self.half_angle.cos();
        // |cos angle| > cos(eps) covers both cone halves; for eps > pi/2
        // the right-hand side is negative and everything but the apex is in
        proj * proj > cos_eps * cos_eps.abs() * n2
    }
}

/// The exponent ladder `e_n = n^n * n^3` and blocks of the set `F`.
#[derive(Debug, Clone)]
pub struct DyadicLadder {
    pub exponents: Vec<i64>,
    pub blocks: Vec<ScaledBlock>,
}

impl DyadicLadder {
    /// `a_n = 2^(-e_n)` as a `ScaledReal` (1-based `n`).
    pub fn a(&self, n: usize) -> ScaledReal {
        ScaledReal::from_exp2(-self.exponents[n - 1])
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }
}

/// `e_n = n^n * n^3` exactly, for `n <= 8`.
pub fn block_exponent(n: usize) -> i64 {
    assert!((1..=8).contains(&n));
    let nn = (n as i64).pow(n as u32);
    nn * (n as i64).pow(3)
}

/// A finite union of closed segments with exact length measure.
///
/// Segments are kept in a canonical lexicographic order (each oriented so
/// that its start precedes its end), which pins down arclength sampling.
/// Sets built from dyadic blocks additionally carry the exact
/// `ScaledReal` description; blocks whose scale fits in `f64` are mirrored
/// as ordinary segments so the floating-point queries see them.
#[derive(Debug, Clone)]
pub struct SegmentSet {
    dim: usize,
    segments: Vec<Segment>,
    scaled_blocks: Vec<ScaledBlock>,
    cum: Vec<f64>,
    total: f64,
}

fn lex_le(a: &P, b: &P) -> bool {
    for (x, y) in a.coords().iter().zip(b.coords().iter()) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    true
}

impl SegmentSet {
    /// Build a set from segments without overlap merging. The caller
    /// guarantees pairwise overlaps of zero length (abutting is fine);
    /// the built-in constructors use this to keep components like the
    /// arms of `E` individually addressable.
    pub fn from_raw_segments(segments: Vec<Segment>) -> Result<Self, SetError> {
        if segments.is_empty() {
            return Err(SetError::EmptySet);
        }
        let dim = segments[0].p.dim();
        if segments.iter().any(|s| s.p.dim() != dim) {
            return Err(SetError::DimensionMismatch);
        }
        let mut oriented: Vec<Segment> = segments
            .into_iter()
            .map(|s| {
                if lex_le(&s.p, &s.q) {
                    s
                } else {
                    Segment {
                        p: s.q.clone(),
                        q: s.p.clone(),
                        length: s.length,
                    }
                }
            })
            .collect();
        oriented.sort_by(|a, b| {
            let key = |s: &Segment| {
                s.p.coords()
                    .iter()
                    .chain(s.q.coords().iter())
                    .copied()
                    .collect::<Vec<f64>>()
            };
            key(a).partial_cmp(&key(b)).unwrap()
        });
        let mut cum = Vec::with_capacity(oriented.len());
        let mut total = 0.0;
        for s in &oriented {
            total += s.length;
            cum.push(total);
        }
        Ok(SegmentSet {
            dim,
            segments: oriented,
            scaled_blocks: Vec::new(),
            cum,
            total,
        })
    }

    /// Build a normalized set from endpoint pairs: collinear overlapping or
    /// abutting inputs are merged, so pairwise overlaps of the result have
    /// zero length.
    pub fn new(pairs: &[(P, P)]) -> Result<Self, SetError> {
        if pairs.is_empty() {
            return Err(SetError::EmptySet);
        }
        let segments: Vec<Segment> = pairs
            .iter()
            .map(|(p, q)| Segment::new(p.clone(), q.clone()))
            .collect::<Result<_, _>>()?;
        let merged = merge_collinear(segments)?;
        SegmentSet::from_raw_segments(merged)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn scaled_blocks(&self) -> &[ScaledBlock] {
        &self.scaled_blocks
    }

    pub fn total_measure(&self) -> f64 {
        self.total
    }

    fn with_scaled_blocks(mut self, blocks: Vec<ScaledBlock>) -> Self {
        self.scaled_blocks = blocks;
        self
    }

    /// Exact length of the set inside the closed ball `B_r(x)`.
    pub fn measure_in_ball(&self, x: &P, r: f64) -> f64 {
        assert!(r > 0.0, "ball radius must be positive");
        self.segments
            .iter()
            .filter_map(|s| s.ball_interval(x, r).map(|(t0, t1)| (t1 - t0) * s.length))
            .sum()
    }

    /// Exact lengths of `X` inside the closed ball around the cone apex,
    /// split into the part inside the open double cone and the part
    /// outside it.
    pub fn slice_cone_ball(&self, cone: &Cone, r: f64) -> (f64, f64) {
        let mut inside = 0.0;
        let mut outside = 0.0;
        let cos_eps = cone.half_angle.cos();
        for seg in &self.segments {
            let Some((b0, b1)) = seg.ball_interval(&cone.apex, r) else {
                continue;
            };
            // cone boundary crossings: ((p + t v - a) . s)^2 = cos^2 eps |p + t v - a|^2
            let v = seg.q.sub(&seg.p);
            let w = seg.p.sub(&cone.apex);
            let a_coef = {
                let bs = v.dot(&cone.direction);
                let e = v.dot(&v);
                bs * bs - cos_eps * cos_eps.abs() * e
            };
            let ws = w.dot(&cone.direction);
            let vs = v.dot(&cone.direction);
            let b_coef = ws * vs - cos_eps * cos_eps.abs() * w.dot(&v);
            let c_coef = ws * ws - cos_eps * cos_eps.abs() * w.dot(&w);
            let mut cuts = vec![b0, b1];
            let disc = b_coef * b_coef - a_coef * c_coef;
            if a_coef.abs() > 0.0 && disc > 0.0 {
                let sq = disc.sqrt();
                for t in [(-b_coef - sq) / a_coef, (-b_coef + sq) / a_coef] {
                    if t > b0 && t < b1 {
                        cuts.push(t);
                    }
                }
            } else if a_coef == 0.0 && b_coef.abs() > 0.0 {
                let t = -c_coef / (2.0 * b_coef);
                if t > b0 && t < b1 {
                    cuts.push(t);
                }
            }
            cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for pair in cuts.windows(2) {
                let (t0, t1) = (pair[0], pair[1]);
                if t1 <= t0 {
                    continue;
                }
                let mut mid = seg.point_at(0.5 * (t0 + t1));
                // a piece whose midpoint is the apex crosses the apex along
                // a line; the double cone is symmetric under that crossing,
                // so any other interior point classifies the whole piece
                if mid.dist(&cone.apex) <= 1e-9 * (t1 - t0) * seg.length {
                    mid = seg.point_at(t0 + 0.75 * (t1 - t0));
                }
                let piece = (t1 - t0) * seg.length;
                if cone.contains(&mid) {
                    inside += piece;
                } else {
                    outside += piece;
                }
            }
        }
        (inside, outside)
    }

    /// Exact length of `(X ∩ B_r(apex)) \ C`.
    pub fn measure_in_cone_complement(&self, cone: &Cone, r: f64) -> f64 {
        self.slice_cone_ball(cone, r).1
    }

    /// Exact length of `X ∩ B_r(apex) ∩ C`.
    pub fn measure_in_cone(&self, cone: &Cone, r: f64) -> f64 {
        self.slice_cone_ball(cone, r).0
    }

    /// Exact length in the annulus `B_r_out(x) \ B_r_in(x)`
    /// (closed outer, open inner; single points carry no length).
    pub fn measure_in_annulus(&self, x: &P, r_in: f64, r_out: f64) -> f64 {
        assert!(r_in >= 0.0 && r_out > r_in, "annulus radii out of order");
        let outer = self.measure_in_ball(x, r_out);
        let inner = if r_in > 0.0 {
            self.measure_in_ball(x, r_in)
        } else {
            0.0
        };
        outer - inner
    }

    /// Arclength-uniform point: `u * total_measure` mapped through the
    /// canonically ordered segments.
    pub fn sample_point(&self, u: f64) -> Result<P, SetError> {
        if !(0.0..1.0).contains(&u) {
            return Err(SetError::OutOfRange(format!("u = {u} not in [0,1)")));
        }
        if self.total <= 0.0 {
            return Err(SetError::EmptySet);
        }
        let target = u * self.total;
        let idx = self.cum.partition_point(|&c| c <= target);
        let idx = idx.min(self.segments.len() - 1);
        let prev = if idx == 0 { 0.0 } else { self.cum[idx - 1] };
        let seg = &self.segments[idx];
        let t = (target - prev) / seg.length;
        Ok(seg.point_at(t))
    }

    /// The part of the set inside the closed ball, as a new set of clipped
    /// segments. Pieces shorter than a relative floor are dropped.
    pub fn clip_to_ball(&self, x: &P, r: f64) -> Option<SegmentSet> {
        let mut out = Vec::new();
        for seg in &self.segments {
            if let Some((t0, t1)) = seg.ball_interval(x, r) {
                if (t1 - t0) * seg.length > 1e-13 * (1.0 + r) {
                    if let Ok(s) = Segment::new(seg.point_at(t0), seg.point_at(t1)) {
                        out.push(s);
                    }
                }
            }
        }
        if out.is_empty() {
            None
        } else {
            Some(SegmentSet::from_raw_segments(out).expect("clipped segments valid"))
        }
    }

    /// Exact measure of the dyadic blocks inside the closed ball `[0, r]`
    /// around the origin. Only meaningful for block-backed sets like `F`.
    pub fn scaled_measure_in_ball(&self, r: &ScaledReal) -> ScaledReal {
        self.scaled_blocks
            .iter()
            .fold(ScaledReal::ZERO, |acc, b| acc.add(&b.clipped_length(r)))
    }

    /// Per-axis exact block measure inside the ball `[0, r]` at the origin.
    pub fn scaled_axis_measures_in_ball(&self, r: &ScaledReal) -> [ScaledReal; 2] {
        let mut axes = [ScaledReal::ZERO, ScaledReal::ZERO];
        for b in &self.scaled_blocks {
            axes[b.axis] = axes[b.axis].add(&b.clipped_length(r));
        }
        axes
    }
}

/// Merge collinear overlapping or abutting segments; non-collinear
/// segments pass through unchanged.
fn merge_collinear(segments: Vec<Segment>) -> Result<Vec<Segment>, SetError> {
    let scale = segments
        .iter()
        .flat_map(|s| [s.p.max_abs_coord(), s.q.max_abs_coord()])
        .fold(0.0_f64, f64::max);
    let tol = 1e-12 * (1.0 + scale);

    // group index per segment, by shared infinite line
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, seg) in segments.iter().enumerate() {
        let mut placed = false;
        for group in groups.iter_mut() {
            let rep = &segments[group[0]];
            let on_line = |pt: &P| {
                geom::dist_point_to_line(pt, &rep.p, &rep.q)
                    .map(|d| d <= tol)
                    .unwrap_or(false)
            };
            if on_line(&seg.p) && on_line(&seg.q) {
                group.push(i);
                placed = true;
                break;
            }
        }
        if !placed {
            groups.push(vec![i]);
        }
    }

    let mut merged = Vec::new();
    for group in groups {
        if group.len() == 1 {
            merged.push(segments[group[0]].clone());
            continue;
        }
        let rep = &segments[group[0]];
        let dir = rep.direction();
        let anchor = rep.p.clone();
        let mut intervals: Vec<(f64, f64)> = group
            .iter()
            .map(|&i| {
                let s = &segments[i];
                let a = s.p.sub(&anchor).dot(&dir);
                let b = s.q.sub(&anchor).dot(&dir);
                (a.min(b), a.max(b))
            })
            .collect();
        intervals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut cur = intervals[0];
        let flush = |iv: (f64, f64), out: &mut Vec<Segment>| -> Result<(), SetError> {
            let p = anchor.add(&dir.scale(iv.0));
            let q = anchor.add(&dir.scale(iv.1));
            out.push(Segment::new(p, q)?);
            Ok(())
        };
        for iv in intervals.into_iter().skip(1) {
            if iv.0 <= cur.1 + tol {
                cur.1 = cur.1.max(iv.1);
            } else {
                flush(cur, &mut merged)?;
                cur = iv;
            }
        }
        flush(cur, &mut merged)?;
    }
    Ok(merged)
}

// ---------------------------------------------------------------------------
// built-in sets
// ---------------------------------------------------------------------------

fn xy(x: f64, y: f64) -> P {
    Point::xy(x, y)
}

/// The T-shape `E = ([-1,1] x {0}) ∪ ({0} x [0,1])` with its three arms
/// kept as separate segments.
pub fn set_e() -> SegmentSet {
    SegmentSet::from_raw_segments(vec![
        Segment::new(xy(-1.0, 0.0), xy(0.0, 0.0)).unwrap(),
        Segment::new(xy(0.0, 0.0), xy(0.0, 1.0)).unwrap(),
        Segment::new(xy(0.0, 0.0), xy(1.0, 0.0)).unwrap(),
    ])
    .unwrap()
}

/// One arm of `E`: 0 is `[-1,0] x {0}`, 1 is `{0} x [0,1]`, 2 is
/// `[0,1] x {0}`.
pub fn set_e_component(i: usize) -> SegmentSet {
    let seg = match i {
        0 => Segment::new(xy(-1.0, 0.0), xy(0.0, 0.0)),
        1 => Segment::new(xy(0.0, 0.0), xy(0.0, 1.0)),
        2 => Segment::new(xy(0.0, 0.0), xy(1.0, 0.0)),
        _ => panic!("E has components 0..3"),
    };
    SegmentSet::from_raw_segments(vec![seg.unwrap()]).unwrap()
}

/// The dyadic ladder of `F` up to `n_max`: exponents `e_n = n^n n^3`,
/// blocks `[a_n/2, a_n]` on the first axis for even `n` and on the second
/// axis for odd `n`.
pub fn dyadic_ladder(n_max: usize) -> Result<DyadicLadder, SetError> {
    if !(1..=8).contains(&n_max) {
        return Err(SetError::OutOfRange(format!(
            "F truncation must satisfy 1 <= n_max <= 8, got {n_max}"
        )));
    }
    let exponents: Vec<i64> = (1..=n_max).map(block_exponent).collect();
    let blocks = exponents
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let n = i + 1;
            ScaledBlock {
                axis: if n % 2 == 0 { 0 } else { 1 },
                lo: ScaledReal::from_exp2(-e - 1),
                hi: ScaledReal::from_exp2(-e),
            }
        })
        .collect();
    Ok(DyadicLadder { exponents, blocks })
}

/// Truncation of the set `F`: blocks `B_1..B_n_max`. Blocks whose scale is
/// representable in `f64` are mirrored as ordinary segments; deeper blocks
/// exist only in the exact description (their length is far below every
/// floating-point tolerance).
pub fn set_f(n_max: usize) -> Result<SegmentSet, SetError> {
    let ladder = dyadic_ladder(n_max)?;
    let mut segments = Vec::new();
    for (i, &e) in ladder.exponents.iter().enumerate() {
        let n = i + 1;
        if e + 1 <= 1020 {
            let hi = 2f64.powi(-(e as i32));
            let lo = hi / 2.0;
            let (p, q) = if n % 2 == 0 {
                (xy(lo, 0.0), xy(hi, 0.0))
            } else {
                (xy(0.0, lo), xy(0.0, hi))
            };
            // blocks whose length falls under the absolute coincidence
            // floor have no meaningful float mirror; the exact blocks
            // still carry them
            if let Ok(seg) = Segment::new(p, q) {
                segments.push(seg);
            }
        }
    }
    Ok(SegmentSet::from_raw_segments(segments)?.with_scaled_blocks(ladder.blocks))
}

/// The set `S`: the flat segment `[0,1] x {0}` plus a chordal polyline on
/// the parabola `y = x^2`, with knots concentrated dyadically toward the
/// apex. Each dyadic band `[2^-(k+1), 2^-k]` is split into four uniform
/// chords; the first knot above zero sits at `x = 2^-resolution`.
pub fn set_s(resolution: usize) -> Result<SegmentSet, SetError> {
    if resolution < 2 {
        return Err(SetError::OutOfRange(
            "S resolution must be at least 2".into(),
        ));
    }
    let mut knots = vec![0.0];
    for k in (0..resolution).rev() {
        let lo = 2f64.powi(-(k as i32 + 1));
        let hi = 2f64.powi(-(k as i32));
        let sub = 4;
        for j in 0..=sub {
            if k == resolution - 1 && j == 0 {
                knots.push(lo);
            } else if j > 0 {
                knots.push(lo + (hi - lo) * j as f64 / sub as f64);
            }
        }
    }
    let mut segments = vec![Segment::new(xy(0.0, 0.0), xy(1.0, 0.0)).unwrap()];
    for w in knots.windows(2) {
        segments.push(Segment::new(xy(w[0], w[0] * w[0]), xy(w[1], w[1] * w[1])).unwrap());
    }
    SegmentSet::from_raw_segments(segments)
}

/// `base ∪ phi(base)` where `phi` is the rotation by `angle` about `x` in
/// the coordinate 2-plane spanned by the orthonormal pair `(u, v)`.
pub fn rotate_union(
    base: &SegmentSet,
    x: &P,
    plane: (&P, &P),
    angle: f64,
) -> Result<SegmentSet, SetError> {
    let (u, v) = plane;
    if !(angle > 0.0 && angle < std::f64::consts::PI) {
        return Err(SetError::OutOfRange("rotation angle must be in (0, pi)".into()));
    }
    if (u.norm() - 1.0).abs() > 1e-12
        || (v.norm() - 1.0).abs() > 1e-12
        || u.dot(v).abs() > 1e-12
    {
        return Err(SetError::NonOrthonormalPlane);
    }
    let (c, s) = (angle.cos(), angle.sin());
    let rotate = |p: &P| -> P {
        let d = p.sub(x);
        let pu = d.dot(u);
        let pv = d.dot(v);
        let du = (c - 1.0) * pu - s * pv;
        let dv = s * pu + (c - 1.0) * pv;
        p.add(&u.scale(du)).add(&v.scale(dv))
    };
    let mut pairs: Vec<(P, P)> = base
        .segments()
        .iter()
        .map(|seg| (seg.p.clone(), seg.q.clone()))
        .collect();
    pairs.extend(
        base.segments()
            .iter()
            .map(|seg| (rotate(&seg.p), rotate(&seg.q))),
    );
    SegmentSet::new(&pairs)
}

/// The L-shape `([0,1] x {0}) ∪ ({0} x [0,1])`, built as a rotation union
/// of the unit segment about its endpoint.
pub fn set_l() -> SegmentSet {
    let base = unit_segment();
    rotate_union(
        &base,
        &xy(0.0, 0.0),
        (&xy(1.0, 0.0), &xy(0.0, 1.0)),
        std::f64::consts::FRAC_PI_2,
    )
    .unwrap()
}

/// The unit segment `[0,1] x {0}`.
pub fn unit_segment() -> SegmentSet {
    SegmentSet::from_raw_segments(vec![Segment::new(xy(0.0, 0.0), xy(1.0, 0.0)).unwrap()])
        .unwrap()
}

/// Closed polyline through the vertices of the regular `k`-gon inscribed in
/// the unit circle.
pub fn regular_polygon(k: usize) -> Result<SegmentSet, SetError> {
    if k < 3 {
        return Err(SetError::OutOfRange("polygon needs at least 3 vertices".into()));
    }
    let verts: Vec<P> = (0..k)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
            xy(t.cos(), t.sin())
        })
        .collect();
    let segments: Vec<Segment> = (0..k)
        .map(|j| Segment::new(verts[j].clone(), verts[(j + 1) % k].clone()).unwrap())
        .collect();
    SegmentSet::from_raw_segments(segments)
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ScaledBlockRepr {
    /// 1-based axis index as in the dyadic-block notation.
    axis: usize,
    exp2_lo: i64,
    exp2_hi: i64,
}

#[derive(Serialize, Deserialize)]
struct SegmentSetRepr {
    dimension: usize,
    segments: Vec<[Vec<f64>; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    scaled_blocks: Vec<ScaledBlockRepr>,
}

impl Serialize for SegmentSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = SegmentSetRepr {
            dimension: self.dim,
            segments: self
                .segments
                .iter()
                .map(|s| [s.p.coords().to_vec(), s.q.coords().to_vec()])
                .collect(),
            scaled_blocks: self
                .scaled_blocks
                .iter()
                .map(|b| ScaledBlockRepr {
                    axis: b.axis + 1,
                    exp2_lo: b.lo.exp2(),
                    exp2_hi: b.hi.exp2(),
                })
                .collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SegmentSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = SegmentSetRepr::deserialize(deserializer)?;
        let segments: Vec<Segment> = repr
            .segments
            .iter()
            .map(|[p, q]| {
                let p = Point::new(p).map_err(D::Error::custom)?;
                let q = Point::new(q).map_err(D::Error::custom)?;
                Segment::new(p, q).map_err(D::Error::custom)
            })
            .collect::<Result<_, _>>()?;
        let blocks = repr
            .scaled_blocks
            .iter()
            .map(|b| {
                if b.axis == 0 || b.axis > 2 || b.exp2_lo >= b.exp2_hi {
                    return Err(D::Error::custom("invalid scaled block"));
                }
                Ok(ScaledBlock {
                    axis: b.axis - 1,
                    lo: ScaledReal::from_exp2(b.exp2_lo),
                    hi: ScaledReal::from_exp2(b.exp2_hi),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if segments.is_empty() && blocks.is_empty() {
            return Err(D::Error::custom("empty segment set"));
        }
        let set = if segments.is_empty() {
            // block-only set: no float mirror segments
            SegmentSet {
                dim: repr.dimension,
                segments: Vec::new(),
                scaled_blocks: Vec::new(),
                cum: Vec::new(),
                total: 0.0,
            }
        } else {
            SegmentSet::from_raw_segments(segments).map_err(D::Error::custom)?
        };
        if set.dim != repr.dimension && !set.segments.is_empty() {
            return Err(D::Error::custom("dimension field disagrees with segments"));
        }
        Ok(set.with_scaled_blocks(blocks))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn make_segment_set_basic() {
        let s = SegmentSet::new(&[(xy(0.0, 0.0), xy(1.0, 0.0))]).unwrap();
        assert_relative_eq!(s.total_measure(), 1.0);
    }

    #[test]
    fn abutting_collinear_segments_merge() {
        let s = SegmentSet::new(&[
            (xy(0.0, 0.0), xy(1.0, 0.0)),
            (xy(1.0, 0.0), xy(2.0, 0.0)),
        ])
        .unwrap();
        assert_relative_eq!(s.total_measure(), 2.0, max_relative = 1e-14);
        assert_eq!(s.segments().len(), 1);
    }

    #[test]
    fn overlapping_segments_deduplicate() {
        let s = SegmentSet::new(&[
            (xy(0.0, 0.0), xy(1.0, 0.0)),
            (xy(0.5, 0.0), xy(1.5, 0.0)),
        ])
        .unwrap();
        assert_relative_eq!(s.total_measure(), 1.5, max_relative = 1e-14);
    }

    #[test]
    fn zero_length_segment_rejected() {
        assert!(SegmentSet::new(&[(xy(1.0, 1.0), xy(1.0, 1.0))]).is_err());
    }

    #[test]
    fn set_e_measures() {
        let e = set_e();
        assert_relative_eq!(e.total_measure(), 3.0, max_relative = 1e-14);
        assert_relative_eq!(set_e_component(1).total_measure(), 1.0);
        let origin = xy(0.0, 0.0);
        assert_relative_eq!(e.measure_in_ball(&origin, 0.5), 1.5, max_relative = 1e-13);
        assert_relative_eq!(e.measure_in_ball(&origin, 2.0), 3.0, max_relative = 1e-13);
    }

    #[test]
    fn single_segment_ball() {
        let s = unit_segment();
        assert_relative_eq!(
            s.measure_in_ball(&xy(0.5, 0.0), 0.25),
            0.5,
            max_relative = 1e-13
        );
    }

    #[test]
    fn measure_additivity_under_shuffling() {
        let pairs = [
            (xy(0.0, 0.0), xy(1.0, 0.0)),
            (xy(0.0, 0.0), xy(0.0, 1.0)),
            (xy(1.0, 0.0), xy(1.0, 1.0)),
            (xy(0.0, 1.0), xy(1.0, 1.0)),
        ];
        let a = SegmentSet::new(&pairs).unwrap();
        let mut rev = pairs.to_vec();
        rev.reverse();
        let b = SegmentSet::new(&rev).unwrap();
        let x = xy(0.3, 0.4);
        for r in [0.1, 0.5, 1.3] {
            assert_relative_eq!(
                a.measure_in_ball(&x, r),
                b.measure_in_ball(&x, r),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn ball_measure_monotone_and_annulus_additive() {
        let e = set_e();
        let x = xy(0.1, 0.2);
        let mut prev = 0.0;
        for i in 1..20 {
            let r = i as f64 * 0.1;
            let m = e.measure_in_ball(&x, r);
            assert!(m + 1e-13 >= prev);
            prev = m;
        }
        let (r1, r2, r3) = (0.2, 0.5, 1.1);
        assert_relative_eq!(
            e.measure_in_annulus(&x, r1, r2) + e.measure_in_annulus(&x, r2, r3),
            e.measure_in_annulus(&x, r1, r3),
            epsilon = 1e-13
        );
        assert_relative_eq!(
            e.measure_in_annulus(&x, 0.0, r2),
            e.measure_in_ball(&x, r2),
            epsilon = 1e-14
        );
    }

    #[test]
    fn annulus_examples() {
        let e = set_e();
        let origin = xy(0.0, 0.0);
        assert_relative_eq!(
            e.measure_in_annulus(&origin, 0.25, 0.5),
            0.75,
            max_relative = 1e-13
        );
        let far = SegmentSet::new(&[(xy(10.0, 0.0), xy(11.0, 0.0))]).unwrap();
        assert_eq!(far.measure_in_annulus(&origin, 0.25, 0.5), 0.0);
    }

    #[test]
    fn cone_complement_examples() {
        let e = set_e();
        let origin = xy(0.0, 0.0);
        // E1, E3 lie inside the horizontal double cone; only E2 survives
        let cone = Cone::new(origin.clone(), xy(1.0, 0.0), FRAC_PI_4).unwrap();
        assert_relative_eq!(
            e.measure_in_cone_complement(&cone, 0.5),
            0.5,
            max_relative = 1e-12
        );
        // a set inside its own cone
        let e2 = set_e_component(1);
        let cone2 = Cone::new(origin.clone(), xy(0.0, 1.0), FRAC_PI_4).unwrap();
        assert!(e2.measure_in_cone_complement(&cone2, 1.0) < 1e-12);
        // x-axis meets the vertical cone only on the boundary
        let seg = unit_segment();
        assert_relative_eq!(
            seg.measure_in_cone_complement(&cone2, 1.0),
            1.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn cone_partition() {
        let e = set_e();
        let cone = Cone::new(xy(0.0, 0.0), xy(0.6, 0.8), 0.7).unwrap();
        for r in [0.3, 0.7, 1.5] {
            let (inside, outside) = e.slice_cone_ball(&cone, r);
            assert_relative_eq!(
                inside + outside,
                e.measure_in_ball(&xy(0.0, 0.0), r),
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn sample_point_examples() {
        let e = set_e();
        let p = e.sample_point(0.0).unwrap();
        assert_eq!(p.coords(), &[-1.0, 0.0]);
        let p = e.sample_point(0.5).unwrap();
        assert_relative_eq!(p.get(0), 0.0, epsilon = 1e-14);
        assert_relative_eq!(p.get(1), 0.5, epsilon = 1e-14);
        let s = unit_segment();
        let p = s.sample_point(0.5).unwrap();
        assert_relative_eq!(p.get(0), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn set_f_blocks_exact() {
        let f = set_f(4).unwrap();
        let ladder = dyadic_ladder(4).unwrap();
        assert_eq!(ladder.exponents, vec![1, 32, 729, 16384]);
        for (i, b) in f.scaled_blocks().iter().enumerate() {
            let n = i + 1;
            let len = b.length();
            // H^1(B_n) = a_n / 2 exactly
            assert_eq!(len, ScaledReal::from_exp2(-ladder.exponents[i] - 1));
            assert_eq!(b.axis, if n % 2 == 0 { 0 } else { 1 });
        }
        // B1 = {0} x [1/4, 1/2]
        let b1 = &f.scaled_blocks()[0];
        assert_eq!(b1.lo, ScaledReal::from_exp2(-2));
        assert_eq!(b1.hi, ScaledReal::from_exp2(-1));
        assert_eq!(b1.axis, 1);
        // float mirror exists only while the block length clears the
        // coincidence floor: n = 1 and n = 2
        assert_eq!(f.segments().len(), 2);
        assert!(set_f(9).is_err());
        assert!(set_f(0).is_err());
    }

    #[test]
    fn set_f_scaled_ball_measures() {
        let f = set_f(4).unwrap();
        // ball of radius a_2 = 2^-32 sees block 2 fully and deeper blocks
        let r = ScaledReal::from_exp2(-32);
        let m = f.scaled_measure_in_ball(&r);
        // dominated by a_2/2 = 2^-33
        assert_eq!(m.exp2(), -33);
        let axes = f.scaled_axis_measures_in_ball(&r);
        assert_eq!(axes[0].exp2(), -33); // block 2 on the x-axis
        assert_eq!(axes[1].exp2(), -730); // block 3 on the y-axis
    }

    #[test]
    fn set_s_geometry() {
        let s = set_s(10).unwrap();
        // flat part has length 1
        let flat: f64 = s
            .segments()
            .iter()
            .filter(|seg| seg.start().get(1) == 0.0 && seg.end().get(1) == 0.0)
            .map(|seg| seg.length())
            .sum();
        assert_relative_eq!(flat, 1.0, max_relative = 1e-13);
        // chordal parabola length approximates the arclength integral
        let curve = s.total_measure() - flat;
        let exact = (2.0 * 5f64.sqrt() + 2f64.asinh()) / 4.0;
        assert!((curve - exact).abs() < 5e-3, "curve {curve} vs {exact}");
        // first knot above zero at 2^-resolution
        let min_x = s
            .segments()
            .iter()
            .filter(|seg| seg.start().get(1) > 0.0 || seg.end().get(1) > 0.0)
            .map(|seg| seg.start().get(0).min(seg.end().get(0)))
            .fold(f64::INFINITY, f64::min)
            ;
        assert_relative_eq!(min_x, 0.0, epsilon = 1e-15);
        let first_positive = s
            .segments()
            .iter()
            .flat_map(|seg| [seg.start().get(0), seg.end().get(0)])
            .filter(|&x| x > 0.0)
            .fold(f64::INFINITY, f64::min);
        assert_relative_eq!(first_positive, 2f64.powi(-10), max_relative = 1e-13);
    }

    #[test]
    fn rotate_union_examples() {
        let base = unit_segment();
        let l = rotate_union(
            &base,
            &xy(0.0, 0.0),
            (&xy(1.0, 0.0), &xy(0.0, 1.0)),
            FRAC_PI_2,
        )
        .unwrap();
        assert_relative_eq!(l.total_measure(), 2.0, max_relative = 1e-13);
        // rotating E3 by pi/2 gives E3 ∪ E2
        let e3 = set_e_component(2);
        let u = rotate_union(
            &e3,
            &xy(0.0, 0.0),
            (&xy(1.0, 0.0), &xy(0.0, 1.0)),
            FRAC_PI_2,
        )
        .unwrap();
        assert_relative_eq!(u.total_measure(), 2.0, max_relative = 1e-13);
        assert!(rotate_union(
            &base,
            &xy(0.0, 0.0),
            (&xy(1.0, 0.0), &xy(1.0, 0.0)),
            FRAC_PI_2
        )
        .is_err());
    }

    #[test]
    fn polygon_measure() {
        let p = regular_polygon(64).unwrap();
        let expected = 64.0 * 2.0 * (std::f64::consts::PI / 64.0).sin();
        assert_relative_eq!(p.total_measure(), expected, max_relative = 1e-12);
    }

    #[test]
    fn serde_round_trip_bit_exact() {
        let f = set_f(4).unwrap();
        let json = serde_json::to_string(&f).unwrap();
        let back: SegmentSet = serde_json::from_str(&json).unwrap();
        assert_eq!(f.segments().len(), back.segments().len());
        for (a, b) in f.segments().iter().zip(back.segments()) {
            assert_eq!(a.start().coords(), b.start().coords());
            assert_eq!(a.end().coords(), b.end().coords());
        }
        assert_eq!(f.scaled_blocks(), back.scaled_blocks());
        let json2 = serde_json::to_string(&back).unwrap();
        assert_eq!(json, json2);
    }

    #[test]
    fn clip_to_ball_restricts() {
        let e = set_e();
        let clipped = e.clip_to_ball(&xy(0.0, 0.0), 0.5).unwrap();
        assert_relative_eq!(clipped.total_measure(), 1.5, max_relative = 1e-12);
        assert_eq!(clipped.segments().len(), 3);
        assert!(e.clip_to_ball(&xy(50.0, 50.0), 1.0).is_none());
    }
}
