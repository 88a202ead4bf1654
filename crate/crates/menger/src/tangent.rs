//! Hausdorff-density profiles and approximate-tangent classification.
//!
//! A base point is probed along a decreasing radius ladder. At each radius
//! the exact ball measure and its split into a double cone and its
//! complement (over a direction grid and several opening angles) yield
//! density ratios; a fixed direction whose out-of-cone ratio stays below a
//! threshold at every tail radius is a strong tangent, a per-radius choice
//! of such directions is a weak tangent, and otherwise two well-separated
//! cones with persistent density witness that no tangent exists.
//!
//! Dyadic-block sets are probed on exact `ScaledReal` radii: their blocks
//! sit on the coordinate axes, so cone membership is a whole-block angle
//! comparison and ball clipping is exact interval arithmetic, valid far
//! below floating-point underflow.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Point;
use crate::scaled::ScaledReal;
use crate::segset::{Cone, SegmentSet};

type P = Point<f64>;

pub const DEFAULT_DELTA: f64 = 0.05;
pub const DEFAULT_DIR_GRID: usize = 16;
pub const DEFAULT_LADDER_RATIO: f64 = 0.5;
pub const DEFAULT_LADDER_LEN: usize = 16;

pub fn default_eps_list() -> Vec<f64> {
    use std::f64::consts::PI;
    vec![PI / 16.0, PI / 8.0, PI / 4.0]
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TangentError {
    #[error("invalid ladder: {0}")]
    InvalidLadder(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("exact dyadic analysis requires the origin base point and a block-backed set")]
    ScaledUnsupported,
}

/// A decreasing sequence of probe radii: geometric in `f64`, or an
/// explicit exact dyadic list for block-backed sets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum RadiusLadder {
    Geometric { r0: f64, ratio: f64, len: usize },
    Scaled { radii: Vec<ScaledReal> },
}

impl RadiusLadder {
    pub fn geometric(r0: f64, ratio: f64, len: usize) -> Result<Self, TangentError> {
        if !(r0 > 0.0 && r0.is_finite()) || !(ratio > 0.0 && ratio < 1.0) {
            return Err(TangentError::InvalidLadder(
                "need r0 > 0 and ratio in (0,1)".into(),
            ));
        }
        if len < 8 {
            return Err(TangentError::InvalidLadder(
                "geometric ladders need at least 8 radii".into(),
            ));
        }
        Ok(RadiusLadder::Geometric { r0, ratio, len })
    }

    /// Default probe ladder at a given outer scale.
    pub fn default_at_scale(r0: f64) -> Result<Self, TangentError> {
        RadiusLadder::geometric(r0, DEFAULT_LADDER_RATIO, DEFAULT_LADDER_LEN)
    }

    pub fn scaled(radii: Vec<ScaledReal>) -> Result<Self, TangentError> {
        if radii.len() < 4 {
            return Err(TangentError::InvalidLadder(
                "scaled ladders need at least 4 radii".into(),
            ));
        }
        if radii.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(TangentError::InvalidLadder(
                "radii must be strictly decreasing".into(),
            ));
        }
        Ok(RadiusLadder::Scaled { radii })
    }

    pub fn len(&self) -> usize {
        match self {
            RadiusLadder::Geometric { len, .. } => *len,
            RadiusLadder::Scaled { radii } => radii.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All radii as `ScaledReal` (exact for both representations).
    pub fn radii(&self) -> Vec<ScaledReal> {
        match self {
            RadiusLadder::Geometric { r0, ratio, len } => (0..*len)
                .map(|k| ScaledReal::from_f64(r0 * ratio.powi(k as i32)))
                .collect(),
            RadiusLadder::Scaled { radii } => radii.clone(),
        }
    }
}

/// The exact probe ladder for the truncated dyadic-block set together with
/// the expected tangent direction (as an angle: 0 for the first axis,
/// pi/2 for the second) at each radius. Radii `a_n` and `a_n/4` sample the
/// two regimes in which the mass near the origin sits on one axis or the
/// other.
pub fn block_ladder_with_directions(n_max: usize) -> (Vec<ScaledReal>, Vec<f64>) {
    use std::f64::consts::FRAC_PI_2;
    let ladder = crate::segset::dyadic_ladder(n_max).expect("valid n_max");
    let axis_angle = |n: usize| if n % 2 == 0 { 0.0 } else { FRAC_PI_2 };
    let mut radii = vec![ScaledReal::ONE];
    let mut dirs = vec![axis_angle(1)];
    for n in 1..=n_max {
        radii.push(ladder.a(n));
        dirs.push(axis_angle(n));
        if n < n_max {
            // a_n/4 lies strictly between the gap below block n and the
            // top of block n+1: the deeper axis dominates
            radii.push(ladder.a(n).mul(&ScaledReal::from_exp2(-2)));
            dirs.push(axis_angle(n + 1));
        }
    }
    (radii, dirs)
}

/// Cone split at one radius for one `(direction, eps)` pair; ratios are
/// measures divided by `(2r)^alpha`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConeSlice {
    pub direction_angle: f64,
    pub eps: f64,
    pub in_ratio: f64,
    pub out_ratio: f64,
}

/// Exact density data at one probe radius.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadiusEntry {
    pub r_mantissa: f64,
    pub r_exp2: i64,
    pub measure_ratio: f64,
    pub slices: Vec<ConeSlice>,
    /// Direction minimizing the worst out-of-cone ratio over the eps grid.
    pub best_direction_angle: f64,
    pub best_out_ratio: f64,
}

impl RadiusEntry {
    pub fn r_log2(&self) -> f64 {
        self.r_exp2 as f64 + self.r_mantissa.log2()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityProfile {
    pub alpha: f64,
    pub dir_grid: usize,
    pub eps_list: Vec<f64>,
    pub entries: Vec<RadiusEntry>,
}

/// Angle between two undirected lines given by angles, folded to
/// `[0, pi/2]`.
fn line_angle_dist(a: f64, b: f64) -> f64 {
    use std::f64::consts::PI;
    let mut d = (a - b).rem_euclid(PI);
    if d > PI / 2.0 {
        d = PI - d;
    }
    d
}

fn direction_angles(dir_grid: usize) -> Vec<f64> {
    // undirected directions cover a half-circle
    (0..dir_grid)
        .map(|k| std::f64::consts::PI * k as f64 / dir_grid as f64)
        .collect()
}

/// Density profile of `X` at `x`: exact per-radius ball measure and cone
/// decompositions over a uniform direction grid and an `eps` grid.
pub fn density_profile(
    set: &SegmentSet,
    x: &P,
    alpha: f64,
    ladder: &RadiusLadder,
    dir_grid: usize,
    eps_list: &[f64],
) -> Result<DensityProfile, TangentError> {
    if dir_grid < 16 {
        return Err(TangentError::InvalidParameter(
            "direction grid needs at least 16 directions".into(),
        ));
    }
    if eps_list.is_empty()
        || eps_list
            .iter()
            .any(|&e| !(e > 0.0 && e < std::f64::consts::PI))
    {
        return Err(TangentError::InvalidParameter(
            "eps grid must be nonempty with entries in (0, pi)".into(),
        ));
    }
    if set.dim() != 2 {
        return Err(TangentError::InvalidParameter(
            "density profiles are implemented for planar sets".into(),
        ));
    }
    let angles = direction_angles(dir_grid);
    let entries = match ladder {
        RadiusLadder::Geometric { .. } => {
            let radii = ladder.radii();
            radii
                .iter()
                .map(|r| float_entry(set, x, alpha, r, &angles, eps_list))
                .collect()
        }
        RadiusLadder::Scaled { radii } => {
            if x.norm() != 0.0 || set.scaled_blocks().is_empty() {
                return Err(TangentError::ScaledUnsupported);
            }
            if alpha != 1.0 {
                return Err(TangentError::InvalidParameter(
                    "exact dyadic profiles support alpha = 1 only".into(),
                ));
            }
            radii
                .iter()
                .map(|r| scaled_entry(set, r, &angles, eps_list))
                .collect()
        }
    };
    Ok(DensityProfile {
        alpha,
        dir_grid,
        eps_list: eps_list.to_vec(),
        entries,
    })
}

fn pick_best(slices: &[ConeSlice], eps_list: &[f64]) -> (f64, f64) {
    // worst out-ratio over the eps grid, per direction; take the argmin
    let per_dir = slices.chunks(eps_list.len());
    let mut best = (0.0, f64::INFINITY);
    for chunk in per_dir {
        let worst = chunk.iter().map(|s| s.out_ratio).fold(0.0, f64::max);
        if worst < best.1 {
            best = (chunk[0].direction_angle, worst);
        }
    }
    best
}

fn float_entry(
    set: &SegmentSet,
    x: &P,
    alpha: f64,
    r: &ScaledReal,
    angles: &[f64],
    eps_list: &[f64],
) -> RadiusEntry {
    let rf = r.to_f64();
    let denom = (2.0 * rf).powf(alpha);
    let ball = set.measure_in_ball(x, rf);
    let mut slices = Vec::with_capacity(angles.len() * eps_list.len());
    for &angle in angles {
        let dir = Point::xy(angle.cos(), angle.sin());
        for &eps in eps_list {
            let cone = Cone::new(x.clone(), dir.clone(), eps).expect("valid cone");
            let (inside, outside) = set.slice_cone_ball(&cone, rf);
            slices.push(ConeSlice {
                direction_angle: angle,
                eps,
                in_ratio: inside / denom,
                out_ratio: outside / denom,
            });
        }
    }
    let (best_dir, best_out) = pick_best(&slices, eps_list);
    RadiusEntry {
        r_mantissa: r.mantissa(),
        r_exp2: r.exp2(),
        measure_ratio: ball / denom,
        slices,
        best_direction_angle: best_dir,
        best_out_ratio: best_out,
    }
}

fn scaled_entry(
    set: &SegmentSet,
    r: &ScaledReal,
    angles: &[f64],
    eps_list: &[f64],
) -> RadiusEntry {
    use std::f64::consts::FRAC_PI_2;
    let denom = r.mul(&ScaledReal::from_f64(2.0));
    let axis_mass = set.scaled_axis_measures_in_ball(r);
    let axis_angle = [0.0, FRAC_PI_2];
    let ratio = |mass: &ScaledReal| mass.div(&denom).to_f64();
    let ball: ScaledReal = axis_mass[0].add(&axis_mass[1]);
    let mut slices = Vec::with_capacity(angles.len() * eps_list.len());
    for &angle in angles {
        for &eps in eps_list {
            let mut inside = ScaledReal::ZERO;
            let mut outside = ScaledReal::ZERO;
            for a in 0..2 {
                // every point of an axis block sees the origin along the
                // axis exactly, so the whole block is in or out
                if line_angle_dist(angle, axis_angle[a]) < eps {
                    inside = inside.add(&axis_mass[a]);
                } else {
                    outside = outside.add(&axis_mass[a]);
                }
            }
            slices.push(ConeSlice {
                direction_angle: angle,
                eps,
                in_ratio: ratio(&inside),
                out_ratio: ratio(&outside),
            });
        }
    }
    let (best_dir, best_out) = pick_best(&slices, eps_list);
    RadiusEntry {
        r_mantissa: r.mantissa(),
        r_exp2: r.exp2(),
        measure_ratio: ratio(&ball),
        slices,
        best_direction_angle: best_dir,
        best_out_ratio: best_out,
    }
}

/// Numeric stand-ins for the lower and upper density: minimum and maximum
/// of the measure ratio over the tail half of the ladder.
pub fn lower_upper_density(profile: &DensityProfile) -> (f64, f64) {
    let tail = tail_entries(profile);
    let lo = tail
        .iter()
        .map(|e| e.measure_ratio)
        .fold(f64::INFINITY, f64::min);
    let hi = tail.iter().map(|e| e.measure_ratio).fold(0.0, f64::max);
    (lo, hi)
}

fn tail_entries(profile: &DensityProfile) -> &[RadiusEntry] {
    let n = profile.entries.len();
    &profile.entries[n / 2..]
}

/// A cone with persistent density, part of the no-tangent witness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessCone {
    pub direction_angle: f64,
    pub eps: f64,
    /// Minimum in-cone density ratio over the tail radii.
    pub min_in_ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum TangentVerdict {
    /// One fixed direction captures all but a `delta` fraction of the
    /// density at every tail radius and opening angle.
    Strong { direction_angle: f64 },
    /// A per-radius direction does; entries are `(r_log2, angle)`.
    Weak { directions: Vec<(f64, f64)> },
    /// No direction works; two well-separated cones keep positive density.
    None {
        witnesses: Option<(WitnessCone, WitnessCone)>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TangentReport {
    pub verdict: TangentVerdict,
    pub delta: f64,
    pub eps_list: Vec<f64>,
    pub dir_grid: usize,
    /// log2 of the tail radii the verdict is based on.
    pub tail_radii_log2: Vec<f64>,
    /// Worst out-of-cone ratio backing a Strong/Weak verdict.
    pub max_out_ratio: f64,
}

/// Classify the base point, preferring the strongest verdict: a fixed
/// direction (strong tangent), then a per-radius direction (weak tangent),
/// then no tangent with witness cones.
pub fn detect_strong_tangent(
    set: &SegmentSet,
    x: &P,
    alpha: f64,
    ladder: &RadiusLadder,
    dir_grid: usize,
    eps_list: &[f64],
    delta: f64,
) -> Result<TangentReport, TangentError> {
    let profile = density_profile(set, x, alpha, ladder, dir_grid, eps_list)?;
    Ok(classify(&profile, delta, true))
}

/// Weak-tangent detection: per-radius best directions against the same
/// threshold; reports `None` with witness cones when some tail radius has
/// no admissible direction.
pub fn detect_weak_tangent(
    set: &SegmentSet,
    x: &P,
    alpha: f64,
    ladder: &RadiusLadder,
    dir_grid: usize,
    eps_list: &[f64],
    delta: f64,
) -> Result<TangentReport, TangentError> {
    let profile = density_profile(set, x, alpha, ladder, dir_grid, eps_list)?;
    Ok(classify(&profile, delta, false))
}

/// Classification from a profile. `try_strong` controls whether a single
/// constant direction is reported as Strong; the weak/none logic is
/// shared.
pub fn classify(profile: &DensityProfile, delta: f64, try_strong: bool) -> TangentReport {
    let tail = tail_entries(profile);
    let eps_n = profile.eps_list.len();
    let tail_radii_log2: Vec<f64> = tail.iter().map(RadiusEntry::r_log2).collect();

    // worst out-ratio per (direction index, entry), maximized over eps
    let worst_out = |entry: &RadiusEntry, d: usize| -> f64 {
        entry.slices[d * eps_n..(d + 1) * eps_n]
            .iter()
            .map(|s| s.out_ratio)
            .fold(0.0, f64::max)
    };

    if try_strong {
        for d in 0..profile.dir_grid {
            let worst = tail.iter().map(|e| worst_out(e, d)).fold(0.0, f64::max);
            if worst <= delta {
                return TangentReport {
                    verdict: TangentVerdict::Strong {
                        direction_angle: tail[0].slices[d * eps_n].direction_angle,
                    },
                    delta,
                    eps_list: profile.eps_list.clone(),
                    dir_grid: profile.dir_grid,
                    tail_radii_log2,
                    max_out_ratio: worst,
                };
            }
        }
    }

    // weak: per-radius argmin direction
    let mut directions = Vec::with_capacity(tail.len());
    let mut max_out: f64 = 0.0;
    let mut weak_ok = true;
    for entry in tail {
        let (mut best_d, mut best_val) = (0, f64::INFINITY);
        for d in 0..profile.dir_grid {
            let w = worst_out(entry, d);
            if w < best_val {
                best_val = w;
                best_d = d;
            }
        }
        if best_val > delta {
            weak_ok = false;
            break;
        }
        max_out = max_out.max(best_val);
        directions.push((
            entry.r_log2(),
            entry.slices[best_d * eps_n].direction_angle,
        ));
    }
    if weak_ok {
        return TangentReport {
            verdict: TangentVerdict::Weak { directions },
            delta,
            eps_list: profile.eps_list.clone(),
            dir_grid: profile.dir_grid,
            tail_radii_log2,
            max_out_ratio: max_out,
        };
    }

    // no tangent: look for two separated cones with persistent density
    let eps0 = profile
        .eps_list
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let witness_level = 0.2_f64.min(delta.max(0.1));
    let min_in = |d: usize| -> f64 {
        tail.iter()
            .map(|e| e.slices[d * eps_n].in_ratio) // smallest eps slice
            .fold(f64::INFINITY, f64::min)
    };
    let mut witnesses = None;
    let mut best_sep = 0.0;
    for d1 in 0..profile.dir_grid {
        let i1 = min_in(d1);
        if i1 < witness_level {
            continue;
        }
        for d2 in (d1 + 1)..profile.dir_grid {
            let i2 = min_in(d2);
            if i2 < witness_level {
                continue;
            }
            let a1 = tail[0].slices[d1 * eps_n].direction_angle;
            let a2 = tail[0].slices[d2 * eps_n].direction_angle;
            let sep = line_angle_dist(a1, a2);
            if sep >= eps0 && sep > best_sep {
                best_sep = sep;
                witnesses = Some((
                    WitnessCone {
                        direction_angle: a1,
                        eps: eps0,
                        min_in_ratio: i1,
                    },
                    WitnessCone {
                        direction_angle: a2,
                        eps: eps0,
                        min_in_ratio: i2,
                    },
                ));
            }
        }
    }
    TangentReport {
        verdict: TangentVerdict::None { witnesses },
        delta,
        eps_list: profile.eps_list.clone(),
        dir_grid: profile.dir_grid,
        tail_radii_log2,
        max_out_ratio: f64::INFINITY,
    }
}

/// Exact annulus measures of `X` restricted to two cones, per ladder
/// radius: the data behind the simultaneous-annulus density estimates.
pub fn annulus_diagnostic(
    set: &SegmentSet,
    x: &P,
    ladder: &RadiusLadder,
    q0: f64,
    cone_a: &Cone,
    cone_b: &Cone,
) -> Result<Vec<(f64, f64)>, TangentError> {
    if !(q0 > 0.0 && q0 < 1.0) {
        return Err(TangentError::InvalidParameter("q0 must be in (0,1)".into()));
    }
    if &cone_a.apex != x || &cone_b.apex != x {
        return Err(TangentError::InvalidParameter(
            "both cones must be apexed at the base point".into(),
        ));
    }
    let radii = ladder.radii();
    Ok(radii
        .iter()
        .map(|r| {
            let rf = r.to_f64();
            let inner = q0 * rf;
            let in_a = set.measure_in_cone(cone_a, rf) - set.measure_in_cone(cone_a, inner);
            let in_b = set.measure_in_cone(cone_b, rf) - set.measure_in_cone(cone_b, inner);
            (in_a, in_b)
        })
        .collect())
}
