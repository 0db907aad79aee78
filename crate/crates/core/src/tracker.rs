//! Per-object belief tracking.
//!
//! A belief region is grown every cycle by the object's one-cycle reachable
//! displacement set (predict) and intersected with the sector of each new
//! observation (update). Players grow by a disc whose radius comes from the
//! player type's max-move table; the ball grows by the wedge of velocities
//! still consistent with its last velocity reading.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{DenoiseError, Result};
use crate::geometry::{
    circumscribed_disc, convex_hull, dilate, intersect, minkowski_sum, sector_to_polygon,
    ConvexRegion, Point2, Sector,
};
use crate::noise::{Observation, VelocityNoise, VelocityReading};

/// Chords used for the outer arc of sector and velocity-wedge polygons.
pub const ARC_STEPS: usize = 4;
/// Sides of the polygon standing in for a disc.
pub const DISC_STEPS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlayerTypeSpec {
    pub type_id: u32,
    /// m/cycle
    pub max_speed: f64,
    /// m/cycle²
    pub accel: f64,
    pub speed_decay: f64,
}

impl PlayerTypeSpec {
    pub const DEFAULT: PlayerTypeSpec = PlayerTypeSpec {
        type_id: 0,
        max_speed: 1.05,
        accel: 0.6,
        speed_decay: 0.4,
    };

    /// Built-in player types, looked up by id.
    pub fn builtin(type_id: u32) -> Option<PlayerTypeSpec> {
        (type_id == 0).then_some(Self::DEFAULT)
    }
}

/// Worst-case travel per player type, indexed by cycle count.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxMoveTable {
    pub type_id: u32,
    /// `speeds[n]` is the speed used during cycle `n`.
    pub speeds: Vec<f64>,
    /// `cumulative[n]` is the distance covered in `n` cycles; `cumulative[0] = 0`.
    pub cumulative: Vec<f64>,
}

impl MaxMoveTable {
    pub fn horizon(&self) -> usize {
        self.speeds.len()
    }

    /// Reach over `n` cycles, or `None` beyond the horizon.
    pub fn reach(&self, n: usize) -> Option<f64> {
        self.cumulative.get(n).copied()
    }
}

/// Starts at `max_speed` and applies full acceleration every cycle.
pub fn build_max_move_table(spec: &PlayerTypeSpec, horizon: i64) -> Result<MaxMoveTable> {
    if horizon < 0 {
        return Err(DenoiseError::ConstraintViolation(format!(
            "horizon must be non-negative, got {horizon}"
        )));
    }
    if !(spec.max_speed > 0.0
        && spec.accel >= 0.0
        && spec.speed_decay > 0.0
        && spec.speed_decay < 1.0)
    {
        return Err(DenoiseError::ConstraintViolation(format!(
            "invalid player type {}: {:?}",
            spec.type_id, spec
        )));
    }
    let n = horizon as usize;
    let mut speeds = Vec::with_capacity(n);
    let mut cumulative = Vec::with_capacity(n + 1);
    cumulative.push(0.0);
    let mut v = spec.max_speed;
    for _ in 0..n {
        speeds.push(v);
        cumulative.push(cumulative.last().unwrap() + v);
        v = spec.max_speed.min(v * spec.speed_decay + spec.accel);
    }
    Ok(MaxMoveTable {
        type_id: spec.type_id,
        speeds,
        cumulative,
    })
}

/// Bounds on the ball velocity: speed in m/cycle, direction in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VelocityBounds {
    pub speed_lo: f64,
    pub speed_hi: f64,
    pub dir_lo: f64,
    pub dir_hi: f64,
}

impl VelocityBounds {
    pub fn from_reading(reading: &VelocityReading, noise: &VelocityNoise) -> Self {
        Self {
            speed_lo: (reading.speed * (1.0 - noise.speed_eps)).max(0.0),
            speed_hi: reading.speed * (1.0 + noise.speed_eps),
            dir_lo: reading.direction - noise.dir_eps,
            dir_hi: reading.direction + noise.dir_eps,
        }
    }

    pub fn dir_width(&self) -> f64 {
        self.dir_hi - self.dir_lo
    }

    /// One cycle of decay plus the configured inflation.
    pub fn propagate(&self, p: &BallParams) -> Self {
        let half = 0.5 * p.dir_inflation;
        Self {
            speed_lo: (self.speed_lo * p.ball_decay * (1.0 - p.speed_inflation)).max(0.0),
            speed_hi: self.speed_hi * p.ball_decay * (1.0 + p.speed_inflation),
            dir_lo: self.dir_lo - half,
            dir_hi: self.dir_hi + half,
        }
    }

    /// Conservative polygon of every displacement `(s cos φ, s sin φ)` allowed
    /// by the bounds. Wedges wider than π/2 fall back to the full disc.
    pub fn displacement_set(&self) -> Result<ConvexRegion> {
        if self.speed_hi <= 0.0 {
            return Ok(ConvexRegion::point(Point2::ORIGIN));
        }
        let width = self.dir_width();
        if width > FRAC_PI_2 {
            return circumscribed_disc(self.speed_hi, 2 * DISC_STEPS);
        }
        if width <= 0.0 {
            return convex_hull(&[
                Point2::polar(self.speed_lo, self.dir_lo),
                Point2::polar(self.speed_hi, self.dir_lo),
            ]);
        }
        let r_lo = self.speed_lo.min(self.speed_hi * (1.0 - 1e-9));
        let wedge = Sector::new(
            Point2::ORIGIN,
            r_lo,
            self.speed_hi,
            self.dir_lo,
            self.dir_hi,
        )?;
        sector_to_polygon(&wedge, ARC_STEPS)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BallParams {
    pub ball_decay: f64,
    /// Direction-width growth per cycle, radians.
    pub dir_inflation: f64,
    /// Relative speed-bound growth per cycle.
    pub speed_inflation: f64,
    /// Dilation radius (m) per cycle while the velocity is unknown.
    pub fallback_reach: f64,
}

impl Default for BallParams {
    fn default() -> Self {
        Self {
            ball_decay: 0.94,
            dir_inflation: 1f64.to_radians(),
            speed_inflation: 0.05,
            fallback_reach: 3.0,
        }
    }
}

impl BallParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.ball_decay > 0.0 && self.ball_decay < 1.0) {
            return Err(DenoiseError::ConstraintViolation(format!(
                "ball_decay must lie in (0, 1), got {}",
                self.ball_decay
            )));
        }
        if !(self.dir_inflation >= 0.0 && self.speed_inflation >= 0.0 && self.fallback_reach >= 0.0)
        {
            return Err(DenoiseError::ConstraintViolation(
                "ball inflations and fallback reach must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKind {
    Ball,
    Player { type_id: u32 },
}

impl ObjectKind {
    fn name(&self) -> &'static str {
        match self {
            ObjectKind::Ball => "ball",
            ObjectKind::Player { .. } => "player",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorMode {
    #[default]
    Centroid,
    #[serde(alias = "bbox")]
    BboxMidpoint,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Belief {
    pub kind: ObjectKind,
    pub region: ConvexRegion,
    pub velocity: Option<VelocityBounds>,
    pub cycles_since_seen: u32,
    pub was_reset: bool,
}

impl Belief {
    /// Belief known only to lie in `region`, e.g. the field.
    pub fn prior(kind: ObjectKind, region: ConvexRegion) -> Result<Self> {
        if region.is_empty() {
            return Err(DenoiseError::EmptyRegion);
        }
        Ok(Self {
            kind,
            region,
            velocity: None,
            cycles_since_seen: 0,
            was_reset: false,
        })
    }

    fn expect_kind(&self, want_ball: bool) -> Result<()> {
        let is_ball = matches!(self.kind, ObjectKind::Ball);
        if is_ball != want_ball {
            return Err(DenoiseError::KindMismatch {
                expected: if want_ball { "ball" } else { "player" },
                found: self.kind.name(),
            });
        }
        Ok(())
    }
}

pub fn init_belief(
    kind: ObjectKind,
    sector: &Sector,
    velocity_reading: Option<&VelocityReading>,
    noise: &VelocityNoise,
) -> Result<Belief> {
    let region = sector_to_polygon(sector, ARC_STEPS)?;
    let velocity = match kind {
        ObjectKind::Ball => velocity_reading.map(|r| VelocityBounds::from_reading(r, noise)),
        ObjectKind::Player { .. } => None,
    };
    Ok(Belief {
        kind,
        region,
        velocity,
        cycles_since_seen: 0,
        was_reset: false,
    })
}

pub fn predict_player(b: &Belief, table: &MaxMoveTable) -> Result<Belief> {
    b.expect_kind(false)?;
    let reach = table.reach(1).ok_or_else(|| {
        DenoiseError::ConstraintViolation("max-move table has no one-cycle entry".into())
    })?;
    Ok(Belief {
        region: dilate(&b.region, reach, DISC_STEPS)?,
        cycles_since_seen: b.cycles_since_seen + 1,
        ..b.clone()
    })
}

pub fn predict_ball(b: &Belief, p: &BallParams) -> Result<Belief> {
    b.expect_kind(true)?;
    let (region, velocity) = match &b.velocity {
        Some(v) => (
            minkowski_sum(&b.region, &v.displacement_set()?)?,
            Some(v.propagate(p)),
        ),
        None => (dilate(&b.region, p.fallback_reach, DISC_STEPS)?, None),
    };
    Ok(Belief {
        region,
        velocity,
        cycles_since_seen: b.cycles_since_seen + 1,
        ..b.clone()
    })
}

/// Intersects the belief with a newly observed sector.
///
/// An empty intersection means a motion bound was violated; the belief then
/// restarts from the sector alone and any stale ball velocity is dropped
/// unless the observation carries a fresh reading.
pub fn update(
    b: &Belief,
    sector: &Sector,
    velocity_reading: Option<&VelocityReading>,
    noise: &VelocityNoise,
) -> Result<Belief> {
    let observed = sector_to_polygon(sector, ARC_STEPS)?;
    let clipped = intersect(&b.region, &observed);
    let was_reset = clipped.is_empty();
    let region = if was_reset { observed } else { clipped };
    let velocity = match b.kind {
        ObjectKind::Player { .. } => None,
        ObjectKind::Ball => match velocity_reading {
            Some(r) => Some(VelocityBounds::from_reading(r, noise)),
            None if was_reset => None,
            None => b.velocity,
        },
    };
    Ok(Belief {
        kind: b.kind,
        region,
        velocity,
        cycles_since_seen: 0,
        was_reset,
    })
}

pub fn estimate(b: &Belief, mode: EstimatorMode) -> Result<Point2> {
    match mode {
        EstimatorMode::Centroid => b.region.centroid(),
        EstimatorMode::BboxMidpoint => b.region.bbox_midpoint(),
    }
}

/// Naive de-quantization: the reported distance along the reported bearing.
pub fn baseline_estimate(obs: &Observation) -> Point2 {
    let direction = obs.observer.body_angle + f64::from(obs.bearing_deg).to_radians();
    obs.observer.position + Point2::polar(obs.distance_q, direction)
}
