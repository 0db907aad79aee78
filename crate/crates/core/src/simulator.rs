//! Deterministic desk-scale world: ground-truth motion, a scanning observer,
//! one belief tracker per object, and per-cycle scoring of the denoised
//! estimate against the naive baseline.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{DenoiseError, Result};
use crate::geometry::{intersect, sector_to_polygon, ConvexRegion, Point2};
use crate::noise::{
    normalize_rad, observation_sector, observe, ObserverPose, QuantizerParams, VelocityNoise,
};
use crate::tracker::{
    baseline_estimate, build_max_move_table, estimate, init_belief, predict_ball, predict_player,
    update, BallParams, Belief, EstimatorMode, MaxMoveTable, ObjectKind, PlayerTypeSpec, ARC_STEPS,
};

fn default_seed() -> u64 {
    42
}

fn default_half_x() -> f64 {
    52.5
}

fn default_half_y() -> f64 {
    34.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub cycles: u32,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_half_x")]
    pub field_half_x: f64,
    #[serde(default = "default_half_y")]
    pub field_half_y: f64,
    pub observer: ObserverConfig,
    pub objects: Vec<ObjectSpec>,
    #[serde(default)]
    pub quantizer: QuantizerParams,
    #[serde(default)]
    pub vel_noise: VelocityNoise,
    #[serde(default)]
    pub ball_params: BallParams,
    #[serde(default)]
    pub estimator_mode: EstimatorMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObserverConfig {
    pub position: Point2,
    /// Initial facing, radians.
    pub body_angle: f64,
    /// Radians, in (0, π].
    pub view_half_width: f64,
    #[serde(default)]
    pub scan_policy: ScanPolicy,
}

impl ObserverConfig {
    pub fn pose(&self) -> ObserverPose {
        ObserverPose {
            position: self.position,
            body_angle: self.body_angle,
            view_half_width: self.view_half_width,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ScanPolicy {
    #[default]
    Fixed,
    /// Turn by `step_deg` every `period` cycles.
    Rotating { period: u32, step_deg: f64 },
    /// Face the current estimate of object `id`.
    TrackObject { id: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectSpec {
    Ball {
        position: Point2,
        #[serde(default)]
        velocity: Point2,
        #[serde(default)]
        kicks: Vec<Kick>,
    },
    Player {
        #[serde(default)]
        type_id: u32,
        position: Point2,
        motion: MotionModel,
    },
}

impl ObjectSpec {
    pub fn kind(&self) -> ObjectKind {
        match self {
            ObjectSpec::Ball { .. } => ObjectKind::Ball,
            ObjectSpec::Player { type_id, .. } => ObjectKind::Player { type_id: *type_id },
        }
    }

    pub fn position(&self) -> Point2 {
        match self {
            ObjectSpec::Ball { position, .. } | ObjectSpec::Player { position, .. } => *position,
        }
    }
}

/// Sets the ball velocity at the end of `cycle`, after decay.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Kick {
    pub cycle: u32,
    pub velocity: Point2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MotionModel {
    /// Visit the points in order, looping; `speed` defaults to the type's max speed.
    Waypoints {
        points: Vec<Point2>,
        #[serde(default)]
        speed: Option<f64>,
    },
    /// Uniform step in the disc of radius `max_step` every cycle.
    RandomWalk { max_step: f64 },
}

impl ScenarioConfig {
    /// One ball and two players around an observer that sweeps the full
    /// circle; every motion stays within the tracker's bounds.
    pub fn default_suite() -> Self {
        Self {
            cycles: 200,
            seed: default_seed(),
            field_half_x: default_half_x(),
            field_half_y: default_half_y(),
            observer: ObserverConfig {
                position: Point2::new(-20.0, 0.0),
                body_angle: 0.0,
                view_half_width: 60f64.to_radians(),
                scan_policy: ScanPolicy::Rotating {
                    period: 1,
                    step_deg: 120.0,
                },
            },
            objects: vec![
                ObjectSpec::Ball {
                    position: Point2::new(-5.0, 12.0),
                    velocity: Point2::new(0.8, -0.2),
                    kicks: Vec::new(),
                },
                ObjectSpec::Player {
                    type_id: 0,
                    position: Point2::new(-14.0, 4.0),
                    motion: MotionModel::RandomWalk { max_step: 0.6 },
                },
                ObjectSpec::Player {
                    type_id: 0,
                    position: Point2::new(8.0, -10.0),
                    motion: MotionModel::RandomWalk { max_step: 0.6 },
                },
            ],
            quantizer: QuantizerParams::default(),
            vel_noise: VelocityNoise::default(),
            ball_params: BallParams::default(),
            estimator_mode: EstimatorMode::Centroid,
        }
    }

    pub fn field(&self) -> Result<ConvexRegion> {
        ConvexRegion::rectangle(
            Point2::new(-self.field_half_x, -self.field_half_y),
            Point2::new(self.field_half_x, self.field_half_y),
        )
    }

    fn in_field(&self, p: Point2) -> bool {
        p.is_finite() && p.x.abs() <= self.field_half_x && p.y.abs() <= self.field_half_y
    }

    /// Checks every field and reports all offending ones at once.
    pub fn validate(&self) -> Result<()> {
        let mut issues = Vec::new();
        if self.cycles < 1 {
            issues.push("cycles: must be at least 1".to_string());
        }
        if !(self.field_half_x > 0.0 && self.field_half_y > 0.0) {
            issues.push("field_half_x/field_half_y: must be positive".to_string());
        }
        if let Err(e) = self.observer.pose().validate() {
            issues.push(format!("observer: {e}"));
        }
        if !self.in_field(self.observer.position) {
            issues.push("observer.position: outside the field".to_string());
        }
        match &self.observer.scan_policy {
            ScanPolicy::Fixed => {}
            ScanPolicy::Rotating { period, step_deg } => {
                if *period < 1 {
                    issues.push("observer.scan_policy.rotating.period: must be at least 1".into());
                }
                if !step_deg.is_finite() {
                    issues.push("observer.scan_policy.rotating.step_deg: must be finite".into());
                }
            }
            ScanPolicy::TrackObject { id } => {
                if *id >= self.objects.len() {
                    issues.push(format!(
                        "observer.scan_policy.track_object.id: no object {id}"
                    ));
                }
            }
        }
        if self.objects.is_empty() {
            issues.push("objects: at least one object is required".to_string());
        }
        for (i, obj) in self.objects.iter().enumerate() {
            if !self.in_field(obj.position()) {
                issues.push(format!("objects[{i}].position: outside the field"));
            }
            match obj {
                ObjectSpec::Ball {
                    velocity, kicks, ..
                } => {
                    if !velocity.is_finite() {
                        issues.push(format!("objects[{i}].velocity: must be finite"));
                    }
                    if kicks.iter().any(|k| !k.velocity.is_finite()) {
                        issues.push(format!("objects[{i}].kicks: velocities must be finite"));
                    }
                }
                ObjectSpec::Player {
                    type_id, motion, ..
                } => {
                    let Some(spec) = PlayerTypeSpec::builtin(*type_id) else {
                        issues.push(format!(
                            "objects[{i}].type_id: unknown player type {type_id}"
                        ));
                        continue;
                    };
                    match motion {
                        MotionModel::RandomWalk { max_step } => {
                            if !(*max_step >= 0.0 && *max_step <= spec.max_speed) {
                                issues.push(format!(
                                    "objects[{i}].motion.random_walk.max_step: must lie in [0, {}], got {max_step}",
                                    spec.max_speed
                                ));
                            }
                        }
                        MotionModel::Waypoints { points, speed } => {
                            if points.is_empty() {
                                issues.push(format!(
                                    "objects[{i}].motion.waypoints.points: must not be empty"
                                ));
                            }
                            if points.iter().any(|&p| !self.in_field(p)) {
                                issues.push(format!(
                                    "objects[{i}].motion.waypoints.points: outside the field"
                                ));
                            }
                            if let Some(s) = speed {
                                if !(*s >= 0.0 && *s <= spec.max_speed) {
                                    issues.push(format!(
                                        "objects[{i}].motion.waypoints.speed: must lie in [0, {}], got {s}",
                                        spec.max_speed
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
        if let Err(e) = self.quantizer.validate() {
            issues.push(format!("quantizer: {e}"));
        }
        let vn = &self.vel_noise;
        if !(vn.speed_eps >= 0.0 && vn.speed_eps < 1.0) {
            issues.push("vel_noise.speed_eps: must lie in [0, 1)".to_string());
        }
        if !(vn.dir_eps >= 0.0 && vn.dir_eps.is_finite()) {
            issues.push("vel_noise.dir_eps: must be non-negative".to_string());
        }
        if vn.visibility_range.is_nan() || vn.visibility_range < 0.0 {
            issues.push("vel_noise.visibility_range: must be non-negative".to_string());
        }
        if let Err(e) = self.ball_params.validate() {
            issues.push(format!("ball_params: {e}"));
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(DenoiseError::InvalidConfig(issues))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ObjectState {
    pub position: Point2,
    pub velocity: Point2,
    /// Index of the next waypoint.
    pub waypoint: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorldState {
    pub cycle: u32,
    pub objects: Vec<ObjectState>,
}

impl WorldState {
    pub fn initial(config: &ScenarioConfig) -> Self {
        let objects = config
            .objects
            .iter()
            .map(|o| ObjectState {
                position: o.position(),
                velocity: match o {
                    ObjectSpec::Ball { velocity, .. } => *velocity,
                    ObjectSpec::Player { .. } => Point2::ORIGIN,
                },
                waypoint: 0,
            })
            .collect();
        Self { cycle: 0, objects }
    }
}

/// Advances ground truth by one cycle.
pub fn step_world<R: Rng + ?Sized>(
    state: &WorldState,
    config: &ScenarioConfig,
    rng: &mut R,
) -> WorldState {
    let cycle = state.cycle + 1;
    let objects = config
        .objects
        .iter()
        .zip(&state.objects)
        .map(|(spec, s)| {
            let mut next = *s;
            match spec {
                ObjectSpec::Ball { kicks, .. } => {
                    next.position = s.position + s.velocity;
                    next.velocity = s.velocity * config.ball_params.ball_decay;
                    if let Some(k) = kicks.iter().find(|k| k.cycle == cycle) {
                        next.velocity = k.velocity;
                    }
                }
                ObjectSpec::Player {
                    type_id, motion, ..
                } => {
                    let step = match motion {
                        MotionModel::RandomWalk { max_step } => {
                            let r = max_step * rng.gen::<f64>().sqrt();
                            Point2::polar(r, rng.gen_range(-PI..PI))
                        }
                        MotionModel::Waypoints { points, speed } => {
                            let max =
                                PlayerTypeSpec::builtin(*type_id).map_or(0.0, |t| t.max_speed);
                            let speed = speed.unwrap_or(max).min(max);
                            let to = points[s.waypoint % points.len()] - s.position;
                            let dist = to.norm();
                            if dist <= speed {
                                next.waypoint = (s.waypoint + 1) % points.len();
                                to
                            } else {
                                to * (speed / dist)
                            }
                        }
                    };
                    next.position = s.position + step;
                    next.velocity = step;
                }
            }
            let clamped = Point2::new(
                next.position
                    .x
                    .clamp(-config.field_half_x, config.field_half_x),
                next.position
                    .y
                    .clamp(-config.field_half_y, config.field_half_y),
            );
            if clamped != next.position {
                next.position = clamped;
                next.velocity = Point2::ORIGIN;
            }
            next
        })
        .collect();
    WorldState { cycle, objects }
}

/// One tracked object: its belief plus the naive comparator.
#[derive(Clone, Debug)]
struct ObjectTrack {
    belief: Belief,
    table: Option<MaxMoveTable>,
    baseline: Point2,
}

impl ObjectTrack {
    fn predict(&mut self, ball: &BallParams, field: &ConvexRegion) -> Result<()> {
        let mut grown = match &self.table {
            Some(t) => predict_player(&self.belief, t)?,
            None => predict_ball(&self.belief, ball)?,
        };
        let clipped = intersect(&grown.region, field);
        if !clipped.is_empty() {
            grown.region = clipped;
        }
        grown.was_reset = false;
        self.belief = grown;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub seed: u64,
    pub cycle: u32,
    pub object_id: usize,
    pub observed: bool,
    pub baseline_err: f64,
    pub denoised_err: f64,
    pub region_area: f64,
    pub was_reset: bool,
    /// True position inside the belief region.
    pub sound: bool,
    /// Observer-to-object distance, m.
    pub distance: f64,
    pub true_pos: Point2,
    pub estimate: Point2,
    pub baseline_pos: Point2,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObjectSummary {
    pub object_id: usize,
    pub kind: ObjectKind,
    pub observed_cycles: usize,
    pub mean_baseline_err: f64,
    pub mean_denoised_err: f64,
    pub median_baseline_err: f64,
    pub median_denoised_err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceSummary {
    pub seed: u64,
    pub cycles: u32,
    pub objects: Vec<ObjectSummary>,
    pub mean_baseline_err: f64,
    pub mean_denoised_err: f64,
    /// Mean baseline error minus mean denoised error, m.
    pub improvement_m: f64,
    pub soundness_rate: f64,
    pub reset_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceReport {
    pub rows: Vec<TraceRow>,
    pub summary: TraceSummary,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_by(f64::total_cmp);
    let mid = xs.len() / 2;
    if xs.len().is_multiple_of(2) {
        0.5 * (xs[mid - 1] + xs[mid])
    } else {
        xs[mid]
    }
}

fn summarize(seed: u64, config: &ScenarioConfig, rows: &[TraceRow]) -> TraceSummary {
    let objects = config
        .objects
        .iter()
        .enumerate()
        .map(|(id, spec)| {
            let mine: Vec<&TraceRow> = rows.iter().filter(|r| r.object_id == id).collect();
            ObjectSummary {
                object_id: id,
                kind: spec.kind(),
                observed_cycles: mine.iter().filter(|r| r.observed).count(),
                mean_baseline_err: mean(mine.iter().map(|r| r.baseline_err)),
                mean_denoised_err: mean(mine.iter().map(|r| r.denoised_err)),
                median_baseline_err: median(mine.iter().map(|r| r.baseline_err).collect()),
                median_denoised_err: median(mine.iter().map(|r| r.denoised_err).collect()),
            }
        })
        .collect();
    let mean_baseline_err = mean(rows.iter().map(|r| r.baseline_err));
    let mean_denoised_err = mean(rows.iter().map(|r| r.denoised_err));
    TraceSummary {
        seed,
        cycles: config.cycles,
        objects,
        mean_baseline_err,
        mean_denoised_err,
        improvement_m: mean_baseline_err - mean_denoised_err,
        soundness_rate: mean(rows.iter().map(|r| if r.sound { 1.0 } else { 0.0 })),
        reset_count: rows.iter().filter(|r| r.was_reset).count(),
    }
}

/// Runs one scenario with `config.seed`.
///
/// Every object starts with the whole field as its belief and the field
/// center as its baseline. Each cycle the world steps, the scan policy turns
/// the observer, and every belief is predicted (then clipped to the field)
/// and, when the object is seen, updated. The baseline keeps its last value
/// on unobserved cycles.
pub fn run_scenario(config: &ScenarioConfig) -> Result<TraceReport> {
    config.validate()?;
    let seed = config.seed;
    let mut world_rng = ChaCha8Rng::seed_from_u64(seed);
    let mut obs_rng = ChaCha8Rng::seed_from_u64(seed);
    obs_rng.set_stream(1);

    let field = config.field()?;
    let field_center = field.centroid()?;
    let mut tracks = config
        .objects
        .iter()
        .map(|spec| {
            let kind = spec.kind();
            let table = match kind {
                ObjectKind::Ball => None,
                ObjectKind::Player { type_id } => {
                    let t = PlayerTypeSpec::builtin(type_id).ok_or_else(|| {
                        DenoiseError::InvalidConfig(vec![format!("unknown player type {type_id}")])
                    })?;
                    Some(build_max_move_table(&t, 1)?)
                }
            };
            Ok(ObjectTrack {
                belief: Belief::prior(kind, field.clone())?,
                table,
                baseline: field_center,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut state = WorldState::initial(config);
    let mut pose = config.observer.pose();
    let mut rows = Vec::with_capacity(config.cycles as usize * config.objects.len());

    for _ in 0..config.cycles {
        state = step_world(&state, config, &mut world_rng);
        let cycle = state.cycle;
        match &config.observer.scan_policy {
            ScanPolicy::Fixed => {}
            ScanPolicy::Rotating { period, step_deg } => {
                if cycle.is_multiple_of(*period) {
                    pose.body_angle = normalize_rad(pose.body_angle + step_deg.to_radians());
                }
            }
            ScanPolicy::TrackObject { id } => {
                let target = estimate(&tracks[*id].belief, config.estimator_mode)?;
                let rel = target - pose.position;
                if rel.norm() > 0.0 {
                    pose.body_angle = rel.angle();
                }
            }
        }

        for (id, (track, truth)) in tracks.iter_mut().zip(&state.objects).enumerate() {
            track.predict(&config.ball_params, &field)?;
            let true_vel = matches!(track.belief.kind, ObjectKind::Ball).then_some(truth.velocity);
            let obs = observe(
                &pose,
                truth.position,
                true_vel,
                &config.quantizer,
                &config.vel_noise,
                &mut obs_rng,
                cycle,
            )?;
            if let Some(obs) = &obs {
                let sector = observation_sector(obs, &config.quantizer)?;
                track.belief = update(
                    &track.belief,
                    &sector,
                    obs.velocity_reading.as_ref(),
                    &config.vel_noise,
                )?;
                track.baseline = baseline_estimate(obs);
            }
            let est = estimate(&track.belief, config.estimator_mode)?;
            rows.push(TraceRow {
                seed,
                cycle,
                object_id: id,
                observed: obs.is_some(),
                baseline_err: track.baseline.distance(truth.position),
                denoised_err: est.distance(truth.position),
                region_area: track.belief.region.area(),
                was_reset: track.belief.was_reset,
                sound: track.belief.region.contains(truth.position),
                distance: truth.position.distance(pose.position),
                true_pos: truth.position,
                estimate: est,
                baseline_pos: track.baseline,
            });
        }
    }

    let summary = summarize(seed, config, &rows);
    Ok(TraceReport { rows, summary })
}

/// Observer-to-object distance bands, meters; the last is open-ended.
pub const DISTANCE_BANDS: [(f64, f64); 4] = [
    (0.0, 10.0),
    (10.0, 20.0),
    (20.0, 40.0),
    (40.0, f64::INFINITY),
];

/// Errors over observed rows whose object lies in one distance band.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BandStats {
    pub lo: f64,
    /// `None` for the open-ended band.
    pub hi: Option<f64>,
    pub count: usize,
    pub mean_baseline_err: f64,
    pub mean_denoised_err: f64,
    pub improvement_m: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateSummary {
    pub base_seed: u64,
    pub n_seeds: usize,
    pub mean_improvement_m: f64,
    /// Sample standard deviation of per-seed improvement; 0 for one seed.
    pub std_improvement_m: f64,
    pub mean_baseline_err: f64,
    pub mean_denoised_err: f64,
    pub min_soundness_rate: f64,
    pub mean_soundness_rate: f64,
    pub reset_count: usize,
    pub bands: Vec<BandStats>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchmarkReport {
    pub runs: Vec<TraceReport>,
    pub aggregate: AggregateSummary,
}

/// Runs seeds `base.seed .. base.seed + n_seeds` and aggregates them.
pub fn accuracy_benchmark(base: &ScenarioConfig, n_seeds: usize) -> Result<BenchmarkReport> {
    if n_seeds < 1 {
        return Err(DenoiseError::ConstraintViolation(
            "n_seeds must be at least 1".into(),
        ));
    }
    base.validate()?;
    let runs = (0..n_seeds as u64)
        .into_par_iter()
        .map(|i| {
            let mut cfg = base.clone();
            cfg.seed = base.seed.wrapping_add(i);
            run_scenario(&cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let aggregate = aggregate(base.seed, &runs);
    Ok(BenchmarkReport { runs, aggregate })
}

fn aggregate(base_seed: u64, runs: &[TraceReport]) -> AggregateSummary {
    let n = runs.len();
    let improvements: Vec<f64> = runs.iter().map(|r| r.summary.improvement_m).collect();
    let mean_improvement_m = mean(improvements.iter().copied());
    let std_improvement_m = if n > 1 {
        let ss: f64 = improvements
            .iter()
            .map(|x| (x - mean_improvement_m).powi(2))
            .sum();
        (ss / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let bands = DISTANCE_BANDS
        .iter()
        .map(|&(lo, hi)| {
            let in_band: Vec<&TraceRow> = runs
                .iter()
                .flat_map(|r| &r.rows)
                .filter(|r| r.observed && r.distance >= lo && r.distance < hi)
                .collect();
            let b = mean(in_band.iter().map(|r| r.baseline_err));
            let d = mean(in_band.iter().map(|r| r.denoised_err));
            BandStats {
                lo,
                hi: hi.is_finite().then_some(hi),
                count: in_band.len(),
                mean_baseline_err: b,
                mean_denoised_err: d,
                improvement_m: b - d,
            }
        })
        .collect();
    AggregateSummary {
        base_seed,
        n_seeds: n,
        mean_improvement_m,
        std_improvement_m,
        mean_baseline_err: mean(runs.iter().map(|r| r.summary.mean_baseline_err)),
        mean_denoised_err: mean(runs.iter().map(|r| r.summary.mean_denoised_err)),
        min_soundness_rate: runs
            .iter()
            .map(|r| r.summary.soundness_rate)
            .fold(f64::INFINITY, f64::min),
        mean_soundness_rate: mean(runs.iter().map(|r| r.summary.soundness_rate)),
        reset_count: runs.iter().map(|r| r.summary.reset_count).sum(),
        bands,
    }
}

/// Geometry of one cycle of the two-cycle teammate demo.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DemoCycle {
    pub cycle: u32,
    pub sector: ConvexRegion,
    pub predicted: ConvexRegion,
    pub intersection: ConvexRegion,
    pub baseline_point: Point2,
    pub denoised_point: Point2,
    pub true_point: Point2,
    pub baseline_err: f64,
    pub denoised_err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoCycleDemo {
    pub observer: ObserverPose,
    pub cycles: Vec<DemoCycle>,
    pub report: TraceReport,
}

/// Observer at the origin watching a teammate on two consecutive cycles.
///
/// The belief is seeded by an earlier sighting of the teammate at its cycle-1
/// position. On cycle 1 the teammate has not moved, so the prediction covers
/// the whole sector and the estimate sits on the naive point. Between cycles
/// 1 and 2 it runs outward across a distance-quantization boundary, and the
/// prediction cuts the far part of the new sector away.
pub fn two_cycle_demo() -> Result<TwoCycleDemo> {
    let observer = ObserverPose {
        position: Point2::ORIGIN,
        body_angle: 0.0,
        view_half_width: 45f64.to_radians(),
    };
    let q = QuantizerParams::default();
    let noise = VelocityNoise::default();
    let kind = ObjectKind::Player { type_id: 0 };
    let table = build_max_move_table(&PlayerTypeSpec::DEFAULT, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);

    let earlier = Point2::polar(12.3, 14f64.to_radians());
    let path = [earlier, Point2::polar(13.2, 14.2f64.to_radians())];

    let first = observe(&observer, earlier, None, &q, &noise, &mut rng, 0)?
        .ok_or_else(|| DenoiseError::ConstraintViolation("demo teammate not visible".into()))?;
    let mut belief = init_belief(kind, &observation_sector(&first, &q)?, None, &noise)?;

    let mut cycles = Vec::new();
    let mut rows = Vec::new();
    for (i, &truth) in path.iter().enumerate() {
        let cycle = i as u32 + 1;
        let obs = observe(&observer, truth, None, &q, &noise, &mut rng, cycle)?
            .ok_or_else(|| DenoiseError::ConstraintViolation("demo teammate not visible".into()))?;
        let predicted = predict_player(&belief, &table)?;
        let sector = observation_sector(&obs, &q)?;
        belief = update(&predicted, &sector, None, &noise)?;
        let denoised = estimate(&belief, EstimatorMode::Centroid)?;
        let baseline = baseline_estimate(&obs);
        cycles.push(DemoCycle {
            cycle,
            sector: sector_to_polygon(&sector, ARC_STEPS)?,
            predicted: predicted.region.clone(),
            intersection: belief.region.clone(),
            baseline_point: baseline,
            denoised_point: denoised,
            true_point: truth,
            baseline_err: baseline.distance(truth),
            denoised_err: denoised.distance(truth),
        });
        rows.push(TraceRow {
            seed: 0,
            cycle,
            object_id: 0,
            observed: true,
            baseline_err: baseline.distance(truth),
            denoised_err: denoised.distance(truth),
            region_area: belief.region.area(),
            was_reset: belief.was_reset,
            sound: belief.region.contains(truth),
            distance: truth.distance(observer.position),
            true_pos: truth,
            estimate: denoised,
            baseline_pos: baseline,
        });
    }

    let script = ScenarioConfig {
        cycles: path.len() as u32,
        seed: 0,
        field_half_x: default_half_x(),
        field_half_y: default_half_y(),
        observer: ObserverConfig {
            position: observer.position,
            body_angle: observer.body_angle,
            view_half_width: observer.view_half_width,
            scan_policy: ScanPolicy::Fixed,
        },
        objects: vec![ObjectSpec::Player {
            type_id: 0,
            position: earlier,
            motion: MotionModel::Waypoints {
                points: path.to_vec(),
                speed: None,
            },
        }],
        quantizer: q,
        vel_noise: noise,
        ball_params: BallParams::default(),
        estimator_mode: EstimatorMode::Centroid,
    };
    let summary = summarize(0, &script, &rows);
    Ok(TwoCycleDemo {
        observer,
        cycles,
        report: TraceReport { rows, summary },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_player(motion: MotionModel, policy: ScanPolicy) -> ScenarioConfig {
        ScenarioConfig {
            cycles: 200,
            objects: vec![ObjectSpec::Player {
                type_id: 0,
                position: Point2::new(0.0, 0.0),
                motion,
            }],
            observer: ObserverConfig {
                position: Point2::new(-15.0, 3.0),
                body_angle: 0.0,
                view_half_width: 45f64.to_radians(),
                scan_policy: policy,
            },
            ..ScenarioConfig::default_suite()
        }
    }

    #[test]
    fn ball_takes_one_euler_step() {
        let mut cfg = ScenarioConfig::default_suite();
        cfg.objects = vec![ObjectSpec::Ball {
            position: Point2::ORIGIN,
            velocity: Point2::new(1.0, 0.0),
            kicks: Vec::new(),
        }];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let next = step_world(&WorldState::initial(&cfg), &cfg, &mut rng);
        assert_eq!(next.cycle, 1);
        assert_eq!(next.objects[0].position, Point2::new(1.0, 0.0));
        assert!((next.objects[0].velocity.x - 0.94).abs() < 1e-15);
        assert_eq!(next.objects[0].velocity.y, 0.0);
    }

    #[test]
    fn kicks_apply_after_decay_and_walls_stop_the_ball() {
        let mut cfg = ScenarioConfig::default_suite();
        cfg.objects = vec![ObjectSpec::Ball {
            position: Point2::new(52.0, 0.0),
            velocity: Point2::ORIGIN,
            kicks: vec![Kick {
                cycle: 1,
                velocity: Point2::new(2.0, 0.0),
            }],
        }];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s1 = step_world(&WorldState::initial(&cfg), &cfg, &mut rng);
        assert_eq!(s1.objects[0].velocity, Point2::new(2.0, 0.0));
        let s2 = step_world(&s1, &cfg, &mut rng);
        assert_eq!(s2.objects[0].position, Point2::new(52.5, 0.0));
        assert_eq!(s2.objects[0].velocity, Point2::ORIGIN);
    }

    #[test]
    fn zero_step_walker_stays_put() {
        let cfg = single_player(MotionModel::RandomWalk { max_step: 0.0 }, ScanPolicy::Fixed);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = WorldState::initial(&cfg);
        let next = step_world(&s, &cfg, &mut rng);
        assert_eq!(next.objects[0].position, s.objects[0].position);
    }

    #[test]
    fn player_steps_respect_max_speed() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for motion in [
            MotionModel::RandomWalk { max_step: 1.05 },
            MotionModel::Waypoints {
                points: vec![Point2::new(30.0, 20.0), Point2::new(-40.0, -30.0)],
                speed: None,
            },
        ] {
            let cfg = single_player(motion, ScanPolicy::Fixed);
            let mut s = WorldState::initial(&cfg);
            for _ in 0..100 {
                let next = step_world(&s, &cfg, &mut rng);
                let moved = next.objects[0].position.distance(s.objects[0].position);
                assert!(moved <= 1.05 + 1e-9, "moved {moved}");
                s = next;
            }
        }
    }

    #[test]
    fn waypoints_are_followed_in_order() {
        let cfg = single_player(
            MotionModel::Waypoints {
                points: vec![Point2::new(2.0, 0.0), Point2::new(2.0, 2.0)],
                speed: Some(1.0),
            },
            ScanPolicy::Fixed,
        );
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut s = WorldState::initial(&cfg);
        for _ in 0..4 {
            s = step_world(&s, &cfg, &mut rng);
        }
        assert!(s.objects[0].position.distance(Point2::new(2.0, 2.0)) < 1e-12);
    }

    #[test]
    fn runs_are_deterministic() {
        let cfg = ScenarioConfig::default_suite();
        let a = run_scenario(&cfg).unwrap();
        let b = run_scenario(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert_eq!(a.rows.len(), 200 * 3);
    }

    #[test]
    fn stationary_observed_player_is_always_contained() {
        let cfg = single_player(MotionModel::RandomWalk { max_step: 0.0 }, ScanPolicy::Fixed);
        let report = run_scenario(&cfg).unwrap();
        assert!(report.rows.iter().all(|r| r.observed));
        assert_eq!(report.summary.soundness_rate, 1.0);
        assert_eq!(report.summary.reset_count, 0);
    }

    #[test]
    fn tracking_policy_keeps_object_in_view() {
        let cfg = single_player(
            MotionModel::RandomWalk { max_step: 1.0 },
            ScanPolicy::TrackObject { id: 0 },
        );
        let report = run_scenario(&cfg).unwrap();
        let seen = report.rows.iter().filter(|r| r.observed).count();
        assert!(seen >= 195, "seen {seen}");
        assert_eq!(report.summary.soundness_rate, 1.0);
    }

    #[test]
    fn unobserved_baseline_holds_last_value() {
        let cfg = ScenarioConfig::default_suite();
        let report = run_scenario(&cfg).unwrap();
        let rows: Vec<&TraceRow> = report.rows.iter().filter(|r| r.object_id == 2).collect();
        for w in rows.windows(2) {
            if !w[1].observed {
                assert_eq!(w[1].baseline_pos, w[0].baseline_pos);
            }
        }
    }

    #[test]
    fn violated_motion_bound_triggers_reset() {
        // Beyond velocity range the tracker only knows the fallback reach.
        let mut cfg = single_player(MotionModel::RandomWalk { max_step: 0.0 }, ScanPolicy::Fixed);
        cfg.observer.position = Point2::new(-45.0, 3.0);
        cfg.objects = vec![ObjectSpec::Ball {
            position: Point2::new(0.0, 0.0),
            velocity: Point2::ORIGIN,
            kicks: vec![Kick {
                cycle: 50,
                velocity: Point2::new(0.0, 5.0),
            }],
        }];
        let report = run_scenario(&cfg).unwrap();
        assert!(report.summary.reset_count >= 1);
        let reset = report.rows.iter().find(|r| r.was_reset).unwrap();
        assert!(reset.sound);
    }

    #[test]
    fn validation_lists_every_offending_field() {
        let mut cfg = ScenarioConfig::default_suite();
        cfg.cycles = 0;
        cfg.objects.push(ObjectSpec::Player {
            type_id: 0,
            position: Point2::new(100.0, 0.0),
            motion: MotionModel::RandomWalk { max_step: 2.0 },
        });
        cfg.objects.push(ObjectSpec::Player {
            type_id: 7,
            position: Point2::ORIGIN,
            motion: MotionModel::RandomWalk { max_step: 0.5 },
        });
        let Err(DenoiseError::InvalidConfig(issues)) = run_scenario(&cfg) else {
            panic!("expected config error");
        };
        assert!(issues.iter().any(|m| m.starts_with("cycles")));
        assert!(issues.iter().any(|m| m.starts_with("objects[3].position")));
        assert!(issues
            .iter()
            .any(|m| m.starts_with("objects[3].motion.random_walk.max_step")));
        assert!(issues.iter().any(|m| m.starts_with("objects[4].type_id")));
    }

    #[test]
    fn single_seed_aggregate_matches_its_run() {
        let cfg = ScenarioConfig {
            cycles: 50,
            ..ScenarioConfig::default_suite()
        };
        let bench = accuracy_benchmark(&cfg, 1).unwrap();
        let run = run_scenario(&cfg).unwrap();
        assert_eq!(bench.runs[0], run);
        assert_eq!(
            bench.aggregate.mean_improvement_m,
            run.summary.improvement_m
        );
        assert_eq!(bench.aggregate.std_improvement_m, 0.0);
        assert_eq!(bench.aggregate.reset_count, run.summary.reset_count);
        assert!(accuracy_benchmark(&cfg, 0).is_err());
    }

    #[test]
    fn two_cycle_demo_shape() {
        let demo = two_cycle_demo().unwrap();
        assert_eq!(demo.cycles.len(), 2);
        let (c1, c2) = (&demo.cycles[0], &demo.cycles[1]);
        assert!(c1.baseline_point.distance(c1.denoised_point) <= 0.05);
        assert!(c2.intersection.area() < c2.sector.area());
        assert!(c2.denoised_err <= c2.baseline_err);
        assert_eq!(demo.report.rows.len(), 2);
        assert!(demo.report.rows.iter().all(|r| r.sound));
    }

    #[test]
    fn config_parses_from_json_and_rejects_unknown_keys() {
        let json = serde_json::to_string(&ScenarioConfig::default_suite()).unwrap();
        let back: ScenarioConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, ScenarioConfig::default_suite());

        let minimal = r#"{
            "cycles": 10,
            "observer": {"position": {"x": 0, "y": 0}, "body_angle": 0, "view_half_width": 1.0},
            "objects": [{"kind": "ball", "position": {"x": 5, "y": 0}}]
        }"#;
        let cfg: ScenarioConfig = serde_json::from_str(minimal).unwrap();
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.observer.scan_policy, ScanPolicy::Fixed);

        let typo = minimal.replace("\"cycles\"", "\"cylces\"");
        assert!(serde_json::from_str::<ScenarioConfig>(&typo).is_err());
        let inner_typo = minimal.replace("\"position\": {\"x\": 5", "\"positon\": {\"x\": 5");
        assert!(serde_json::from_str::<ScenarioConfig>(&inner_typo).is_err());
        let extra = minimal.replace("\"kind\": \"ball\",", "\"kind\": \"ball\", \"spin\": 1,");
        assert!(serde_json::from_str::<ScenarioConfig>(&extra).is_err());
    }
}
