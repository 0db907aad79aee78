//! The observation channel: log-scale distance quantization, integer-degree
//! bearing rounding, the view cone, and their inversion into intervals and
//! sectors that are guaranteed to contain the true position.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{DenoiseError, Result};
use crate::geometry::{Point2, Sector};

/// Rounding rule for exact halves. Only one rule is supported.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfRound {
    #[default]
    AwayFromZero,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuantizerParams {
    /// Step of the rounded log-distance.
    pub inner_step: f64,
    /// Output resolution in meters.
    pub outer_step: f64,
    /// Offset keeping `ln` finite at zero distance.
    pub eps: f64,
    pub half_round_mode: HalfRound,
}

impl Default for QuantizerParams {
    fn default() -> Self {
        Self {
            inner_step: 0.1,
            outer_step: 0.1,
            eps: 1e-6,
            half_round_mode: HalfRound::AwayFromZero,
        }
    }
}

impl QuantizerParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("inner_step", self.inner_step),
            ("outer_step", self.outer_step),
            ("eps", self.eps),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(DenoiseError::ConstraintViolation(format!(
                    "quantizer {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Forward image of log-bin `k`, in units of `outer_step`.
    fn bin_output(&self, k: i64) -> f64 {
        rint((k as f64 * self.inner_step).exp() / self.outer_step)
    }

    fn bin_of(&self, d: f64) -> i64 {
        rint((d + self.eps).ln() / self.inner_step) as i64
    }
}

/// Bounds of the velocity-reading perturbation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VelocityNoise {
    /// Relative speed error bound.
    pub speed_eps: f64,
    /// Direction error bound in radians.
    pub dir_eps: f64,
    /// Velocity is only read for objects within this distance (m).
    pub visibility_range: f64,
}

impl Default for VelocityNoise {
    fn default() -> Self {
        Self {
            speed_eps: 0.1,
            dir_eps: 5f64.to_radians(),
            visibility_range: 30.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VelocityReading {
    /// m/cycle
    pub speed: f64,
    /// Global direction in radians.
    pub direction: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObserverPose {
    pub position: Point2,
    /// Global facing direction in radians.
    pub body_angle: f64,
    /// Half the view cone in radians, in (0, π].
    pub view_half_width: f64,
}

impl ObserverPose {
    pub fn validate(&self) -> Result<()> {
        if !(self.position.is_finite() && self.body_angle.is_finite()) {
            return Err(DenoiseError::ConstraintViolation(
                "observer pose has non-finite fields".into(),
            ));
        }
        if !(self.view_half_width > 0.0 && self.view_half_width <= PI) {
            return Err(DenoiseError::ConstraintViolation(format!(
                "view_half_width must lie in (0, pi], got {}",
                self.view_half_width
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub distance_q: f64,
    /// Bearing relative to the observer's body angle.
    pub bearing_deg: i32,
    pub velocity_reading: Option<VelocityReading>,
    pub observer: ObserverPose,
    pub cycle: u32,
}

/// Round to nearest, halves away from zero.
fn rint(x: f64) -> f64 {
    x.round()
}

/// Wraps an angle in degrees into (-180, 180].
pub fn normalize_deg(theta: f64) -> f64 {
    let t = (theta + 180.0).rem_euclid(360.0) - 180.0;
    if t == -180.0 {
        180.0
    } else {
        t
    }
}

/// Wraps an angle in radians into (-π, π].
pub fn normalize_rad(theta: f64) -> f64 {
    normalize_deg(theta.to_degrees()).to_radians()
}

pub fn quantize_distance(d: f64, q: &QuantizerParams) -> Result<f64> {
    if !d.is_finite() || d < 0.0 {
        return Err(DenoiseError::ConstraintViolation(format!(
            "distance must be finite and non-negative, got {d}"
        )));
    }
    let log_q = rint((d + q.eps).ln() / q.inner_step) * q.inner_step;
    Ok(rint(log_q.exp() / q.outer_step) * q.outer_step)
}

pub fn round_angle(theta_deg: f64) -> i32 {
    rint(theta_deg) as i32
}

/// Closed interval of true distances consistent with a quantized reading.
///
/// Log-bins are scanned outward from the bin nearest the reading; the bins
/// whose forward image equals the reading form a contiguous run because the
/// quantizer is monotone, and the interval is the hull of their preimages.
/// Bounds are padded by 1e-9 relative so floating-point error in the forward
/// path cannot place a true distance just outside.
pub fn distance_interval(d_q: f64, q: &QuantizerParams) -> Result<(f64, f64)> {
    q.validate()?;
    if !d_q.is_finite() || d_q < 0.0 {
        return Err(DenoiseError::NoPreimage(d_q));
    }
    let target = rint(d_q / q.outer_step);
    if (d_q / q.outer_step - target).abs() > 1e-6 {
        return Err(DenoiseError::NoPreimage(d_q));
    }

    let k_floor = q.bin_of(0.0);
    let k_center = q.bin_of(d_q);
    let Some(seed) = (k_center - 3..=k_center + 3)
        .filter(|&k| k >= k_floor)
        .find(|&k| q.bin_output(k) == target)
    else {
        return Err(DenoiseError::NoPreimage(d_q));
    };

    let mut k_lo = seed;
    while k_lo > k_floor && q.bin_output(k_lo - 1) == target {
        k_lo -= 1;
    }
    let mut k_hi = seed;
    while q.bin_output(k_hi + 1) == target {
        k_hi += 1;
    }

    let lo = ((k_lo as f64 - 0.5) * q.inner_step).exp() - q.eps;
    let hi = ((k_hi as f64 + 0.5) * q.inner_step).exp() - q.eps;
    let lo = (lo - 1e-9 * lo.abs().max(1.0)).max(0.0);
    let hi = hi + 1e-9 * hi.abs().max(1.0);
    Ok((lo, hi))
}

/// Degrees consistent with an integer bearing.
pub fn angle_interval(bearing_deg: i32) -> (f64, f64) {
    let b = f64::from(bearing_deg);
    (b - 0.5, b + 0.5)
}

/// Passes one object through the channel.
///
/// Returns `None` when the true bearing falls outside the view cone. The
/// velocity reading, when `true_vel` is given and the object is within the
/// visibility range, satisfies `true_speed = reading.speed * f` for some
/// `f ∈ [1 - speed_eps, 1 + speed_eps]` and has a direction error of at most
/// `dir_eps`.
#[allow(clippy::too_many_arguments)]
pub fn observe<R: Rng + ?Sized>(
    pose: &ObserverPose,
    true_pos: Point2,
    true_vel: Option<Point2>,
    q: &QuantizerParams,
    vel_noise: &VelocityNoise,
    rng: &mut R,
    cycle: u32,
) -> Result<Option<Observation>> {
    pose.validate()?;
    let rel = true_pos - pose.position;
    let distance = rel.norm();
    let bearing = normalize_deg(rel.angle().to_degrees() - pose.body_angle.to_degrees());
    if bearing.abs() > pose.view_half_width.to_degrees() {
        return Ok(None);
    }
    let distance_q = quantize_distance(distance, q)?;
    let bearing_deg = round_angle(bearing);

    let velocity_reading = match true_vel {
        Some(v) if distance <= vel_noise.visibility_range => {
            let factor = 1.0 + rng.gen_range(-1.0..=1.0) * vel_noise.speed_eps;
            let dir_err = rng.gen_range(-1.0..=1.0) * vel_noise.dir_eps;
            Some(VelocityReading {
                speed: v.norm() / factor,
                direction: normalize_rad(v.angle() + dir_err),
            })
        }
        _ => None,
    };

    Ok(Some(Observation {
        distance_q,
        bearing_deg,
        velocity_reading,
        observer: *pose,
        cycle,
    }))
}

/// The annular wedge of positions consistent with `obs`.
pub fn observation_sector(obs: &Observation, q: &QuantizerParams) -> Result<Sector> {
    let (r_lo, r_hi) = distance_interval(obs.distance_q, q)?;
    let (a_lo, a_hi) = angle_interval(obs.bearing_deg);
    Sector::new(
        obs.observer.position,
        r_lo,
        r_hi,
        obs.observer.body_angle + a_lo.to_radians(),
        obs.observer.body_angle + a_hi.to_radians(),
    )
}
