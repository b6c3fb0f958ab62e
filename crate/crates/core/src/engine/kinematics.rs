//! Ego bicycle model and ballistic props.

use serde::{Deserialize, Serialize};

use crate::geometry::{wrap_angle, Pose2D, Vec2};

/// Fixed simulation step, seconds.
pub const DT: f64 = 0.05;
pub const GRAVITY: f64 = 9.81;
pub const WHEELBASE: f64 = 2.7;
/// Maximum front-wheel angle, radians.
pub const STEER_MAX: f64 = 0.6;
pub const V_MAX: f64 = 30.0;
/// Acceleration at full throttle before the friction limit applies.
pub const THROTTLE_ACCEL: f64 = 3.0;
pub const EGO_LENGTH: f64 = 4.5;
pub const EGO_WIDTH: f64 = 1.8;
/// Props whose base is above this height pass over the ego.
pub const EGO_ROOF: f64 = 1.6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinematicState {
    pub pose: Pose2D,
    /// Signed speed along `pose.heading`, m/s.
    pub speed: f64,
    pub steer_angle: f64,
    /// Height of the body's base above ground.
    pub height: f64,
    pub vertical_speed: f64,
    pub active: bool,
}

impl KinematicState {
    pub fn at_rest(pose: Pose2D) -> Self {
        KinematicState {
            pose,
            speed: 0.0,
            steer_angle: 0.0,
            height: 0.0,
            vertical_speed: 0.0,
            active: true,
        }
    }

    pub fn velocity(&self) -> Vec2 {
        Vec2::from_angle(self.pose.heading).scale(self.speed)
    }

    pub fn airborne(&self) -> bool {
        self.height > 0.0 || self.vertical_speed > 0.0
    }
}

/// Normalized ego command. Values outside the ranges are clamped.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuousControl {
    /// 0..=1
    pub throttle: f64,
    /// 0..=1
    pub brake: f64,
    /// -1..=1, positive steers left.
    pub steer: f64,
}

impl ContinuousControl {
    pub const STOP: ContinuousControl = ContinuousControl {
        throttle: 0.0,
        brake: 1.0,
        steer: 0.0,
    };

    pub fn clamped(self) -> Self {
        let fix = |v: f64, lo: f64, hi: f64| if v.is_nan() { 0.0 } else { v.clamp(lo, hi) };
        ContinuousControl {
            throttle: fix(self.throttle, 0.0, 1.0),
            brake: fix(self.brake, 0.0, 1.0),
            steer: fix(self.steer, -1.0, 1.0),
        }
    }
}

/// Longitudinal acceleration for a clamped control under friction `mu`.
/// Both driving and braking are bounded by `mu * g`.
pub fn ego_acceleration(control: &ContinuousControl, speed: f64, mu: f64) -> f64 {
    let limit = mu * GRAVITY;
    let drive = control.throttle * THROTTLE_ACCEL.min(limit);
    let brake = control.brake * limit;
    let a = if speed > 0.0 {
        drive - brake
    } else if speed < 0.0 {
        drive + brake
    } else {
        // brakes hold a stopped vehicle
        (drive - brake).max(0.0)
    };
    a.clamp(-limit, limit)
}

/// Advance the kinematic bicycle model one step.
///
/// Speed is integrated first (never crossing zero under braking, capped at
/// `V_MAX`); pose then follows the constant-curvature arc at the mean speed,
/// which is exact for constant speed and steer.
pub fn integrate_bicycle(state: &KinematicState, control: &ContinuousControl, mu: f64, dt: f64) -> KinematicState {
    let control = control.clamped();
    let steer = control.steer * STEER_MAX;
    let a = ego_acceleration(&control, state.speed, mu);
    let mut v1 = state.speed + a * dt;
    if state.speed * v1 < 0.0 {
        // braking never reverses the direction of travel
        v1 = 0.0;
    }
    v1 = v1.clamp(-V_MAX, V_MAX);
    let v_mean = 0.5 * (state.speed + v1);
    let dtheta = v_mean / WHEELBASE * steer.tan() * dt;
    let mid = state.pose.heading + 0.5 * dtheta;
    let (s, c) = mid.sin_cos();
    // chord of the arc swept at constant curvature
    let half = 0.5 * dtheta;
    let chord = if half.abs() < 1e-9 { 1.0 } else { half.sin() / half };
    let travel = v_mean * dt * chord;
    KinematicState {
        pose: Pose2D::new(
            state.pose.x + travel * c,
            state.pose.y + travel * s,
            wrap_angle(state.pose.heading + dtheta),
        ),
        speed: v1,
        steer_angle: steer,
        ..*state
    }
}

/// One step of a ballistic prop. Gravity acts on the vertical channel; on
/// ground contact the height clamps to zero and the in-plane speed then
/// decays at `ground_decel` until rest.
pub fn integrate_ballistic(state: &KinematicState, dt: f64, ground_decel: f64) -> KinematicState {
    let mut next = *state;
    let was_airborne = state.airborne();
    if was_airborne {
        let h = state.height + state.vertical_speed * dt - 0.5 * GRAVITY * dt * dt;
        if h <= 0.0 {
            next.height = 0.0;
            next.vertical_speed = 0.0;
        } else {
            next.height = h;
            next.vertical_speed = state.vertical_speed - GRAVITY * dt;
        }
    }
    let v0 = state.speed;
    let v1 = if was_airborne {
        v0
    } else {
        (v0 - ground_decel * dt).max(0.0)
    };
    let step = 0.5 * (v0 + v1) * dt;
    let (s, c) = state.pose.heading.sin_cos();
    next.pose.x += step * c;
    next.pose.y += step * s;
    next.speed = v1;
    next
}
