//! Scripted actor motion.

use super::kinematics::integrate_ballistic;
use super::world::{ActorBody, ActorState, EGO_ID};
use crate::geometry::{wrap_angle, Vec2};
use crate::model::{ActorClass, BehaviorKind};

/// Default acceleration used by `waypoint_follow` to reach waypoint speeds.
pub const WAYPOINT_ACCEL: f64 = 3.0;
pub const ROLLING_MAX_SPEED: f64 = 6.0;
pub const PURSUIT_TURN_RATE: f64 = 1.0;

/// In-plane deceleration after landing: balls roll, everything else slides.
pub fn ground_decel(class: ActorClass) -> f64 {
    match class {
        ActorClass::Ball => 0.6,
        _ => 4.0,
    }
}

/// Initialize motion state when a behavior starts (spawn, activation or
/// `set_behavior`).
pub fn enter_behavior(st: &mut ActorState) {
    st.waypoint = 0;
    let script = &st.script;
    match script.kind {
        BehaviorKind::Static => {
            st.kin.speed = 0.0;
        }
        BehaviorKind::WaypointFollow => {
            if let Some(w) = script.waypoints.first() {
                st.kin.speed = w.speed;
            }
        }
        BehaviorKind::Ballistic => {
            let v = Vec2::new(script.param_or("vx", 0.0), script.param_or("vy", 0.0));
            st.kin.speed = v.norm();
            if st.kin.speed > 1e-12 {
                st.kin.pose.heading = v.y.atan2(v.x);
            }
            st.kin.vertical_speed = script.param_or("vz", 0.0);
            if let Some(h) = script.param("release_height") {
                st.kin.height = h;
            }
        }
        BehaviorKind::Rolling => {
            st.kin.speed = script.param_or("initial_speed", st.kin.speed);
        }
        BehaviorKind::ScriptedDoorSwing => {
            st.kin.speed = 0.0;
        }
        BehaviorKind::Pursuit => {
            st.kin.speed = script.param_or("speed", 0.0);
        }
    }
}

fn approach(current: f64, target: f64, max_delta: f64) -> f64 {
    if max_delta <= 0.0 {
        return target;
    }
    current + (target - current).clamp(-max_delta, max_delta)
}

/// Advance one scripted actor by `dt`. `lookup` resolves another actor's
/// position from the start of the tick. Returns true when the actor
/// despawned itself (end of a `despawn_at_end` route).
pub fn integrate_actor(
    st: &mut ActorState,
    body: &ActorBody,
    dt: f64,
    ego: Vec2,
    lookup: impl Fn(&str) -> Option<Vec2>,
) -> bool {
    let script = &st.script;
    match script.kind {
        BehaviorKind::Static => false,
        BehaviorKind::WaypointFollow => {
            let accel = script.param_or("accel", WAYPOINT_ACCEL);
            let despawn = script.param_or("despawn_at_end", 0.0) >= 0.5;
            let Some(target) = script.waypoints.get(st.waypoint).copied() else {
                st.kin.speed = 0.0;
                return false;
            };
            let v0 = st.kin.speed;
            let v1 = approach(v0, target.speed, accel * dt);
            st.kin.speed = v1;
            let mut budget = 0.5 * (v0 + v1) * dt;
            let mut pos = st.kin.pose.position();
            loop {
                let Some(wp) = script.waypoints.get(st.waypoint) else {
                    st.kin.speed = 0.0;
                    if despawn {
                        st.kin.pose.x = pos.x;
                        st.kin.pose.y = pos.y;
                        st.kin.active = false;
                        return true;
                    }
                    break;
                };
                let to = wp.position() - pos;
                let d = to.norm();
                if d > 1e-9 {
                    st.kin.pose.heading = to.y.atan2(to.x);
                }
                if d <= budget {
                    budget -= d;
                    pos = wp.position();
                    st.waypoint += 1;
                    continue;
                }
                pos = pos + to.scale(budget / d);
                break;
            }
            st.kin.pose.x = pos.x;
            st.kin.pose.y = pos.y;
            false
        }
        BehaviorKind::Ballistic => {
            let decel = script.param_or("ground_decel", ground_decel(body.true_class));
            st.kin = integrate_ballistic(&st.kin, dt, decel);
            false
        }
        BehaviorKind::Rolling => {
            let a = script.param_or("accel", 0.0);
            let vmax = script.param_or("max_speed", ROLLING_MAX_SPEED);
            let v0 = st.kin.speed;
            let v1 = (v0 + a * dt).clamp(0.0, vmax);
            let step = 0.5 * (v0 + v1) * dt;
            let dir = Vec2::from_angle(st.kin.pose.heading);
            st.kin.pose.x += dir.x * step;
            st.kin.pose.y += dir.y * step;
            st.kin.speed = v1;
            false
        }
        BehaviorKind::ScriptedDoorSwing => {
            // pivot about the hinge at the front end of the closed door
            let rate = script.param_or("swing_rate", 0.0);
            let max = script.param_or("max_angle", 0.0).abs();
            let base = body.spawn.heading;
            let angle = wrap_angle(st.kin.pose.heading - base);
            let next = (angle + rate * dt).clamp(-max, max);
            let hinge = body.spawn.position() + Vec2::from_angle(base).scale(0.5 * body.length);
            let heading = base + next;
            let center = hinge - Vec2::from_angle(heading).scale(0.5 * body.length);
            st.kin.pose.x = center.x;
            st.kin.pose.y = center.y;
            st.kin.pose.heading = wrap_angle(heading);
            false
        }
        BehaviorKind::Pursuit => {
            let speed = script.param_or("speed", 0.0);
            let turn = script.param_or("turn_rate", PURSUIT_TURN_RATE);
            let target = match script.target.as_deref() {
                Some(EGO_ID) | None => Some(ego),
                Some(id) => lookup(id),
            };
            if let Some(t) = target {
                let to = t - st.kin.pose.position();
                if to.norm() > 1e-9 {
                    let desired = to.y.atan2(to.x);
                    let err = wrap_angle(desired - st.kin.pose.heading);
                    let max_turn = turn * dt;
                    st.kin.pose.heading = wrap_angle(st.kin.pose.heading + err.clamp(-max_turn, max_turn));
                }
            }
            st.kin.speed = speed;
            let dir = Vec2::from_angle(st.kin.pose.heading);
            st.kin.pose.x += dir.x * speed * dt;
            st.kin.pose.y += dir.y * speed * dt;
            false
        }
    }
}
