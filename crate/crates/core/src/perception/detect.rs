use serde::{Deserialize, Serialize};

use crate::engine::kinematics::EGO_ROOF;
use crate::engine::WorldState;
use crate::geometry::{obb_overlap, segment_hits_obb, wrap_angle, Vec2};
use crate::model::{ActorClass, WeatherPreset};

/// One perceived object, in the ego frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Detection {
    /// Opaque handle, stable within a run.
    pub id: String,
    pub apparent_class: ActorClass,
    /// Center in the ego frame (x forward, y left), metres.
    pub position: Vec2,
    pub heading: f64,
    pub length: f64,
    pub width: f64,
    /// Range rate along the line of sight; negative when closing.
    pub relative_speed: f64,
}

pub fn opaque_id(index: usize) -> String {
    format!("obj-{index}")
}

/// Center-point line of sight from the ego to actor `i`, blocked by any
/// other active actor's box. Boxes above the ego roof do not block, and
/// neither do boxes overlapping the target's own (cargo and its carrier).
pub fn line_of_sight(world: &WorldState, i: usize) -> bool {
    let from = world.ego.pose.position();
    let target = world.actor_obb(i);
    !world
        .active_indices()
        .filter(|&j| j != i && world.actors[j].kin.height < EGO_ROOF)
        .map(|j| world.actor_obb(j))
        .any(|o| !obb_overlap(&o, &target) && segment_hits_obb(from, target.center, &o))
}

/// Active actors within visibility and line of sight, nearest first.
pub fn detect_entities(world: &WorldState, weather: &WeatherPreset) -> Vec<Detection> {
    let ego = &world.ego;
    let origin = ego.pose.position();
    let mut found: Vec<(f64, usize)> = world
        .active_indices()
        .filter_map(|i| {
            let d = world.actors[i].kin.pose.position().distance(origin);
            (d <= weather.visibility_range && line_of_sight(world, i)).then_some((d, i))
        })
        .collect();
    found.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    found
        .into_iter()
        .map(|(d, i)| {
            let body = &world.bodies[i];
            let kin = &world.actors[i].kin;
            let p = kin.pose.position();
            let los = if d > 1e-12 { (p - origin).scale(1.0 / d) } else { Vec2::ZERO };
            Detection {
                id: opaque_id(i),
                apparent_class: body.apparent_class,
                position: p.to_local(origin, ego.pose.heading),
                heading: wrap_angle(kin.pose.heading - ego.pose.heading),
                length: body.length,
                width: body.width,
                relative_speed: (kin.velocity() - ego.velocity()).dot(los),
            }
        })
        .collect()
}
