//! What the ego sees each tick: lidar ranges, apparent-class detections and
//! a top-down occupancy raster. Nothing here exposes an actor's true class.

mod detect;
mod lidar;
mod raster;

use serde::{Deserialize, Serialize};

pub use detect::{detect_entities, line_of_sight, Detection};
pub use lidar::sense_lidar;
pub use raster::{render_occupancy, CellCode, OccupancyRaster};

use crate::engine::WorldState;
use crate::geometry::{wrap_angle, Pose2D, Rect};
use crate::model::{WeatherPreset, WeatherPresetId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerceptionConfig {
    pub lidar_rays: usize,
    pub lidar_max_range: f64,
    pub raster_size: usize,
    pub raster_cell: f64,
    /// Disable to get exact geometric lidar ranges.
    pub lidar_noise: bool,
}

impl Default for PerceptionConfig {
    fn default() -> Self {
        PerceptionConfig {
            lidar_rays: 72,
            lidar_max_range: 50.0,
            raster_size: 128,
            raster_cell: 0.5,
            lidar_noise: true,
        }
    }
}

impl PerceptionConfig {
    pub fn range_cap(&self, weather: &WeatherPreset) -> f64 {
        self.lidar_max_range.min(weather.visibility_range)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EgoObservation {
    pub pose: Pose2D,
    pub speed: f64,
    pub steer_angle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoalObservation {
    /// Bearing of the goal center relative to the ego heading, radians.
    pub bearing: f64,
    /// Distance from the ego center to the goal region, metres.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Observation {
    pub tick: u64,
    pub ego: EgoObservation,
    /// Ranges counterclockwise from the heading, ray 0 straight ahead.
    pub lidar: Vec<f64>,
    pub detections: Vec<Detection>,
    pub weather: WeatherPresetId,
    pub goal: GoalObservation,
}

pub fn goal_observation(world: &WorldState, goal: &Rect) -> GoalObservation {
    let p = world.ego.pose.position();
    let c = goal.center() - p;
    GoalObservation {
        bearing: wrap_angle(c.y.atan2(c.x) - world.ego.pose.heading),
        distance: goal.distance_to(p),
    }
}

/// Build the policy observation; advances the world's lidar noise stream.
pub fn observe(world: &mut WorldState, goal: &Rect, weather: &WeatherPreset, cfg: &PerceptionConfig) -> Observation {
    let mut rng = world.lidar_rng.clone();
    let lidar = sense_lidar(world, weather, cfg, &mut rng);
    world.lidar_rng = rng;
    Observation {
        tick: world.tick,
        ego: EgoObservation {
            pose: world.ego.pose,
            speed: world.ego.speed,
            steer_angle: world.ego.steer_angle,
        },
        lidar,
        detections: detect_entities(world, weather),
        weather: weather.id,
        goal: goal_observation(world, goal),
    }
}
