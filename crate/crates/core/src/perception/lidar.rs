use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::PerceptionConfig;
use crate::engine::kinematics::EGO_ROOF;
use crate::engine::WorldState;
use crate::geometry::{ray_obb, Vec2};
use crate::model::WeatherPreset;

/// Ray-cast against every active actor below roof height. Misses read the
/// range cap exactly; hits get Gaussian noise from `rng` when enabled.
pub fn sense_lidar<R: Rng>(world: &WorldState, weather: &WeatherPreset, cfg: &PerceptionConfig, rng: &mut R) -> Vec<f64> {
    let cap = cfg.range_cap(weather);
    let origin = world.ego.pose.position();
    let obbs: Vec<_> = world
        .active_indices()
        .filter(|&i| world.actors[i].kin.height < EGO_ROOF)
        .map(|i| world.actor_obb(i))
        .collect();
    let sigma = if cfg.lidar_noise { weather.lidar_noise_sigma } else { 0.0 };
    let noise = (sigma > 0.0).then(|| Normal::new(0.0, sigma).expect("finite sigma"));
    let step = std::f64::consts::TAU / cfg.lidar_rays as f64;
    (0..cfg.lidar_rays)
        .map(|k| {
            let dir = Vec2::from_angle(world.ego.pose.heading + k as f64 * step);
            let hit = obbs
                .iter()
                .filter_map(|o| ray_obb(origin, dir, o))
                .fold(f64::INFINITY, f64::min);
            if hit >= cap {
                return cap;
            }
            let r = match &noise {
                Some(n) => hit + n.sample(rng),
                None => hit,
            };
            r.clamp(1e-3, cap)
        })
        .collect()
}
