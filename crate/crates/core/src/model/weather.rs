use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The nine named weather presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeatherPresetId {
    ClearNoon,
    CloudyNoon,
    WetNoon,
    HardRainNoon,
    ClearSunset,
    WetSunset,
    HardRainSunset,
    ClearNight,
    FogMorning,
}

/// Constant environment for one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeatherPreset {
    pub id: WeatherPresetId,
    /// Tyre-road friction coefficient.
    pub friction_mu: f64,
    /// Metres beyond which nothing is sensed.
    pub visibility_range: f64,
    /// Standard deviation of lidar range noise, metres.
    pub lidar_noise_sigma: f64,
}

const PRESETS: [WeatherPreset; 9] = [
    preset(WeatherPresetId::ClearNoon, 0.9, 120.0, 0.02),
    preset(WeatherPresetId::CloudyNoon, 0.9, 100.0, 0.02),
    preset(WeatherPresetId::WetNoon, 0.7, 90.0, 0.04),
    preset(WeatherPresetId::HardRainNoon, 0.5, 50.0, 0.08),
    preset(WeatherPresetId::ClearSunset, 0.9, 80.0, 0.03),
    preset(WeatherPresetId::WetSunset, 0.7, 60.0, 0.05),
    preset(WeatherPresetId::HardRainSunset, 0.5, 40.0, 0.09),
    preset(WeatherPresetId::ClearNight, 0.9, 35.0, 0.03),
    preset(WeatherPresetId::FogMorning, 0.7, 20.0, 0.10),
];

const fn preset(id: WeatherPresetId, mu: f64, vis: f64, sigma: f64) -> WeatherPreset {
    WeatherPreset {
        id,
        friction_mu: mu,
        visibility_range: vis,
        lidar_noise_sigma: sigma,
    }
}

impl WeatherPresetId {
    pub const ALL: [WeatherPresetId; 9] = [
        WeatherPresetId::ClearNoon,
        WeatherPresetId::CloudyNoon,
        WeatherPresetId::WetNoon,
        WeatherPresetId::HardRainNoon,
        WeatherPresetId::ClearSunset,
        WeatherPresetId::WetSunset,
        WeatherPresetId::HardRainSunset,
        WeatherPresetId::ClearNight,
        WeatherPresetId::FogMorning,
    ];

    pub fn preset(self) -> WeatherPreset {
        PRESETS[self as usize]
    }

    pub fn as_str(self) -> &'static str {
        match self {
            WeatherPresetId::ClearNoon => "clear-noon",
            WeatherPresetId::CloudyNoon => "cloudy-noon",
            WeatherPresetId::WetNoon => "wet-noon",
            WeatherPresetId::HardRainNoon => "hard-rain-noon",
            WeatherPresetId::ClearSunset => "clear-sunset",
            WeatherPresetId::WetSunset => "wet-sunset",
            WeatherPresetId::HardRainSunset => "hard-rain-sunset",
            WeatherPresetId::ClearNight => "clear-night",
            WeatherPresetId::FogMorning => "fog-morning",
        }
    }
}

pub fn all_presets() -> &'static [WeatherPreset; 9] {
    &PRESETS
}

impl fmt::Display for WeatherPresetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WeatherPresetId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        WeatherPresetId::ALL
            .into_iter()
            .find(|w| w.as_str() == s)
            .ok_or_else(|| format!("unknown weather preset `{s}`"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_presets_indexed_by_id() {
        assert_eq!(all_presets().len(), 9);
        for id in WeatherPresetId::ALL {
            let p = id.preset();
            assert_eq!(p.id, id);
            assert!(p.friction_mu > 0.0 && p.friction_mu <= 1.0);
            assert!(p.visibility_range > 0.0);
            assert_eq!(id.as_str().parse::<WeatherPresetId>().unwrap(), id);
        }
    }

    #[test]
    fn documented_anchor_values() {
        let fog = WeatherPresetId::FogMorning.preset();
        assert_eq!((fog.friction_mu, fog.visibility_range, fog.lidar_noise_sigma), (0.7, 20.0, 0.10));
        let clear = WeatherPresetId::ClearNoon.preset();
        assert_eq!((clear.friction_mu, clear.visibility_range, clear.lidar_noise_sigma), (0.9, 120.0, 0.02));
    }
}
