use serde::{Deserialize, Serialize};

use super::detect::line_of_sight;
use super::PerceptionConfig;
use crate::engine::kinematics::{EGO_LENGTH, EGO_WIDTH};
use crate::engine::WorldState;
use crate::geometry::{obb_overlap, polygon_contains, Obb, Vec2};
use crate::model::{ClassGroup, RoadMap, WeatherPreset};

/// One-byte cell codes of the occupancy raster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[repr(u8)]
pub enum CellCode {
    Free = 0,
    Road = 1,
    Unknown = 2,
    Ego = 3,
    Human = 4,
    Vehicle = 5,
    Vulnerable = 6,
    VehiclePart = 7,
    Prop = 8,
    Sign = 9,
}

impl CellCode {
    pub fn for_group(g: ClassGroup) -> CellCode {
        match g {
            ClassGroup::Human => CellCode::Human,
            ClassGroup::Vehicle => CellCode::Vehicle,
            ClassGroup::Vulnerable => CellCode::Vulnerable,
            ClassGroup::VehiclePart => CellCode::VehiclePart,
            ClassGroup::Prop => CellCode::Prop,
            ClassGroup::Sign => CellCode::Sign,
        }
    }

    pub fn is_actor(self) -> bool {
        self as u8 >= CellCode::Human as u8
    }
}

/// Ego-centred, heading-aligned grid. Row 0 is the far front, column 0 the
/// far left; cell `(size/2, size/2)` is centred on the ego.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupancyRaster {
    pub size: usize,
    /// Row-major cell codes.
    pub cells: Vec<u8>,
}

impl OccupancyRaster {
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.cells[row * self.size + col]
    }

    /// Ego-frame center of cell `(row, col)`.
    pub fn cell_center(size: usize, cell: f64, row: usize, col: usize) -> Vec2 {
        let half = (size / 2) as f64;
        Vec2::new((half - row as f64) * cell, (half - col as f64) * cell)
    }
}

/// Continuous (row, col) coordinates of an ego-frame point.
fn grid_coords(size: usize, cell: f64, p: Vec2) -> (f64, f64) {
    let half = (size / 2) as f64;
    (half - p.x / cell, half - p.y / cell)
}

fn cell_range(lo: f64, hi: f64, size: usize) -> std::ops::RangeInclusive<usize> {
    let a = (lo - 0.5).floor().max(0.0) as usize;
    let b = (hi + 0.5).ceil().min(size as f64 - 1.0);
    if b < 0.0 || a as f64 > b {
        #[allow(clippy::reversed_empty_ranges)]
        return 1..=0;
    }
    a..=b as usize
}

pub fn render_occupancy(world: &WorldState, map: &RoadMap, weather: &WeatherPreset, cfg: &PerceptionConfig) -> OccupancyRaster {
    let n = cfg.raster_size;
    let cs = cfg.raster_cell;
    let origin = world.ego.pose.position();
    let heading = world.ego.pose.heading;
    let vis = weather.visibility_range;
    let mut cells = vec![CellCode::Free as u8; n * n];

    for r in 0..n {
        for c in 0..n {
            if OccupancyRaster::cell_center(n, cs, r, c).norm() > vis {
                cells[r * n + c] = CellCode::Unknown as u8;
            }
        }
    }

    for poly in &map.drivable {
        let local: Vec<Vec2> = poly.iter().map(|p| p.to_local(origin, heading)).collect();
        let (mut r0, mut r1, mut c0, mut c1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in &local {
            let (r, c) = grid_coords(n, cs, *p);
            r0 = r0.min(r);
            r1 = r1.max(r);
            c0 = c0.min(c);
            c1 = c1.max(c);
        }
        for r in cell_range(r0, r1, n) {
            for c in cell_range(c0, c1, n) {
                let idx = r * n + c;
                if cells[idx] == CellCode::Free as u8
                    && polygon_contains(&local, OccupancyRaster::cell_center(n, cs, r, c))
                {
                    cells[idx] = CellCode::Road as u8;
                }
            }
        }
    }

    let paint = |obb: &Obb, code: CellCode, cells: &mut Vec<u8>| {
        let (mut r0, mut r1, mut c0, mut c1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in obb.corners() {
            let (r, c) = grid_coords(n, cs, p);
            r0 = r0.min(r);
            r1 = r1.max(r);
            c0 = c0.min(c);
            c1 = c1.max(c);
        }
        for r in cell_range(r0, r1, n) {
            for c in cell_range(c0, c1, n) {
                let idx = r * n + c;
                if cells[idx] == CellCode::Unknown as u8 {
                    continue;
                }
                let square = Obb::new(OccupancyRaster::cell_center(n, cs, r, c), 0.5 * cs, 0.5 * cs, 0.0);
                if obb_overlap(&square, obb) {
                    cells[idx] = code as u8;
                }
            }
        }
    };

    for i in world.active_indices() {
        let kin = &world.actors[i].kin;
        if kin.pose.position().distance(origin) > vis || !line_of_sight(world, i) {
            continue;
        }
        let body = &world.bodies[i];
        let local = Obb::new(
            kin.pose.position().to_local(origin, heading),
            0.5 * body.length,
            0.5 * body.width,
            kin.pose.heading - heading,
        );
        paint(&local, CellCode::for_group(body.apparent_class.group()), &mut cells);
    }
    let ego = Obb::new(Vec2::ZERO, 0.5 * EGO_LENGTH, 0.5 * EGO_WIDTH, 0.0);
    paint(&ego, CellCode::Ego, &mut cells);

    OccupancyRaster { size: n, cells }
}
