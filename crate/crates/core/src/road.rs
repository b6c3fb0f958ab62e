//! Lane queries over a `RoadMap`.

use crate::geometry::{
    polyline_length, polyline_point_at, project_onto_polyline, wrap_angle, Pose2D,
    PolylineProjection, Vec2,
};
use crate::model::{Lane, LaneDirection, RoadMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A lane oriented in one permitted travel direction, with a projection.
#[derive(Debug, Clone)]
pub struct LaneMatch<'a> {
    pub lane: &'a Lane,
    /// Centerline in travel order.
    pub path: Vec<Vec2>,
    pub projection: PolylineProjection,
}

impl LaneMatch<'_> {
    pub fn length(&self) -> f64 {
        polyline_length(&self.path)
    }
}

/// Travel-ordered centerlines the lane permits.
pub fn travel_paths(lane: &Lane) -> Vec<Vec<Vec2>> {
    let fwd = lane.centerline.clone();
    let mut back = lane.centerline.clone();
    back.reverse();
    match lane.direction {
        LaneDirection::Forward => vec![fwd],
        LaneDirection::Backward => vec![back],
        LaneDirection::Both => vec![fwd, back],
    }
}

fn aligned_match<'a>(lane: &'a Lane, pose: &Pose2D, min_cos: f64) -> Option<LaneMatch<'a>> {
    let h = Vec2::from_angle(pose.heading);
    travel_paths(lane)
        .into_iter()
        .filter_map(|path| {
            let proj = project_onto_polyline(&path, pose.position())?;
            (proj.tangent.dot(h) > min_cos).then_some(LaneMatch {
                lane,
                path,
                projection: proj,
            })
        })
        .next()
}

/// Lane under `pose` whose permitted direction agrees with its heading.
pub fn current_lane<'a>(map: &'a RoadMap, pose: &Pose2D) -> Option<LaneMatch<'a>> {
    map.lanes
        .iter()
        .filter_map(|lane| aligned_match(lane, pose, 0.0))
        .filter(|m| m.projection.offset.abs() <= 0.5 * m.lane.width + 0.5)
        .min_by(|a, b| {
            a.projection
                .offset
                .abs()
                .total_cmp(&b.projection.offset.abs())
                .then_with(|| a.lane.id.cmp(&b.lane.id))
        })
}

/// Lane whose travel path begins where `m` ends and continues its direction.
pub fn successor<'a>(map: &'a RoadMap, m: &LaneMatch<'a>) -> Option<LaneMatch<'a>> {
    let (end, tangent) = polyline_point_at(&m.path, m.length())?;
    map.lanes
        .iter()
        .filter(|l| l.id != m.lane.id)
        .flat_map(|lane| travel_paths(lane).into_iter().map(move |p| (lane, p)))
        .filter_map(|(lane, path)| {
            let start = *path.first()?;
            let (_, t0) = polyline_point_at(&path, 0.0)?;
            (start.distance(end) < 3.0 && t0.dot(tangent) > 0.3).then(|| {
                let projection = project_onto_polyline(&path, start)?;
                Some(LaneMatch { lane, path, projection })
            })?
        })
        .min_by(|a, b| a.lane.id.cmp(&b.lane.id))
}

/// Point `ahead` metres further along the lane, continuing into a successor
/// or straight past the end when there is none.
pub fn lookahead_point(map: &RoadMap, m: &LaneMatch<'_>, ahead: f64) -> Vec2 {
    let target = m.projection.station + ahead;
    let len = m.length();
    if target <= len {
        return polyline_point_at(&m.path, target).map_or(m.projection.point, |(p, _)| p);
    }
    if let Some(next) = successor(map, m) {
        let rest = target - len;
        return polyline_point_at(&next.path, rest).map_or(next.projection.point, |(p, _)| p);
    }
    let (end, tangent) = polyline_point_at(&m.path, len).unwrap_or((m.projection.point, m.projection.tangent));
    end + tangent.scale(target - len)
}

/// Parallel lane beside the ego on `side` travelling the same way.
pub fn side_lane<'a>(map: &'a RoadMap, pose: &Pose2D, current: &LaneMatch<'_>, side: Side) -> Option<LaneMatch<'a>> {
    let w = current.lane.width;
    map.lanes
        .iter()
        .filter(|l| l.id != current.lane.id)
        .filter_map(|lane| aligned_match(lane, pose, 0.7))
        .filter(|m| {
            let local = m.projection.point.to_local(pose.position(), pose.heading);
            let lateral = match side {
                Side::Left => local.y,
                Side::Right => -local.y,
            };
            lateral >= 0.5 * w && lateral <= 1.6 * w && m.projection.station < m.length() - 1.0
        })
        .min_by(|a, b| {
            let da = a.projection.point.distance(pose.position());
            let db = b.projection.point.distance(pose.position());
            da.total_cmp(&db).then_with(|| a.lane.id.cmp(&b.lane.id))
        })
}

/// Lane starting just ahead of the ego that branches off toward `side`.
pub fn junction_branch<'a>(map: &'a RoadMap, pose: &Pose2D, current: &LaneMatch<'_>, side: Side) -> Option<LaneMatch<'a>> {
    map.lanes
        .iter()
        .filter(|l| l.id != current.lane.id)
        .flat_map(|lane| travel_paths(lane).into_iter().map(move |p| (lane, p)))
        .filter_map(|(lane, path)| {
            let start = *path.first()?;
            let (_, t0) = polyline_point_at(&path, 0.0)?;
            let local = start.to_local(pose.position(), pose.heading);
            let turn = wrap_angle(t0.y.atan2(t0.x) - pose.heading);
            let on_side = match side {
                Side::Left => turn > 0.35 && turn < 2.8,
                Side::Right => turn < -0.35 && turn > -2.8,
            };
            let window = local.x >= -2.0 && local.x <= 25.0 && local.y.abs() <= 10.0;
            (on_side && window).then(|| {
                let projection = project_onto_polyline(&path, start)?;
                Some(LaneMatch { lane, path, projection })
            })?
        })
        .min_by(|a, b| {
            let da = a.projection.point.distance(pose.position());
            let db = b.projection.point.distance(pose.position());
            da.total_cmp(&db).then_with(|| a.lane.id.cmp(&b.lane.id))
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lane(id: &str, pts: &[(f64, f64)], dir: LaneDirection) -> Lane {
        Lane {
            id: id.into(),
            centerline: pts.iter().map(|&(x, y)| Vec2::new(x, y)).collect(),
            width: 3.5,
            speed_limit: 10.0,
            direction: dir,
            one_way: dir != LaneDirection::Both,
        }
    }

    fn two_lane() -> RoadMap {
        RoadMap {
            drivable: vec![vec![
                Vec2::new(-10.0, -2.0),
                Vec2::new(100.0, -2.0),
                Vec2::new(100.0, 6.0),
                Vec2::new(-10.0, 6.0),
            ]],
            lanes: vec![
                lane("east", &[(-10.0, 0.0), (100.0, 0.0)], LaneDirection::Forward),
                lane("east-2", &[(-10.0, 3.5), (100.0, 3.5)], LaneDirection::Forward),
            ],
            anchors: Default::default(),
        }
    }

    #[test]
    fn finds_current_and_left_lane() {
        let map = two_lane();
        let pose = Pose2D::new(10.0, 0.2, 0.0);
        let cur = current_lane(&map, &pose).unwrap();
        assert_eq!(cur.lane.id, "east");
        assert_eq!(side_lane(&map, &pose, &cur, Side::Left).unwrap().lane.id, "east-2");
        assert!(side_lane(&map, &pose, &cur, Side::Right).is_none());
    }

    #[test]
    fn heading_against_one_way_lane_is_not_on_it() {
        let map = two_lane();
        assert!(current_lane(&map, &Pose2D::new(10.0, 0.0, std::f64::consts::PI)).is_none());
    }

    #[test]
    fn lookahead_extrapolates_past_end() {
        let map = two_lane();
        let cur = current_lane(&map, &Pose2D::new(95.0, 0.0, 0.0)).unwrap();
        let p = lookahead_point(&map, &cur, 10.0);
        assert!((p.x - 105.0).abs() < 1e-9 && p.y.abs() < 1e-12);
    }

    #[test]
    fn branch_to_the_right() {
        let mut map = two_lane();
        map.lanes.push(lane("south", &[(20.0, -1.0), (20.0, -40.0)], LaneDirection::Forward));
        let pose = Pose2D::new(8.0, 0.0, 0.0);
        let cur = current_lane(&map, &pose).unwrap();
        assert_eq!(junction_branch(&map, &pose, &cur, Side::Right).unwrap().lane.id, "south");
        assert!(junction_branch(&map, &pose, &cur, Side::Left).is_none());
    }
}
