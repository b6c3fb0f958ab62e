use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Closed set of object classes an actor can have, either as its true class
/// or as the class it presents to perception.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActorClass {
    Car,
    EmergencyVehicle,
    Cyclist,
    Pedestrian,
    ChildPedestrian,
    Animal,
    Ball,
    Luggage,
    ShoppingCart,
    Barrel,
    CarDoor,
    Billboard,
    StopSign,
    YieldSign,
    TrafficLight,
    ParkingSign,
    TurnSign,
    StaticObstacle,
}

/// Coarse families used by the severity hierarchy and the occupancy raster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassGroup {
    Human,
    Vehicle,
    /// Cyclists and animals: vulnerable but not pedestrians.
    Vulnerable,
    /// Vehicle parts such as an opening door.
    VehiclePart,
    Prop,
    Sign,
}

impl ActorClass {
    pub const ALL: [ActorClass; 18] = [
        ActorClass::Car,
        ActorClass::EmergencyVehicle,
        ActorClass::Cyclist,
        ActorClass::Pedestrian,
        ActorClass::ChildPedestrian,
        ActorClass::Animal,
        ActorClass::Ball,
        ActorClass::Luggage,
        ActorClass::ShoppingCart,
        ActorClass::Barrel,
        ActorClass::CarDoor,
        ActorClass::Billboard,
        ActorClass::StopSign,
        ActorClass::YieldSign,
        ActorClass::TrafficLight,
        ActorClass::ParkingSign,
        ActorClass::TurnSign,
        ActorClass::StaticObstacle,
    ];

    pub fn group(self) -> ClassGroup {
        use ActorClass::*;
        match self {
            Pedestrian | ChildPedestrian => ClassGroup::Human,
            Car | EmergencyVehicle => ClassGroup::Vehicle,
            Cyclist | Animal => ClassGroup::Vulnerable,
            CarDoor => ClassGroup::VehiclePart,
            Ball | Luggage | ShoppingCart | Barrel | StaticObstacle => ClassGroup::Prop,
            Billboard | StopSign | YieldSign | TrafficLight | ParkingSign | TurnSign => {
                ClassGroup::Sign
            }
        }
    }

    /// Classes whose perceived class may differ from the true one.
    pub fn allows_apparent_mismatch(self) -> bool {
        matches!(
            self.group(),
            ClassGroup::Sign | ClassGroup::Prop
        ) || self == ActorClass::Pedestrian
    }

    /// Vertical extent of the body above its base, metres.
    pub fn body_height(self) -> f64 {
        use ActorClass::*;
        match self {
            Car => 1.5,
            EmergencyVehicle => 2.6,
            Cyclist => 1.8,
            Pedestrian => 1.75,
            ChildPedestrian => 1.2,
            Animal => 0.8,
            Ball => 0.22,
            Luggage => 0.4,
            ShoppingCart => 1.0,
            Barrel => 0.9,
            CarDoor => 1.1,
            Billboard => 4.0,
            StopSign | YieldSign | TrafficLight | ParkingSign | TurnSign => 2.5,
            StaticObstacle => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        use ActorClass::*;
        match self {
            Car => "car",
            EmergencyVehicle => "emergency_vehicle",
            Cyclist => "cyclist",
            Pedestrian => "pedestrian",
            ChildPedestrian => "child_pedestrian",
            Animal => "animal",
            Ball => "ball",
            Luggage => "luggage",
            ShoppingCart => "shopping_cart",
            Barrel => "barrel",
            CarDoor => "car_door",
            Billboard => "billboard",
            StopSign => "stop_sign",
            YieldSign => "yield_sign",
            TrafficLight => "traffic_light",
            ParkingSign => "parking_sign",
            TurnSign => "turn_sign",
            StaticObstacle => "static_obstacle",
        }
    }
}

impl fmt::Display for ActorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ActorClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ActorClass::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown actor class `{s}`"))
    }
}

/// Default severity weight per class.
pub fn default_weight(class: ActorClass) -> f64 {
    use ActorClass::*;
    match class {
        ChildPedestrian | Pedestrian => 10.0,
        Cyclist => 8.0,
        Animal => 6.0,
        Car | EmergencyVehicle => 5.0,
        CarDoor => 3.0,
        Ball | Luggage | ShoppingCart | Barrel | StaticObstacle => 2.0,
        Billboard | StopSign | YieldSign | TrafficLight | ParkingSign | TurnSign => 0.5,
    }
}

pub fn default_weight_table() -> BTreeMap<ActorClass, f64> {
    ActorClass::ALL
        .into_iter()
        .map(|c| (c, default_weight(c)))
        .collect()
}
