//! Deterministic fixed-timestep simulation core.

pub mod behavior;
pub mod kinematics;
pub mod rng;
pub mod world;

pub use kinematics::{integrate_ballistic, integrate_bicycle, ContinuousControl, KinematicState, DT};
pub use world::{
    apply_action, evaluate_triggers, init_world, step, ActorBody, ActorState, CollisionEvent,
    EventKind, InitError, WorldEvent, WorldState,
};
