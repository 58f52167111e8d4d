//! Planar contact-simulation library for haptic-only maze exploration.
//!
//! A virtual end-effector (a disc-shaped peg on a point mass) is driven by a
//! Cartesian impedance controller whose stiffness/damping ellipsoids can
//! re-orient toward the motion direction, while an interaction planner with
//! Exploration, Bouncing, and Error states generates desired-pose increments
//! from sensed contact forces alone. Rigid mazes built from line segments
//! and arcs supply penalty-based contact forces.

pub mod compare;
pub mod impedance;
pub mod math;
pub mod maze;
pub mod output;
pub mod planner;
pub mod scenario;
pub mod sim;

pub use impedance::{ImpedanceProfile, ProfileMode};
pub use math::{StiffnessParams, Vec3};
pub use maze::{load_maze, Maze};
pub use planner::{Mode, PlannerConfig, PlannerState};
pub use scenario::{load_scenario, Scenario};
pub use sim::{run, Metrics, Outcome, SimConfig, TrajectoryLog};
