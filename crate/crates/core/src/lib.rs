//! Planar pursuer–evader interception: point-mass dynamics, proportional and
//! feedback-linearizing guidance laws, a fixed-step engagement simulator and
//! a seeded Monte Carlo campaign runner.

// `!(x > 0.0)` checks are written that way so NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dynamics;
pub mod error;
pub mod guidance;
pub mod monte_carlo;
pub mod output;
pub mod runner;
pub mod sim;

pub use dynamics::{
    drag, evader_normal_accel, EngagementModel, EngagementState, EvasionDirection, EvasionSpec,
    PhysicsConstants, VehicleParams, VehicleState,
};
pub use error::{Error, Result};
pub use guidance::{GuidanceCommand, GuidanceLaw, GuidanceSpec, MembershipParams};
pub use sim::{simulate, simulate_result, Scenario, Termination, Trajectory, TrialResult};
