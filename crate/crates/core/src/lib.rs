//! Steady-state simulation and design optimization of looped water
//! distribution networks.
//!
//! The library is organized around four stages:
//!
//! * [`network`] — the validated network data model plus its incidence
//!   structures (junction incidence matrix and a loop basis with
//!   pseudo-loops between fixed-head nodes).
//! * [`hydraulics`] — friction models, residual assembly for mass and
//!   loop-energy conservation, and the damped-Newton flow solver.
//! * [`costing`] — pump energy NPV, tank material and wind-loaded
//!   foundation costs, pipeline cost polynomial, total cost roll-up.
//! * [`design`] — the tank design optimizer (water depth and elevation
//!   above ground per tank) under node-pressure constraints, with the
//!   flow solver nested inside each evaluation.

pub mod costing;
pub mod design;
pub mod error;
pub mod hydraulics;
pub mod network;

pub use costing::{CostBreakdown, EconomicParams, FoundationParams, WindParams};
pub use design::{DesignBounds, DesignOptions, DesignSolution, DesignVariables, TankDesign};
pub use error::{BuildError, DesignError, SolveError};
pub use hydraulics::{FlowSolution, SolverOptions};
pub use network::{HeadlossModel, LoopSet, Network, NetworkSpec};

/// Standard gravity, m/s².
pub const GRAVITY: f64 = 9.80665;

/// Specific weight of water, N/m³.
pub const SPECIFIC_WEIGHT_WATER: f64 = 9810.0;
