//! Operational planning for offshore multi-carrier energy systems.
//!
//! The library models a platform's energy system (wells, separation,
//! compression, gas turbines, wind, storage, hydrogen) as a network of
//! devices exchanging flows of six carriers, assembles a mixed-integer
//! linear program for a planning window, and simulates operation by
//! re-solving that program on a rolling horizon while committing the
//! first steps of each plan.
//!
//! Modules follow the pipeline order: [`model`] holds the validated
//! system description, [`devices`] and [`network`] emit per-element
//! constraints, [`assembly`] builds the window problem, [`solver`]
//! wraps the MILP backend, [`sim`] rolls the horizon, and [`kpi`]
//! reduces committed trajectories to reported quantities.

pub mod assembly;
pub mod devices;
pub mod kpi;
pub mod lp;
pub mod model;
pub mod network;
pub mod sim;
pub mod solver;
