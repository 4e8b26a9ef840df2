//! Area angle monitoring for DC power networks.
//!
//! The area angle combines the voltage angles at an area's border buses into
//! one number that tracks stress across the area. This crate builds the
//! Kron-reduced border equivalent of an area, computes its susceptance,
//! weights, angle and power, scans single line outages inside the area and
//! rates each outage by the largest transfer the area can carry before an
//! internal line limit binds.

// index loops mirror the matrix algebra; `!(x > tol)` also rejects NaN
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dcflow;
pub mod error;
pub mod fixtures;
pub mod generate;
pub mod graph;
pub mod model;
pub mod outage;
pub mod reduction;
pub mod report;
pub mod severity;
pub mod sparse;

pub use error::{Error, Result};
pub use model::{AreaPartition, AreaSpec, Bus, BusId, Line, LineId, Network};
