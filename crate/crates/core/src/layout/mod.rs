//! Hardware mapping: coupling graphs, VF2 layouts, detection-aware routing
//! and ASAP scheduling.

pub mod graph;
pub mod route;
pub mod schedule;
pub mod vf2;

pub use graph::{layout_score, CouplingGraph, GraphError, Layout};
pub use route::{route, RouteError, RoutedCircuit};
pub use schedule::{schedule, Schedule};
pub use vf2::{fallback_layout, vf2_layouts, InsufficientQubits};
