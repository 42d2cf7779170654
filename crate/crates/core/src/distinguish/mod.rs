//! Trace distance, Helstrom measurement, diamond distance and the
//! acceptance bounds of the two protocols.

pub mod bounds;
pub mod diamond;
pub mod helstrom;
pub mod instance;

pub use bounds::{qcd_bounds, qcd_bounds_at, qsd_bounds, qsd_bounds_at, BoundReport};
pub use diamond::{diamond_distance, distinguishability, unitary_diamond_distance, DiamondEstimate};
pub use helstrom::{helstrom_povm, helstrom_success, trace_distance};
pub use instance::{Instance, Label, QcdInstance, QsdInstance};
