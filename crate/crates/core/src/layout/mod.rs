//! The space-time placement substrate: occupancy tracking and first-fit
//! queries, schedules with their validation and metrics, and rendering.
//!
//! Time is the horizontal axis and wires the vertical one. A schedule's
//! bounding box is `T` (latest end) by `S` (highest wire used).

pub mod occupancy;
pub mod render;
pub mod schedule;

pub use occupancy::{CapacityError, Occupancy, Rect, WireRange};
pub use render::{render, render_ascii, render_svg, RenderFormat};
pub use schedule::{metrics, validate_schedule, Metrics, Placement, PlacementId, PlacementTag, Schedule, Violation};
