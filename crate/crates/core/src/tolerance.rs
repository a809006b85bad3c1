//! Numeric tolerances shared by the geometric and metric code paths.

/// Coordinate agreement for exact affine paths (dyadic coordinates).
pub const COORD: f64 = 1e-12;

/// Containment slack when snapping boxes and points into a chart.
pub const SNAP: f64 = 1e-9;

/// Relative tolerance for metric comparisons that are not exact.
pub const METRIC_REL: f64 = 1e-9;

/// Relative tolerance for approximate (net-based) metric estimates.
pub const NET_REL: f64 = 0.02;
