//! Cellular Markov subdivision rules and the combinatorial dynamics of their
//! iterated cell decompositions.
//!
//! The crate is organised bottom-up:
//!
//! * [`complex`]: finite cell complexes as face posets;
//! * [`rule`]: subdivision rules `(D0, D1, parent, f)` and their multiplicities;
//! * [`tower`]: the sequence `D_m` in pair encoding, with flowers, separation
//!   levels and joining numbers;
//! * [`realization`] and [`geometry`]: flat models giving boxes, diameters
//!   and distances;
//! * [`visual`] and [`diagnostics`]: visual metrics and the quasisymmetry,
//!   BQS and CXC estimates;
//! * [`builtin`]: torus doubling, the pillowcase Lattès map and the identity;
//! * [`report`]: deterministic JSON bundles, CSV tables and DOT graphs.

pub mod builtin;
pub mod complex;
pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod json;
pub mod realization;
pub mod report;
pub mod rule;
pub mod tolerance;
pub mod tower;
pub mod visual;

pub use builtin::{Example, ExampleSpec};
pub use complex::{CellComplex, CellId, CellSet, ValidationReport};
pub use error::{Error, Result};
pub use realization::{AffineBranch, Cuboid, Model, Realization};
pub use rule::SubdivisionRule;
pub use tower::separation::{PointAddress, Separation};
pub use tower::{LevelCell, Tower, TowerLimits};
pub use visual::{VisualMetricConfig, VisualMetricReport};
