//! Learning stratified mixtures of immersed manifolds from point samples.
//!
//! The crate recovers, from an unlabeled i.i.d. sample drawn on a union of
//! manifolds of possibly different dimensions, the number of layers, their
//! dimensions, a dimension-wise clustering of the points, piecewise-linear
//! reconstructions of each layer and tangent estimates. Detection works by
//! counting sample points inside *slabs*: thin neighbourhoods of the flat
//! spanned by a `(d+1)`-tuple of nearby points.
//!
//! Module map:
//!
//! - [`geometry`]: subspaces, principal angles, slabs, enclosing balls,
//!   distances to simplices, Hausdorff distances between finite sets.
//! - [`spatial`]: uniform grid index for radius queries.
//! - [`params`]: per-dimension parameter schedules.
//! - [`stratify`]: the co-detection / pruning algorithm itself.
//! - [`samplers`]: synthetic manifolds with analytic ground truth.
//! - [`metrics`]: estimators and evaluation losses.
//! - [`io`], [`experiment`], [`cli`]: file formats, sweeps and the command line.
//! - `oracle` (feature `oracle`): brute-force references used by tests.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod io;
pub mod metrics;
pub mod params;
pub mod points;
pub mod samplers;
pub mod spatial;
pub mod stratify;

#[cfg(any(test, feature = "oracle"))]
pub mod oracle;

mod linalg;

pub use error::{Error, Result};
pub use geometry::{SimplexTuple, Slab, Subspace};
pub use params::{ModelConstants, ParamSchedule, ScheduleOverrides};
pub use points::PointSet;
pub use samplers::{ManifoldKind, ManifoldSpec, PointCloud};
pub use stratify::{run, LayerDetection, RunOptions, StratificationResult, TupleList};
