//! Intrinsic dimension of finite geometric data sets.
//!
//! A geometric data set is a finite point set with a family of real-valued
//! features and a fully supported probability measure. Its observable
//! diameter at level `alpha` is the largest width any feature's value
//! distribution keeps after discarding mass `alpha`; integrating that profile
//! (clipped at 1) over `alpha` gives Δ, and the intrinsic dimension is `1/Δ²`.
//!
//! Two pipelines are provided:
//!
//! - [`metric`]: point clouds with distance features `x -> d(x, y)`, swept
//!   with per-feature minimal-diameter tables in `O(n³)`.
//! - [`fca`]: formal contexts with concept-indicator features, evaluated in
//!   exact rational arithmetic from a streamed concept enumeration.
//!
//! The measure-level primitives live in [`measure`] and [`profile`], with
//! brute-force references in [`oracle`]. Per-feature sweeps run on rayon
//! when the `parallel` feature is on (the default); see [`Exec`].

pub mod cli;
pub mod error;
pub mod exec;
pub mod fca;
pub mod io;
pub mod measure;
pub mod metric;
pub mod oracle;
pub mod profile;
pub mod report;

pub use error::{Error, Result};
pub use exec::Exec;
pub use measure::{
    levy_defect, observable_diameter, partial_diameter, pushforward, scale, GeometricDataSet, PointMeasure,
    WeightedValueDistribution,
};
pub use metric::{MetricKind, PointCloud};
pub use profile::{delta, intrinsic_dimension, profile, ObsDiamProfile};
pub use report::{ChavezId, DimensionReport, ExactDimension};
