//! Monochromatic edge counts of uniformly colored simple graphs.
//!
//! Color every vertex of a simple graph with `m` edges independently and
//! uniformly with one of `c` colors and let `Y` count the edges whose
//! endpoints agree. This crate computes the law of `Y` exactly (by
//! enumeration and convolution over components) or by Monte Carlo,
//! measures its Wasserstein-1 distance to the normal law after
//! standardization and its total variation distance to `Poisson(m/c)`, and
//! compares both to closed-form, graph-independent error bounds.

pub mod bounds;
pub mod coloring;
pub mod error;
pub mod exact;
pub mod graph;
pub mod metrics;
pub mod numeric;
pub mod rng;
pub mod verify;

pub use bounds::{poisson_tv_bound, remark_rate, wasserstein_bound, BoundReport};
pub use coloring::{monochromatic_count, sample_coloring, simulate, standardize, ColoringConfig, SampleSummary};
pub use error::{Error, Result};
pub use exact::{exact_pmf, DiscreteDistribution, RealDistribution};
pub use graph::{generate, EdgeStats, Family, Graph};
pub use metrics::{empirical_wasserstein, tv_to_poisson, wasserstein_to_normal};
pub use verify::{verify_graph, Method, VerificationReport, VerifyOptions};
