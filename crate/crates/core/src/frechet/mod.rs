//! Fréchet means and variances of ranked tree shapes and genealogies.

pub mod anneal;
pub mod genealogy;
pub mod landscape;
pub mod mean;
pub mod proposal;
pub mod target;
pub mod variance;

pub use anneal::{anneal, CoolingSchedule, Landscape, SaConfig, SaResult, ScheduleKind, TraceRow};
pub use genealogy::{
    frechet_mean_genealogy, frechet_mean_hetero, hetero_landscape, hetero_topology, SearchMethod, TimeSummary,
};
pub use landscape::{HeteroLandscape, HeteroState, IsoLandscape, IsoState};
pub use mean::{frechet_mean_exact, frechet_mean_exact_by, frechet_mean_sa, ExactMean};
pub use proposal::{hetero_kernel, iso_kernel, propose_hetero, propose_iso};
pub use target::{Objective, TargetMatrix};
pub use variance::{frechet_variance, medoid, medoid_by};
