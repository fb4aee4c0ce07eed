//! Probability models on ranked tree shapes and genealogies.

pub mod beta_split;
pub mod clt;
pub mod coalescent;
pub mod kingman;

pub use beta_split::{blum_francois_ln_pmf, blum_francois_pmf, sample_blum_francois, yule_pmf, BetaSplit};
pub use clt::{clt_standardize, clt_standardize_against, CltResult, Covariance};
pub use coalescent::{sample_coalescent_genealogy, sample_coalescent_times, PopSize};
pub use kingman::{kingman_cov, kingman_mean_entry, kingman_var, KingmanMoments};
