//! Fock-state capability benchmarking for non-ideal single-photon sources.
//!
//! The capability of a source is the largest n for which n copies of its
//! measured photon-number statistics, conditionally bunched into a single
//! output mode of a balanced n-port network, still reproduce the
//! negative-region structure of the ideal Fock state |n⟩'s Wigner
//! function. The bunching stage is computational: only photon-number
//! distributions enter, so the whole pipeline is Fock-diagonal.
//!
//! Conventions, used everywhere:
//!
//! * quadratures are scaled so the vacuum has variance 1;
//! * Wigner values are reported as 2π·W, so 2π·W(0,0) = Σ (−1)^m p_m;
//! * attenuation η is the transmissivity of a binomial loss channel.
//!
//! The crate is organized along the pipeline: [`photon_stats`] holds the
//! distributions and their transforms, [`bunching`] merges n inputs into
//! one output mode (oracle and fast backends), [`wigner`] builds radial
//! Wigner functions and counts their negative regions, [`capability`]
//! orchestrates dataset partitioning and the search over n, and
//! [`tomography`] reconstructs distributions from homodyne samples and
//! synthesizes test data. [`io`] and [`report`] define the file formats
//! and byte-deterministic report serialization used by the CLI.
//!
//! All randomness is ChaCha8 from caller-supplied 64-bit seeds, and
//! parallel reductions use fixed chunking, so identical inputs produce
//! identical outputs regardless of thread count.

pub mod bunching;
pub mod capability;
pub mod error;
pub mod fixtures;
pub mod io;
mod numeric;
pub mod photon_stats;
pub mod report;
pub mod tomography;
pub mod wigner;

pub use bunching::{
    bunching_weight, merge_bruteforce, merge_bruteforce_with_budget, merge_convolution,
    BunchingResult, DEFAULT_TERM_BUDGET,
};
pub use capability::{
    averaged_merge, capability, capability_simplified, loss_depth_sweep, partition_dataset,
    synthetic_runs, CapabilityReport, DataSet, SweepSource,
};
pub use error::{Error, Result};
pub use photon_stats::{total_variation, PhotonNumberDistribution, SourceSummary};
pub use tomography::{
    fock_quadrature_likelihood, heralded_source_model, reconstruct_em, smeared_likelihoods,
    synthesize_quadratures, QuadratureDataset, Reconstruction,
};
pub use wigner::{
    capability_test, fit_attenuated_fock, ideal_region_count, negative_regions, radial_wigner,
    AttenuationFit, NegativeRegionStructure, RadialWignerPolynomial,
};
