//! Shared fixtures for the pipeline benchmarks.

use fockcap::PhotonNumberDistribution;

/// High-purity reference statistics used across the benchmarks.
pub fn reference_distribution() -> PhotonNumberDistribution {
    PhotonNumberDistribution::new(vec![0.07, 0.91, 0.02]).expect("valid fixture")
}

/// A wider random-ish mixture for root-finding benchmarks.
pub fn spread_distribution(cutoff: usize) -> PhotonNumberDistribution {
    let probs: Vec<f64> = (0..=cutoff)
        .map(|m| 1.0 / (1.0 + (m as f64 - cutoff as f64 / 3.0).powi(2)))
        .collect();
    PhotonNumberDistribution::new(probs)
        .expect("valid fixture")
        .normalize()
        .expect("positive mass")
}
