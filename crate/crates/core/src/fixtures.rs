//! Reference photon statistics of seven heralded single-photon source
//! settings, spanning single-photon components from 0.53 to 0.91.
//!
//! Each record carries the measured single-photon component P1 and
//! multi-photon probability P2+ with their standard deviations, the
//! measured g²(0), and the measured 2π·W(0,0). Only P1 and P2+ are
//! published per set, so completing a record into a distribution places
//! the whole multi-photon mass at m = 2 — the minimal-assumption
//! completion — with P0 = 1 − P1 − P2+. Tests that depend on the m ≥ 3
//! split must treat it as unknown.

use crate::photon_stats::PhotonNumberDistribution;

/// Summary statistics of one source setting.
#[derive(Debug, Clone, Copy)]
pub struct SourceRecord {
    pub p1: f64,
    pub p1_sigma: f64,
    pub p2plus: f64,
    pub p2plus_sigma: f64,
    pub g2: f64,
    pub g2_sigma: f64,
    /// Measured Wigner value 2π·W(0,0).
    pub origin_w: f64,
    pub origin_w_sigma: f64,
}

impl SourceRecord {
    /// The m = 2 completion: {1 − P1 − P2+, P1, P2+}.
    pub fn completed_distribution(&self) -> PhotonNumberDistribution {
        PhotonNumberDistribution::new(vec![1.0 - self.p1 - self.p2plus, self.p1, self.p2plus])
            .expect("record probabilities are valid")
    }

    /// Jitter scales for synthetic run generation: the published standard
    /// deviations of (P0, P1, P2+), with σ_P0 inferred from the other two.
    pub fn sigmas(&self) -> [f64; 3] {
        [
            (self.p1_sigma.powi(2) + self.p2plus_sigma.powi(2)).sqrt(),
            self.p1_sigma,
            self.p2plus_sigma,
        ]
    }
}

/// The seven reference settings, ordered by increasing P1.
pub const HERALDED_SETS: [SourceRecord; 7] = [
    SourceRecord {
        p1: 0.53,
        p1_sigma: 0.01,
        p2plus: 0.010,
        p2plus_sigma: 0.006,
        g2: 0.07,
        g2_sigma: 0.05,
        origin_w: -0.05,
        origin_w_sigma: 0.02,
    },
    SourceRecord {
        p1: 0.62,
        p1_sigma: 0.02,
        p2plus: 0.013,
        p2plus_sigma: 0.008,
        g2: 0.07,
        g2_sigma: 0.04,
        origin_w: -0.23,
        origin_w_sigma: 0.03,
    },
    SourceRecord {
        p1: 0.74,
        p1_sigma: 0.01,
        p2plus: 0.016,
        p2plus_sigma: 0.008,
        g2: 0.06,
        g2_sigma: 0.03,
        origin_w: -0.47,
        origin_w_sigma: 0.02,
    },
    SourceRecord {
        p1: 0.72,
        p1_sigma: 0.01,
        p2plus: 0.05,
        p2plus_sigma: 0.01,
        g2: 0.2,
        g2_sigma: 0.04,
        origin_w: -0.45,
        origin_w_sigma: 0.02,
    },
    SourceRecord {
        p1: 0.83,
        p1_sigma: 0.01,
        p2plus: 0.07,
        p2plus_sigma: 0.01,
        g2: 0.2,
        g2_sigma: 0.03,
        origin_w: -0.67,
        origin_w_sigma: 0.02,
    },
    SourceRecord {
        p1: 0.86,
        p1_sigma: 0.01,
        p2plus: 0.02,
        p2plus_sigma: 0.01,
        g2: 0.05,
        g2_sigma: 0.03,
        origin_w: -0.73,
        origin_w_sigma: 0.02,
    },
    SourceRecord {
        p1: 0.91,
        p1_sigma: 0.01,
        p2plus: 0.02,
        p2plus_sigma: 0.01,
        g2: 0.05,
        g2_sigma: 0.02,
        origin_w: -0.82,
        origin_w_sigma: 0.02,
    },
];

/// The highest-purity setting (P1 = 0.91, P2+ = 0.02).
pub fn best_set() -> &'static SourceRecord {
    &HERALDED_SETS[6]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn completions_are_normalized_distributions() {
        for record in &HERALDED_SETS {
            let d = record.completed_distribution();
            assert!(d.is_normalized());
            assert_eq!(d.cutoff(), 2);
            assert!(record.p1 + record.p2plus <= 1.0);
        }
    }

    #[test]
    fn best_set_is_highest_purity() {
        let best = best_set();
        assert_eq!(best.p1, 0.91);
        assert!(HERALDED_SETS.iter().all(|r| r.p1 <= best.p1));
    }
}
