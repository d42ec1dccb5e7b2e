//! Photon-number distributions and the statistics derived from them.
//!
//! A [`PhotonNumberDistribution`] is a dense probability vector indexed by
//! photon number m = 0..=cutoff. All downstream stages (bunching, Wigner
//! analysis, capability) consume these vectors; phases never enter, so the
//! whole pipeline is Fock-diagonal by construction.

use crate::error::{Error, Result};
use crate::numeric::{binomial_kernel, KahanSum};

/// Tolerance for accepting a probability vector as normalized.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Probability distribution over photon number m = 0..=cutoff.
///
/// Entries are non-negative; trailing exact zeros are permitted and the
/// cutoff is always the index of the last stored entry.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonNumberDistribution {
    probs: Vec<f64>,
}

impl PhotonNumberDistribution {
    /// Builds a distribution from raw entries, validating non-negativity.
    /// The entries need not sum to one; see [`Self::normalize`].
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        for (index, &value) in probs.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::NegativeProbability { index, value });
            }
        }
        Ok(Self { probs })
    }

    /// The pure Fock state |n⟩ as a distribution.
    pub fn pure_fock(n: usize) -> Self {
        let mut probs = vec![0.0; n + 1];
        probs[n] = 1.0;
        Self { probs }
    }

    pub fn vacuum() -> Self {
        Self::pure_fock(0)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Probability of exactly `m` photons (zero beyond the cutoff).
    pub fn prob(&self, m: usize) -> f64 {
        self.probs.get(m).copied().unwrap_or(0.0)
    }

    /// Index of the last stored entry.
    pub fn cutoff(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn sum(&self) -> f64 {
        let mut acc = KahanSum::new();
        for &p in &self.probs {
            acc.add(p);
        }
        acc.value()
    }

    pub fn is_normalized(&self) -> bool {
        (self.sum() - 1.0).abs() <= NORMALIZATION_TOL
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        let sum = self.sum();
        if (sum - 1.0).abs() <= NORMALIZATION_TOL {
            Ok(())
        } else {
            Err(Error::NotNormalized { sum })
        }
    }

    /// Rescales the entries to sum to one.
    pub fn normalize(&self) -> Result<Self> {
        let sum = self.sum();
        if sum <= 0.0 {
            return Err(Error::DegenerateDistribution);
        }
        let probs = self.probs.iter().map(|p| p / sum).collect();
        Ok(Self { probs })
    }

    /// Mean photon number Σ m p_m.
    pub fn mean(&self) -> f64 {
        let mut acc = KahanSum::new();
        for (m, &p) in self.probs.iter().enumerate() {
            acc.add(m as f64 * p);
        }
        acc.value()
    }

    /// Second-order autocorrelation at zero delay,
    /// g²(0) = Σ m(m−1) p_m / (Σ m p_m)².
    pub fn g2_zero(&self) -> Result<f64> {
        let mean = self.mean();
        if mean <= 0.0 {
            return Err(Error::VacuumOnlyState);
        }
        let mut num = KahanSum::new();
        for (m, &p) in self.probs.iter().enumerate() {
            num.add((m * m.saturating_sub(1)) as f64 * p);
        }
        Ok(num.value() / (mean * mean))
    }

    /// Pushes the distribution through a loss channel of transmissivity
    /// `eta`: p'_k = Σ_{m≥k} p_m C(m,k) η^k (1−η)^{m−k}.
    ///
    /// The cutoff never increases. The mean scales exactly by η and g²(0)
    /// is invariant under the map.
    pub fn apply_loss(&self, eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::EtaOutOfRange(eta));
        }
        self.require_normalized()?;
        if eta == 1.0 {
            return Ok(self.clone());
        }
        let mut out = vec![KahanSum::new(); self.probs.len()];
        for (m, &pm) in self.probs.iter().enumerate() {
            if pm == 0.0 {
                continue;
            }
            for (k, &w) in binomial_kernel(m, eta).iter().enumerate() {
                out[k].add(pm * w);
            }
        }
        Ok(Self {
            probs: out.iter().map(KahanSum::value).collect(),
        })
    }

    /// Drops all multi-photon content (m ≥ 2) and renormalizes over
    /// {p0, p1}. Exactly idempotent: a distribution that already has no
    /// entries beyond m = 1 passes through unchanged.
    pub fn truncate_multiphoton(&self) -> Result<Self> {
        self.require_normalized()?;
        if self.cutoff() <= 1 {
            return Ok(self.clone());
        }
        let p0 = self.prob(0);
        let p1 = self.prob(1);
        let sum = p0 + p1;
        if sum <= 0.0 {
            return Err(Error::EmptyTruncation);
        }
        Ok(Self {
            probs: vec![p0 / sum, p1 / sum],
        })
    }

    /// 2π·W(0,0) = Σ (−1)^m p_m, the Wigner value at the phase-space
    /// origin in the convention fixed by the radial Wigner module.
    pub fn origin_negativity(&self) -> f64 {
        let mut acc = KahanSum::new();
        for (m, &p) in self.probs.iter().enumerate() {
            acc.add(if m % 2 == 0 { p } else { -p });
        }
        acc.value()
    }

    /// Extends the vector with trailing zeros up to `cutoff`.
    pub fn padded_to(&self, cutoff: usize) -> Self {
        let mut probs = self.probs.clone();
        probs.resize(cutoff.max(self.cutoff()) + 1, 0.0);
        Self { probs }
    }
}

/// Headline statistics of a single-photon source.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSummary {
    /// Single-photon component P1.
    pub p1: f64,
    /// Probability of two or more photons, P2+.
    pub p2plus: f64,
    /// Second-order autocorrelation g²(0).
    pub g2: f64,
    /// 2π·W(0,0).
    pub origin_negativity: f64,
}

impl SourceSummary {
    /// Summarizes a normalized distribution. Fails for vacuum-only states,
    /// where g²(0) is undefined.
    pub fn from_distribution(d: &PhotonNumberDistribution) -> Result<Self> {
        d.require_normalized()?;
        let p2plus: f64 = d.probs().iter().skip(2).sum();
        Ok(Self {
            p1: d.prob(1),
            p2plus,
            g2: d.g2_zero()?,
            origin_negativity: d.origin_negativity(),
        })
    }
}

/// Total-variation distance ½ Σ |p_m − q_m| between two distributions,
/// padding the shorter with zeros.
pub fn total_variation(a: &PhotonNumberDistribution, b: &PhotonNumberDistribution) -> f64 {
    let len = a.probs.len().max(b.probs.len());
    let mut acc = KahanSum::new();
    for m in 0..len {
        acc.add((a.prob(m) - b.prob(m)).abs());
    }
    0.5 * acc.value()
}
