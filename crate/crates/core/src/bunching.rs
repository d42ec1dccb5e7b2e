//! Conditional bunching of independent Fock-diagonal inputs through a
//! balanced linear multiport.
//!
//! `n` input statistics are mixed by an n-mode network whose first-row
//! intensities are all 1/n, and the event "all photons exit in mode 1,
//! vacuum elsewhere" is post-selected. For Fock-diagonal inputs only those
//! squared moduli enter, so the network unitary is never materialized: the
//! transition probability for the input tuple (m_1, …, m_n) with
//! M = Σ m_j is the closed form M!/(Π m_j!) · n^(−M).
//!
//! Two backends compute the joint statistics Q_M:
//!
//! * [`merge_bruteforce`] enumerates every occupation tuple — exponential
//!   in n, kept as the oracle;
//! * [`merge_convolution`] uses the generating-function identity
//!   Q_M = M! n^(−M) [z^M] Π_j e_j(z) with e_j(z) = Σ_m p_{j,m} z^m / m!,
//!   which is polynomial in n and in the cutoffs. Probabilities, not
//!   amplitudes, combine here, which is what makes the identity valid for
//!   diagonal inputs.

use crate::error::{Error, Result};
use crate::numeric::{ln_factorial, ln_factorial_table, KahanSum};
use crate::photon_stats::PhotonNumberDistribution;

/// Default cap on the number of tuples the brute-force backend will visit.
pub const DEFAULT_TERM_BUDGET: f64 = 1e8;

/// Relative-error estimate above which a merge result is flagged as having
/// lost precision.
pub const PRECISION_WARN_THRESHOLD: f64 = 1e-8;

/// Joint statistics of the bunching event.
///
/// `unnormalized[M]` is the probability that the inputs carried M photons
/// in total *and* all of them bunched into mode 1; the conditional output
/// state is the normalized version.
#[derive(Debug, Clone)]
pub struct BunchingResult {
    unnormalized: Vec<f64>,
    success_probability: f64,
    output: PhotonNumberDistribution,
    relative_error_estimate: f64,
}

impl BunchingResult {
    /// Unnormalized joint statistics Q_M, indexed by total photon number.
    pub fn q(&self) -> &[f64] {
        &self.unnormalized
    }

    /// Probability Σ_M Q_M of the bunching event.
    pub fn success_probability(&self) -> f64 {
        self.success_probability
    }

    /// Conditional photon-number distribution of the merged output mode.
    /// Its cutoff equals the sum of the input cutoffs.
    pub fn output(&self) -> &PhotonNumberDistribution {
        &self.output
    }

    /// Coarse forward bound on the relative rounding error of the Q values.
    pub fn relative_error_estimate(&self) -> f64 {
        self.relative_error_estimate
    }

    /// True when the error estimate exceeds [`PRECISION_WARN_THRESHOLD`].
    pub fn precision_warning(&self) -> bool {
        self.relative_error_estimate > PRECISION_WARN_THRESHOLD
    }

    fn from_q(q: Vec<f64>, inputs: usize) -> Result<Self> {
        let mut acc = KahanSum::new();
        for &v in &q {
            acc.add(v);
        }
        let success = acc.value();
        debug_assert!(success > 0.0 && success <= 1.0 + 1e-9);
        let output = PhotonNumberDistribution::new(q.clone())?.normalize()?;
        // All accumulation is over non-negative terms with compensation, so
        // the rounding bound is driven by the chain length, not term count.
        let estimate = f64::EPSILON * (inputs + q.len() + 20) as f64;
        Ok(Self {
            unnormalized: q,
            success_probability: success,
            output,
            relative_error_estimate: estimate,
        })
    }
}

/// Probability that the input Fock state |m_1, …, m_n⟩ leaves a balanced
/// n-port with all M = Σ m_j photons in mode 1 and vacuum elsewhere:
/// M!/(Π m_j!) · n^(−M).
///
/// Evaluated in log space so that large M cannot overflow.
pub fn bunching_weight(occupations: &[usize], modes: usize) -> Result<f64> {
    if modes == 0 {
        return Err(Error::InvalidParameter("modes must be >= 1".into()));
    }
    if occupations.len() != modes {
        return Err(Error::ModeCountMismatch {
            got: occupations.len(),
            expected: modes,
        });
    }
    let total: usize = occupations.iter().sum();
    let mut ln_weight = ln_factorial(total) - (total as f64) * (modes as f64).ln();
    for &m in occupations {
        ln_weight -= ln_factorial(m);
    }
    Ok(ln_weight.exp())
}

/// Validates and canonically orders the merge inputs.
///
/// Both backends reorder the inputs by (cutoff, entries) before combining,
/// which makes the merge bitwise invariant under input permutation.
fn prepared_inputs(inputs: &[PhotonNumberDistribution]) -> Result<Vec<PhotonNumberDistribution>> {
    if inputs.is_empty() {
        return Err(Error::NoInputs);
    }
    for d in inputs {
        d.require_normalized()?;
    }
    let mut sorted = inputs.to_vec();
    sorted.sort_by(|a, b| {
        a.cutoff().cmp(&b.cutoff()).then_with(|| {
            for (x, y) in a.probs().iter().zip(b.probs()) {
                let ord = x.total_cmp(y);
                if ord != std::cmp::Ordering::Equal {
                    return ord;
                }
            }
            std::cmp::Ordering::Equal
        })
    });
    Ok(sorted)
}

/// Exhaustive tuple enumeration of the merge. This is the oracle backend:
/// cost is Π_j (cutoff_j + 1), so it refuses inputs whose tuple count
/// exceeds `budget`.
pub fn merge_bruteforce_with_budget(
    inputs: &[PhotonNumberDistribution],
    budget: f64,
) -> Result<BunchingResult> {
    let inputs = prepared_inputs(inputs)?;
    let terms: f64 = inputs.iter().map(|d| (d.cutoff() + 1) as f64).product();
    if terms > budget {
        return Err(Error::TermBudgetExceeded { terms, budget });
    }
    let n = inputs.len();
    let total_cutoff: usize = inputs.iter().map(PhotonNumberDistribution::cutoff).sum();

    // Depth-first over occupation tuples, carrying the partial product of
    // probabilities and the partial Σ ln(m_j!).
    struct Walker<'a> {
        inputs: &'a [PhotonNumberDistribution],
        lf: Vec<f64>,
        ln_n: f64,
        q: Vec<KahanSum>,
    }
    impl Walker<'_> {
        fn descend(&mut self, depth: usize, photons: usize, prob: f64, ln_fact_sum: f64) {
            if depth == self.inputs.len() {
                let ln_weight = self.lf[photons] - ln_fact_sum - (photons as f64) * self.ln_n;
                self.q[photons].add(prob * ln_weight.exp());
                return;
            }
            for (m, &pm) in self.inputs[depth].probs().iter().enumerate() {
                if pm == 0.0 {
                    continue;
                }
                let step = self.lf[m];
                self.descend(depth + 1, photons + m, prob * pm, ln_fact_sum + step);
            }
        }
    }
    let mut walker = Walker {
        inputs: &inputs,
        lf: ln_factorial_table(total_cutoff),
        ln_n: (n as f64).ln(),
        q: vec![KahanSum::new(); total_cutoff + 1],
    };
    walker.descend(0, 0, 1.0, 0.0);

    BunchingResult::from_q(walker.q.iter().map(KahanSum::value).collect(), n)
}

/// [`merge_bruteforce_with_budget`] with the default term budget.
pub fn merge_bruteforce(inputs: &[PhotonNumberDistribution]) -> Result<BunchingResult> {
    merge_bruteforce_with_budget(inputs, DEFAULT_TERM_BUDGET)
}

/// Generating-function merge: iterated convolution of the per-input
/// polynomials e_j(z) = Σ_m p_{j,m} z^m / m!, then
/// Q_M = exp(ln M! − M ln n + ln c_M) where c_M = [z^M] Π_j e_j.
///
/// Agrees with [`merge_bruteforce`] elementwise to well below 1e-10 and is
/// polynomial in n and the cutoffs.
pub fn merge_convolution(inputs: &[PhotonNumberDistribution]) -> Result<BunchingResult> {
    let inputs = prepared_inputs(inputs)?;
    let n = inputs.len();
    let total_cutoff: usize = inputs.iter().map(PhotonNumberDistribution::cutoff).sum();
    let lf = ln_factorial_table(total_cutoff);
    let ln_n = (n as f64).ln();

    let mut product = vec![1.0f64];
    for d in &inputs {
        let scaled: Vec<f64> = d
            .probs()
            .iter()
            .enumerate()
            .map(|(m, &p)| p * (-lf[m]).exp())
            .collect();
        let mut next = vec![KahanSum::new(); product.len() + scaled.len() - 1];
        for (i, &a) in product.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in scaled.iter().enumerate() {
                next[i + j].add(a * b);
            }
        }
        product = next.iter().map(KahanSum::value).collect();
    }

    let q: Vec<f64> = product
        .iter()
        .enumerate()
        .map(|(total, &c)| {
            if c > 0.0 {
                (lf[total] - (total as f64) * ln_n + c.ln()).exp()
            } else {
                0.0
            }
        })
        .collect();
    BunchingResult::from_q(q, n)
}
