//! Radial Wigner functions of Fock-diagonal states and their negative
//! region structure.
//!
//! For a distribution {p_M} the Wigner function is radially symmetric:
//! 2π·W(x, p) = e^(−u/2) f(u) with u = x² + p² in quadrature units where
//! the vacuum has variance 1, and
//!
//! ```text
//! f(u) = Σ_M p_M (−1)^M L_M(u)
//! ```
//!
//! (L_M the Laguerre polynomial). The convention is fixed so that
//! 2π·W(0,0) = Σ (−1)^M p_M and each Fock term integrates to one.
//! Since the Gaussian envelope never vanishes, the sign structure of W is
//! the sign structure of the polynomial f.

use crate::error::{Error, Result};
use crate::numeric::{binomial_kernel, ln_factorial_table, KahanSum};
use crate::photon_stats::PhotonNumberDistribution;

/// Bisection tolerance for root locations, in u = r².
pub const ROOT_TOL: f64 = 1e-10;

/// Exact polynomial f(u) (times the Gaussian envelope) representing the
/// radial Wigner function of a Fock-diagonal state.
#[derive(Debug, Clone)]
pub struct RadialWignerPolynomial {
    /// Monomial coefficients of f; degree equals the source cutoff.
    coeffs: Vec<f64>,
    /// Source distribution, kept for numerically stable evaluation.
    probs: Vec<f64>,
}

/// Sign structure of a radial Wigner function on (0, ∞).
#[derive(Debug, Clone, PartialEq)]
pub struct NegativeRegionStructure {
    /// Number of maximal radial intervals where the Wigner function is
    /// strictly negative (central disk included, when present).
    pub region_count: usize,
    /// Whether f(0) < 0 strictly.
    pub origin_negative: bool,
    /// Sign-change locations of f in u = r², sorted increasing. Analytic
    /// structures built by [`ideal_region_count`] leave this empty.
    pub root_radii: Vec<f64>,
}

impl NegativeRegionStructure {
    /// Negative annuli, i.e. negative regions not counting a central disk.
    pub fn annulus_count(&self) -> usize {
        self.region_count - usize::from(self.origin_negative)
    }

    /// True when both the region count and the origin sign agree.
    pub fn same_sign_structure(&self, other: &Self) -> bool {
        self.region_count == other.region_count && self.origin_negative == other.origin_negative
    }
}

/// Builds the radial Wigner polynomial of a normalized distribution using
/// the Laguerre recurrence (k+1)L_{k+1} = (2k+1−u)L_k − k L_{k−1}.
pub fn radial_wigner(d: &PhotonNumberDistribution) -> Result<RadialWignerPolynomial> {
    d.require_normalized()?;
    let probs = d.probs().to_vec();
    let degree = probs.len() - 1;
    let mut acc = vec![KahanSum::new(); degree + 1];

    // Coefficient vectors of L_{k-1} and L_k, updated in place.
    let mut prev = vec![0.0; degree + 1];
    let mut curr = vec![0.0; degree + 1];
    prev[0] = 1.0; // L_0
    if degree >= 1 {
        curr[0] = 1.0; // L_1 = 1 - u
        curr[1] = -1.0;
    }
    for (m, &p) in probs.iter().enumerate() {
        let signed = if m % 2 == 0 { p } else { -p };
        let poly = if m == 0 { &prev } else { &curr };
        for (slot, &c) in acc.iter_mut().zip(poly.iter()) {
            slot.add(signed * c);
        }
        if m >= 1 && m < degree {
            let k = m as f64;
            let mut next = vec![0.0; degree + 1];
            for i in 0..=m + 1 {
                let mut v = (2.0 * k + 1.0) * curr[i];
                if i > 0 {
                    v -= curr[i - 1];
                }
                v -= k * prev[i];
                next[i] = v / (k + 1.0);
            }
            prev = std::mem::take(&mut curr);
            curr = next;
        }
    }

    Ok(RadialWignerPolynomial {
        coeffs: acc.iter().map(KahanSum::value).collect(),
        probs,
    })
}

impl RadialWignerPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// f(0) = Σ (−1)^M p_M; shares its summation with
    /// [`PhotonNumberDistribution::origin_negativity`].
    pub fn origin_value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Horner evaluation of f from the monomial coefficients. Accurate for
    /// modest degrees; sign analysis uses [`Self::two_pi_w_of_u`] instead,
    /// which stays well-conditioned at high degree.
    pub fn eval_f(&self, u: f64) -> f64 {
        let mut v = 0.0;
        for &c in self.coeffs.iter().rev() {
            v = v * u + c;
        }
        v
    }

    /// 2π·W at u = r², evaluated as Σ p_M (−1)^M · [e^(−u/2) L_M(u)].
    ///
    /// The bracketed terms are generated by the Laguerre recurrence applied
    /// to the envelope-scaled values, which are bounded by 1 in magnitude
    /// for all u ≥ 0, so the evaluation does not blow up at high degree.
    pub fn two_pi_w_of_u(&self, u: f64) -> f64 {
        let envelope = (-0.5 * u).exp();
        let mut prev = envelope; // e^(-u/2) L_0
        let mut acc = KahanSum::new();
        acc.add(self.probs[0] * prev);
        if self.probs.len() == 1 {
            return acc.value();
        }
        let mut curr = (1.0 - u) * envelope; // e^(-u/2) L_1
        acc.add(-self.probs[1] * curr);
        for (m, &p) in self.probs.iter().enumerate().skip(2) {
            let k = (m - 1) as f64;
            let next = ((2.0 * k + 1.0 - u) * curr - k * prev) / (k + 1.0);
            prev = curr;
            curr = next;
            let signed = if m % 2 == 0 { p } else { -p };
            acc.add(signed * curr);
        }
        acc.value()
    }

    /// 2π·W at phase-space radius r.
    pub fn two_pi_w(&self, r: f64) -> f64 {
        self.two_pi_w_of_u(r * r)
    }

    /// ∫₀^∞ e^(−u/2) f(u) du evaluated termwise from the monomial
    /// coefficients via ∫₀^∞ e^(−u/2) u^k du = k!·2^(k+1). Equals 2 for a
    /// normalized distribution; the alternating coefficients make this a
    /// genuinely independent consistency route for modest degrees.
    pub fn normalization_integral(&self) -> f64 {
        let lf = ln_factorial_table(self.degree());
        let mut acc = KahanSum::new();
        for (k, &c) in self.coeffs.iter().enumerate() {
            let factor = (lf[k] + ((k + 1) as f64) * std::f64::consts::LN_2).exp();
            acc.add(c * factor);
        }
        acc.value()
    }
}

/// Finds the negative regions of a radial Wigner function.
///
/// The sign of f is sampled on a grid uniform in r = √u (Laguerre roots
/// cluster like k² in u near the origin, so a grid uniform in u would skip
/// the innermost annuli at high degree; in r the oscillation spacing is
/// nearly uniform). Every sign change is refined by bisection to
/// [`ROOT_TOL`] in u. Even-multiplicity (grazing) zeros produce no sign
/// change and therefore no region boundary, and strict negativity decides
/// region membership, so a polynomial that only touches zero has no
/// negative regions.
///
/// All sign changes of f lie below 4·degree + 2: beyond the largest root
/// of its highest Laguerre component every term (−1)^M p_M L_M(u) is
/// positive.
pub fn negative_regions(w: &RadialWignerPolynomial) -> Result<NegativeRegionStructure> {
    let degree = w.degree();
    let origin = w.origin_value();
    if degree == 0 {
        return Ok(NegativeRegionStructure {
            region_count: usize::from(origin < 0.0),
            origin_negative: origin < 0.0,
            root_radii: Vec::new(),
        });
    }

    let u_max = 4.0 * degree as f64 + 20.0;
    let r_max = u_max.sqrt();
    let samples = (16 * degree).max(256);
    let grid: Vec<f64> = (0..=samples)
        .map(|i| {
            let r = r_max * i as f64 / samples as f64;
            r * r
        })
        .collect();
    let values: Vec<f64> = grid.iter().map(|&u| w.two_pi_w_of_u(u)).collect();

    let mut roots = Vec::new();
    for i in 0..samples {
        let (a, b) = (values[i], values[i + 1]);
        if a == 0.0 {
            // Grid point landed exactly on a zero; count it as a crossing
            // only if the neighbors disagree in sign.
            if i > 0 && values[i - 1] * b < 0.0 {
                roots.push(grid[i]);
            }
            continue;
        }
        if a * b < 0.0 {
            roots.push(bisect(w, grid[i], grid[i + 1], a)?);
        }
    }

    let mut region_count = 0;
    let mut bounds = vec![0.0];
    bounds.extend_from_slice(&roots);
    bounds.push(u_max);
    for pair in bounds.windows(2) {
        let mid = 0.5 * (pair[0] + pair[1]);
        if w.two_pi_w_of_u(mid) < 0.0 {
            region_count += 1;
        }
    }

    Ok(NegativeRegionStructure {
        region_count,
        origin_negative: origin < 0.0,
        root_radii: roots,
    })
}

fn bisect(w: &RadialWignerPolynomial, mut lo: f64, mut hi: f64, f_lo: f64) -> Result<f64> {
    let sign_lo = f_lo.signum();
    for _ in 0..200 {
        if hi - lo <= ROOT_TOL {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = w.two_pi_w_of_u(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::RootFinding(format!(
        "bisection did not reach {ROOT_TOL:e} within 200 iterations on [{lo}, {hi}]"
    )))
}

/// Sign structure of the ideal Fock state |n⟩: ceil(n/2) negative regions,
/// of which one is a central disk when n is odd; equivalently n/2 (even n)
/// or (n−1)/2 (odd n) annuli.
pub fn ideal_region_count(n: usize) -> NegativeRegionStructure {
    NegativeRegionStructure {
        region_count: n.div_ceil(2),
        origin_negative: n % 2 == 1,
        root_radii: Vec::new(),
    }
}

/// Does the merged output of n inputs reproduce the negative-region
/// structure of the ideal Fock state |n⟩?
pub fn capability_test(output: &PhotonNumberDistribution, n: usize) -> Result<bool> {
    let regions = negative_regions(&radial_wigner(output)?)?;
    Ok(regions.same_sign_structure(&ideal_region_count(n)))
}

/// Least-squares fit of an attenuated Fock state to a merged output.
#[derive(Debug, Clone, Copy)]
pub struct AttenuationFit {
    /// Fitted transmissivity η*.
    pub eta: f64,
    /// Sum of squared probability differences at η*.
    pub residual: f64,
}

/// Fits apply_loss(|n⟩, η) to `output` by minimizing the sum of squared
/// differences of the photon-number probabilities over k = 0..=n, using
/// golden-section search on η ∈ [0, 1]. The search runs to a bracket
/// width of 1e-8 so that a self-fit leaves a residual below 1e-12.
pub fn fit_attenuated_fock(
    output: &PhotonNumberDistribution,
    n: usize,
) -> Result<AttenuationFit> {
    if n == 0 {
        return Err(Error::InvalidParameter("fit target n must be >= 1".into()));
    }
    output.require_normalized()?;

    let objective = |eta: f64| -> f64 {
        let kernel = binomial_kernel(n, eta);
        let mut acc = KahanSum::new();
        for (k, &model) in kernel.iter().enumerate() {
            let diff = output.prob(k) - model;
            acc.add(diff * diff);
        }
        acc.value()
    };

    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    while hi - lo > 1e-8 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2);
        }
    }
    let eta = 0.5 * (lo + hi);
    Ok(AttenuationFit {
        eta,
        residual: objective(eta),
    })
}
