//! Small shared numerical helpers: compensated summation, log-factorials,
//! binomial loss kernels.

/// Kahan-compensated accumulator. Used wherever sums of many non-negative
/// terms must stay accurate independently of term count and order.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum
    }
}

/// ln(m!) by compensated summation of logs. Accurate to a few ulps for the
/// photon numbers seen here (m up to a few hundred).
pub(crate) fn ln_factorial(m: usize) -> f64 {
    let mut acc = KahanSum::new();
    for k in 2..=m {
        acc.add((k as f64).ln());
    }
    acc.value()
}

/// Cumulative table `lf[k] = ln(k!)` for k = 0..=max.
pub(crate) fn ln_factorial_table(max: usize) -> Vec<f64> {
    let mut lf = vec![0.0; max + 1];
    let mut acc = KahanSum::new();
    for (k, slot) in lf.iter_mut().enumerate().skip(2) {
        acc.add((k as f64).ln());
        *slot = acc.value();
    }
    lf
}

/// Binomial loss kernel for `m` input photons at transmissivity `eta`:
/// `kernel[k] = C(m, k) eta^k (1 - eta)^(m - k)` for k = 0..=m.
///
/// Uses the stable ratio recurrence; falls back to log-space when the k = 0
/// start underflows.
pub(crate) fn binomial_kernel(m: usize, eta: f64) -> Vec<f64> {
    debug_assert!((0.0..=1.0).contains(&eta));
    if eta == 1.0 {
        let mut kernel = vec![0.0; m + 1];
        kernel[m] = 1.0;
        return kernel;
    }
    if eta == 0.0 {
        let mut kernel = vec![0.0; m + 1];
        kernel[0] = 1.0;
        return kernel;
    }
    let mut kernel = vec![0.0; m + 1];
    let start = (1.0 - eta).powi(m as i32);
    if start > 0.0 {
        let ratio = eta / (1.0 - eta);
        kernel[0] = start;
        let mut term = start;
        for (k, slot) in kernel.iter_mut().enumerate().skip(1) {
            term *= ratio * ((m - k + 1) as f64) / (k as f64);
            *slot = term;
        }
    } else {
        // (1 - eta)^m underflowed; build each term from logs instead.
        let lf = ln_factorial_table(m);
        let ln_eta = eta.ln();
        let ln_bar = (1.0 - eta).ln();
        for (k, slot) in kernel.iter_mut().enumerate() {
            let ln_term = lf[m] - lf[k] - lf[m - k]
                + (k as f64) * ln_eta
                + ((m - k) as f64) * ln_bar;
            *slot = ln_term.exp();
        }
    }
    kernel
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_factorial_matches_direct_products() {
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
        let f10: f64 = (2..=10).product::<usize>() as f64;
        assert!((ln_factorial(10) - f10.ln()).abs() < 1e-13);
        let table = ln_factorial_table(120);
        assert!((table[100] - ln_factorial(100)).abs() < 1e-12);
    }

    #[test]
    fn binomial_kernel_sums_to_one() {
        for &(m, eta) in &[(0usize, 0.3), (1, 0.5), (14, 0.9205), (60, 0.05)] {
            let kernel = binomial_kernel(m, eta);
            let sum: f64 = kernel.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12, "m={m} eta={eta} sum={sum}");
        }
    }

    #[test]
    fn binomial_kernel_log_space_fallback() {
        // (1 - 0.999)^1200 underflows; kernel must still be a distribution
        // with its mean at eta * m.
        let m = 1200;
        let kernel = binomial_kernel(m, 0.999);
        let sum: f64 = kernel.iter().sum();
        let mean: f64 = kernel.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        assert!((sum - 1.0).abs() < 1e-9);
        assert!((mean - 0.999 * m as f64).abs() < 1e-6);
    }

    #[test]
    fn kahan_handles_adversarial_order() {
        let mut acc = KahanSum::new();
        acc.add(1.0);
        for _ in 0..1_000_000 {
            acc.add(1e-16);
        }
        assert!((acc.value() - (1.0 + 1e-10)).abs() < 1e-15);
    }
}
