//! Availability of a split: the binomial threshold probability `P(n, m)` and a
//! seeded Monte-Carlo estimator that also tracks layout-aware coverage.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::ReliabilityError;
use crate::layout::build_table;
use crate::scheme::SchemeParams;

/// Largest `n` for which binomial coefficients are computed exactly in `u64`.
const EXACT_BINOMIAL_MAX_N: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub estimate: f64,
    pub stderr: f64,
}

impl Estimate {
    fn from_hits(hits: u64, trials: u64) -> Self {
        let estimate = hits as f64 / trials as f64;
        Estimate {
            estimate,
            stderr: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReliabilityReport {
    pub params: SchemeParams,
    pub p: f64,
    /// `P(n, m)`: probability that at least `m` modules are available.
    pub exact_threshold: f64,
    pub mc_threshold: Estimate,
    /// Fraction of trials where the available modules held every element.
    pub mc_coverage: Estimate,
    pub trials: u64,
    pub seed: u64,
}

fn check_probability(p: f64) -> Result<(), ReliabilityError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(ReliabilityError::ProbabilityOutOfRange(p))
    }
}

/// `C(n, k)` exactly. Callers keep `n <= 64`, where every value fits.
fn binomial(n: u32, k: u32) -> u64 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..u128::from(k) {
        acc = acc * (u128::from(n) - i) / (i + 1);
    }
    acc as u64
}

fn ln_binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (0..k)
        .map(|i| (f64::from(n - i)).ln() - f64::from(i + 1).ln())
        .sum()
}

fn binomial_term(n: u32, i: u32, p: f64) -> f64 {
    let q = 1.0 - p;
    if n <= EXACT_BINOMIAL_MAX_N {
        return binomial(n, i) as f64 * p.powi(i as i32) * q.powi((n - i) as i32);
    }
    // 0^0 = 1 has to survive the log-space path
    if (p == 0.0 && i > 0) || (q == 0.0 && i < n) {
        return 0.0;
    }
    let mut ln = ln_binomial(n, i);
    if i > 0 {
        ln += f64::from(i) * p.ln();
    }
    if i < n {
        ln += f64::from(n - i) * q.ln();
    }
    ln.exp()
}

/// `Σ_{i=m}^{n} C(n,i) p^i (1-p)^(n-i)`, summed with Neumaier compensation.
pub fn exact_reliability(params: SchemeParams, p: f64) -> Result<f64, ReliabilityError> {
    check_probability(p)?;
    let n = params.n();
    let mut sum = 0.0f64;
    let mut compensation = 0.0f64;
    for i in params.m()..=n {
        let term = binomial_term(n, i, p);
        let t = sum + term;
        if sum.abs() >= term.abs() {
            compensation += (sum - t) + term;
        } else {
            compensation += (term - t) + sum;
        }
        sum = t;
    }
    Ok((sum + compensation).clamp(0.0, 1.0))
}

/// Draws each module's availability independently with probability `p`.
/// Identical inputs give identical reports.
pub fn simulate(
    params: SchemeParams,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<ReliabilityReport, ReliabilityError> {
    check_probability(p)?;
    if trials == 0 {
        return Err(ReliabilityError::NoTrials);
    }
    let exact_threshold = exact_reliability(params, p)?;
    let table = build_table(params);
    let big_r = params.element_count() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // covered[e] == stamp marks element e as seen in the current trial
    let mut covered = vec![0u64; big_r + 1];
    let mut threshold_hits = 0u64;
    let mut coverage_hits = 0u64;
    for stamp in 1..=trials {
        let mut available = 0;
        let mut distinct = 0;
        for row in table.rows() {
            if !rng.gen_bool(p) {
                continue;
            }
            available += 1;
            for &e in row {
                let slot = &mut covered[e as usize];
                if *slot != stamp {
                    *slot = stamp;
                    distinct += 1;
                }
            }
        }
        if available >= params.m() {
            threshold_hits += 1;
        }
        if distinct == big_r {
            coverage_hits += 1;
        }
    }

    Ok(ReliabilityReport {
        params,
        p,
        exact_threshold,
        mc_threshold: Estimate::from_hits(threshold_hits, trials),
        mc_coverage: Estimate::from_hits(coverage_hits, trials),
        trials,
        seed,
    })
}
