//! Monte-Carlo summary statistics and Kolmogorov-Smirnov tests.

use crate::error::{Error, Result};

/// Sample mean and unbiased variance with standard errors. The standard
/// error of the variance comes from the fourth central moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McStats {
    pub n: u64,
    pub mean: f64,
    pub variance: f64,
    pub se_mean: f64,
    pub se_variance: f64,
}

/// Streams `n` draws from `draw` and summarizes them. Central moments are
/// accumulated online (Welford), so memory is O(1) at any sample size.
pub fn mc_stats<F: FnMut() -> f64>(n: u64, mut draw: F) -> Result<McStats> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            requirement: "at least 2",
            value: n.to_string(),
        });
    }
    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    let mut m3 = 0.0f64;
    let mut m4 = 0.0f64;
    let mut count = 0.0f64;
    for _ in 0..n {
        let x = draw();
        count += 1.0;
        let delta = x - mean;
        let delta_n = delta / count;
        let delta_n2 = delta_n * delta_n;
        let term = delta * delta_n * (count - 1.0);
        mean += delta_n;
        m4 += term * delta_n2 * (count * count - 3.0 * count + 3.0) + 6.0 * delta_n2 * m2
            - 4.0 * delta_n * m3;
        m3 += term * delta_n * (count - 2.0) - 3.0 * delta_n * m2;
        m2 += term;
    }
    let nf = n as f64;
    let variance = m2 / (nf - 1.0);
    let se_mean = (variance / nf).sqrt();
    let mu4 = m4 / nf;
    let var_of_var = (mu4 - variance * variance * (nf - 3.0) / (nf - 1.0)) / nf;
    Ok(McStats {
        n,
        mean,
        variance,
        se_mean,
        se_variance: var_of_var.max(0.0).sqrt(),
    })
}

/// Outcome of a Kolmogorov-Smirnov test at a fixed significance level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub critical: f64,
    pub rejected: bool,
}

/// Asymptotic KS coefficient `c(alpha) = sqrt(-ln(alpha/2) / 2)`.
fn ks_coefficient(alpha: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) || alpha <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "alpha",
            requirement: "in (0, 1)",
            value: alpha.to_string(),
        });
    }
    Ok((-(alpha / 2.0).ln() / 2.0).sqrt())
}

fn sort_in_place(sample: &mut [f64]) -> Result<()> {
    if sample.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidParameter {
            name: "sample",
            requirement: "free of NaN",
            value: "contains NaN".into(),
        });
    }
    sample.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(())
}

/// One-sample KS test of a sample against the uniform law on `[0, 1]`.
/// Sorts the sample in place.
pub fn ks_uniform_test(sample: &mut [f64], alpha: f64) -> Result<KsResult> {
    let n = sample.len();
    if n < 8 {
        return Err(Error::InvalidParameter {
            name: "sample size",
            requirement: "at least 8",
            value: n.to_string(),
        });
    }
    sort_in_place(sample)?;
    let nf = n as f64;
    let mut statistic = 0.0f64;
    for (idx, &x) in sample.iter().enumerate() {
        let cdf = x.clamp(0.0, 1.0);
        let upper = (idx as f64 + 1.0) / nf - cdf;
        let lower = cdf - idx as f64 / nf;
        statistic = statistic.max(upper).max(lower);
    }
    let critical = ks_coefficient(alpha)? / nf.sqrt();
    Ok(KsResult {
        statistic,
        critical,
        rejected: statistic > critical,
    })
}

/// Two-sample KS test. Sorts both samples in place.
pub fn ks_two_sample_test(a: &mut [f64], b: &mut [f64], alpha: f64) -> Result<KsResult> {
    if a.len() < 8 || b.len() < 8 {
        return Err(Error::InvalidParameter {
            name: "sample size",
            requirement: "at least 8 in both samples",
            value: format!("{} and {}", a.len(), b.len()),
        });
    }
    sort_in_place(a)?;
    sort_in_place(b)?;
    let (n, m) = (a.len() as f64, b.len() as f64);
    let mut statistic = 0.0f64;
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        let diff = (i as f64 / n - j as f64 / m).abs();
        statistic = statistic.max(diff);
    }
    let critical = ks_coefficient(alpha)? * ((n + m) / (n * m)).sqrt();
    Ok(KsResult {
        statistic,
        critical,
        rejected: statistic > critical,
    })
}
