//! Validation statistics: inequality, dispersion, decile APCs and a
//! Kolmogorov–Smirnov test for log-normality.

use serde::{Deserialize, Serialize};

use crate::consumption::ConsumptionSolution;
use crate::error::{Error, Result};
use crate::income::IncomeVector;

fn check_positive(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::SampleTooSmall {
            required: 1,
            got: 0,
        });
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::invalid(
            "values",
            format!("must be finite and > 0, got {v}"),
        ));
    }
    Ok(())
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population standard deviation.
pub fn std_dev(values: &[f64]) -> f64 {
    let m = mean(values);
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / values.len() as f64).sqrt()
}

/// Gini coefficient `Σᵢ Σⱼ |xᵢ − xⱼ| / (2 n² x̄)`, without small-sample correction.
///
/// Evaluated through the sorted form `Σᵢ (2i − n − 1) x₍ᵢ₎ / (n² x̄)`, which is
/// the same quantity in `O(n log n)`.
pub fn gini(values: &[f64]) -> Result<f64> {
    check_positive(values)?;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let total: f64 = sorted.iter().sum();
    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .map(|(i, x)| (2.0 * (i as f64 + 1.0) - n - 1.0) * x)
        .sum();
    Ok((weighted / (n * total)).max(0.0))
}

pub fn coefficient_of_variation(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::SampleTooSmall {
            required: 1,
            got: 0,
        });
    }
    let m = mean(values);
    if !(m > 0.0) {
        return Err(Error::invalid(
            "values",
            format!("mean must be > 0, got {m}"),
        ));
    }
    Ok(std_dev(values) / m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecileApcConvention {
    /// `Σ C / Σ Y` within the decile.
    #[default]
    RatioOfSums,
    /// Mean of the individual `C / Y` within the decile.
    MeanOfRatios,
}

/// APC per income decile, index 0 = decile 1 (poorest).
///
/// Deciles without members (fewer than 10 agents) come back as NaN.
pub fn decile_apcs(
    incomes: &IncomeVector,
    solution: &ConsumptionSolution,
    convention: DecileApcConvention,
) -> Result<[f64; 10]> {
    if incomes.len() != solution.consumption.len() {
        return Err(Error::LengthMismatch {
            what: "incomes and solution",
            left: incomes.len(),
            right: solution.consumption.len(),
        });
    }
    let mut num = [0.0; 10];
    let mut den = [0.0; 10];
    let mut count = [0usize; 10];
    for ((&y, &c), &d) in incomes
        .incomes()
        .iter()
        .zip(&solution.consumption)
        .zip(incomes.deciles())
    {
        let d = d as usize - 1;
        count[d] += 1;
        match convention {
            DecileApcConvention::RatioOfSums => {
                num[d] += c;
                den[d] += y;
            }
            DecileApcConvention::MeanOfRatios => {
                num[d] += c / y;
                den[d] += 1.0;
            }
        }
    }
    let mut out = [f64::NAN; 10];
    for d in 0..10 {
        if count[d] > 0 {
            out[d] = num[d] / den[d];
        }
    }
    Ok(out)
}

/// `1 − Σ C / Σ Y`.
pub fn aggregate_saving_rate(
    incomes: &IncomeVector,
    solution: &ConsumptionSolution,
) -> Result<f64> {
    if incomes.len() != solution.consumption.len() {
        return Err(Error::LengthMismatch {
            what: "incomes and solution",
            left: incomes.len(),
            right: solution.consumption.len(),
        });
    }
    Ok(1.0 - solution.total() / incomes.total())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionSummary {
    pub mean: f64,
    pub coefficient_of_variation: f64,
    pub gini: f64,
    /// Mean value within each income decile.
    pub decile_means: [f64; 10],
}

impl DistributionSummary {
    /// Summarises `values`, grouping by the income deciles in `groups`.
    pub fn new(values: &[f64], groups: &IncomeVector) -> Result<Self> {
        if values.len() != groups.len() {
            return Err(Error::LengthMismatch {
                what: "values and deciles",
                left: values.len(),
                right: groups.len(),
            });
        }
        let mut sums = [0.0; 10];
        let mut counts = [0usize; 10];
        for (&v, &d) in values.iter().zip(groups.deciles()) {
            sums[d as usize - 1] += v;
            counts[d as usize - 1] += 1;
        }
        let mut decile_means = [f64::NAN; 10];
        for d in 0..10 {
            if counts[d] > 0 {
                decile_means[d] = sums[d] / counts[d] as f64;
            }
        }
        Ok(DistributionSummary {
            mean: mean(values),
            coefficient_of_variation: coefficient_of_variation(values)?,
            gini: gini(values)?,
            decile_means,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogNormalFit {
    pub mu: f64,
    pub sigma: f64,
}

impl LogNormalFit {
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        0.5 * statrs::function::erf::erfc(
            -(x.ln() - self.mu) / (self.sigma * std::f64::consts::SQRT_2),
        )
    }
}

/// Maximum-likelihood log-normal parameters: mean and population standard
/// deviation of the log-values.
pub fn fit_lognormal_mle(values: &[f64]) -> Result<LogNormalFit> {
    check_positive(values)?;
    if values.len() < 2 {
        return Err(Error::SampleTooSmall {
            required: 2,
            got: values.len(),
        });
    }
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let mu = mean(&logs);
    let sigma = std_dev(&logs);
    if !(sigma > 0.0) {
        return Err(Error::Degenerate(
            "all values are equal, log-dispersion is zero",
        ));
    }
    Ok(LogNormalFit { mu, sigma })
}

/// Smallest sample for which the asymptotic critical values are used.
pub const KS_MIN_SAMPLE: usize = 30;

/// Asymptotic Kolmogorov quantiles `K_{1−α}`: the test rejects when
/// `D > K_{1−α} / √n`.
const KOLMOGOROV_QUANTILES: [(f64, f64); 8] = [
    (0.20, 1.073),
    (0.15, 1.138),
    (0.10, 1.224),
    (0.05, 1.358),
    (0.025, 1.480),
    (0.01, 1.628),
    (0.005, 1.731),
    (0.001, 1.949),
];

pub fn ks_critical_value(n: usize, alpha: f64) -> Result<f64> {
    let quantile = KOLMOGOROV_QUANTILES
        .iter()
        .find(|(a, _)| (a - alpha).abs() < 1e-12)
        .map(|&(_, k)| k)
        .ok_or_else(|| {
            Error::invalid(
                "alpha",
                format!("no tabulated critical value for {alpha}; use one of 0.2, 0.15, 0.1, 0.05, 0.025, 0.01, 0.005, 0.001"),
            )
        })?;
    Ok(quantile / (n as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogNormalityResult {
    pub fit: LogNormalFit,
    pub ks_statistic: f64,
    pub critical_value: f64,
    pub alpha: f64,
    pub reject: bool,
}

/// One-sample KS test of `values` against the log-normal fitted to them.
pub fn ks_lognormality(values: &[f64], alpha: f64) -> Result<LogNormalityResult> {
    if values.len() < KS_MIN_SAMPLE {
        return Err(Error::SampleTooSmall {
            required: KS_MIN_SAMPLE,
            got: values.len(),
        });
    }
    let fit = fit_lognormal_mle(values)?;
    let critical_value = ks_critical_value(values.len(), alpha)?;
    let ks_statistic = ks_statistic(values, |x| fit.cdf(x));
    Ok(LogNormalityResult {
        fit,
        ks_statistic,
        critical_value,
        alpha,
        reject: ks_statistic > critical_value,
    })
}

/// `sup |F_n − F|` over the sample.
pub fn ks_statistic(values: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let above = (i as f64 + 1.0) / n - f;
            let below = f - i as f64 / n;
            above.abs().max(below.abs())
        })
        .fold(0.0, f64::max)
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            what: "spearman inputs",
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::SampleTooSmall {
            required: 2,
            got: xs.len(),
        });
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let (mx, my) = (mean(&rx), mean(&ry));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate("constant input to rank correlation"));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end + 1 < order.len() && values[order[end + 1]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end) as f64 / 2.0 + 1.0;
        for &i in &order[start..=end] {
            out[i] = rank;
        }
        start = end + 1;
    }
    out
}
