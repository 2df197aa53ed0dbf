//! Income regimes and decile labelling.

use rand::Rng;
use rand_distr::{Open01, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution that agents draw their income from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IncomeRegime {
    /// Exponential with the given rate (mean `1 / rate`).
    Exponential { rate: f64 },
    /// `exp(location + dispersion * Z)` with `Z` standard normal.
    LogNormal { location: f64, dispersion: f64 },
}

impl Default for IncomeRegime {
    fn default() -> Self {
        IncomeRegime::Exponential { rate: 1.0 }
    }
}

impl IncomeRegime {
    pub fn exponential(rate: f64) -> Result<Self> {
        let regime = IncomeRegime::Exponential { rate };
        regime.validate()?;
        Ok(regime)
    }

    /// Log-normal with unit mean for the given dispersion.
    pub fn lognormal_unit_mean(dispersion: f64) -> Result<Self> {
        let location = lognormal_location_for_unit_mean(dispersion)?;
        Ok(IncomeRegime::LogNormal {
            location,
            dispersion,
        })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            IncomeRegime::Exponential { rate } => {
                if !(rate > 0.0 && rate.is_finite()) {
                    return Err(Error::invalid("lambda", format!("must be > 0, got {rate}")));
                }
            }
            IncomeRegime::LogNormal {
                location,
                dispersion,
            } => {
                if !(dispersion > 0.0 && dispersion.is_finite()) {
                    return Err(Error::invalid(
                        "sigma",
                        format!("must be > 0, got {dispersion}"),
                    ));
                }
                if !location.is_finite() {
                    return Err(Error::invalid(
                        "mu",
                        format!("must be finite, got {location}"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Population Gini coefficient of the distribution itself.
    ///
    /// Exponential: 1/2 for every rate. Log-normal: `2 Φ(σ/√2) − 1 = erf(σ/2)`.
    pub fn theoretical_gini(&self) -> f64 {
        match *self {
            IncomeRegime::Exponential { .. } => 0.5,
            IncomeRegime::LogNormal { dispersion, .. } => {
                statrs::function::erf::erf(dispersion / 2.0)
            }
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            IncomeRegime::Exponential { rate } => {
                // Inverse CDF on the open interval, so every draw is strictly positive.
                let u: f64 = rng.sample(Open01);
                -u.ln() / rate
            }
            IncomeRegime::LogNormal {
                location,
                dispersion,
            } => {
                let z: f64 = rng.sample(StandardNormal);
                (location + dispersion * z).exp()
            }
        }
    }
}

/// Location `μ = −σ²/2` that gives a log-normal with dispersion `σ` a mean of one.
pub fn lognormal_location_for_unit_mean(dispersion: f64) -> Result<f64> {
    if !(dispersion > 0.0 && dispersion.is_finite()) {
        return Err(Error::invalid(
            "sigma",
            format!("must be > 0, got {dispersion}"),
        ));
    }
    Ok(-dispersion * dispersion / 2.0)
}

/// Incomes of all agents together with their income decile (1 = poorest, 10 = richest).
#[derive(Debug, Clone, PartialEq)]
pub struct IncomeVector {
    incomes: Vec<f64>,
    deciles: Vec<u8>,
}

impl IncomeVector {
    /// Wraps a list of incomes and assigns deciles by rank.
    ///
    /// Ties are broken by agent index, so the assignment is deterministic.
    pub fn from_incomes(incomes: Vec<f64>) -> Result<Self> {
        if incomes.is_empty() {
            return Err(Error::TooFewAgents {
                required: 1,
                got: 0,
            });
        }
        if let Some(bad) = incomes.iter().find(|y| !(**y > 0.0 && y.is_finite())) {
            return Err(Error::invalid(
                "income",
                format!("must be finite and > 0, got {bad}"),
            ));
        }
        let deciles = assign_deciles(&incomes);
        Ok(IncomeVector { incomes, deciles })
    }

    pub fn len(&self) -> usize {
        self.incomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.incomes.is_empty()
    }

    pub fn incomes(&self) -> &[f64] {
        &self.incomes
    }

    pub fn deciles(&self) -> &[u8] {
        &self.deciles
    }

    pub fn total(&self) -> f64 {
        self.incomes.iter().sum()
    }

    /// Every income multiplied by `factor`. Decile labels are unchanged.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::invalid(
                "omega",
                format!("must be > 0, got {factor}"),
            ));
        }
        Ok(IncomeVector {
            incomes: self.incomes.iter().map(|y| y * factor).collect(),
            deciles: self.deciles.clone(),
        })
    }
}

fn assign_deciles(incomes: &[f64]) -> Vec<u8> {
    let n = incomes.len();
    let mut order: Vec<usize> = (0..n).collect();
    // sort_by is stable: equal incomes keep index order.
    order.sort_by(|&a, &b| incomes[a].total_cmp(&incomes[b]));
    let mut deciles = vec![0u8; n];
    for (rank, &agent) in order.iter().enumerate() {
        deciles[agent] = (rank * 10 / n) as u8 + 1;
    }
    deciles
}

/// Draws `n` independent incomes from `regime`.
pub fn sample_incomes<R: Rng + ?Sized>(
    regime: &IncomeRegime,
    n: usize,
    rng: &mut R,
) -> Result<IncomeVector> {
    if n < 2 {
        return Err(Error::TooFewAgents {
            required: 2,
            got: n,
        });
    }
    regime.validate()?;
    let incomes = (0..n).map(|_| regime.draw(rng)).collect();
    IncomeVector::from_incomes(incomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::RunKey;
    use crate::stats;
    use proptest::prelude::*;

    #[test]
    fn exponential_mean_and_gini_near_theory() {
        let regime = IncomeRegime::default();
        let mut pooled = 0.0;
        for seed in 0..20 {
            let v = sample_incomes(&regime, 1000, &mut RunKey::new(seed, 0).income_rng()).unwrap();
            let mean = v.total() / 1000.0;
            pooled += mean / 20.0;
            // The standard error of one mean is about 0.032.
            assert!((mean - 1.0).abs() < 0.15, "seed {seed}: mean {mean}");
            let g = stats::gini(v.incomes()).unwrap();
            assert!((g - 0.5).abs() < 0.03, "seed {seed}: gini {g}");
        }
        assert!((pooled - 1.0).abs() < 0.025, "pooled mean {pooled}");
    }

    #[test]
    fn exponential_cov_near_one_for_most_seeds() {
        let regime = IncomeRegime::default();
        let inside = (0..100)
            .filter(|&seed| {
                let v =
                    sample_incomes(&regime, 1000, &mut RunKey::new(seed, 0).income_rng()).unwrap();
                let cov = stats::coefficient_of_variation(v.incomes()).unwrap();
                (0.9..=1.1).contains(&cov)
            })
            .count();
        assert!(inside >= 95, "{inside} of 100 seeds inside [0.9, 1.1]");
    }

    #[test]
    fn tiny_dispersion_collapses_to_one() {
        let regime = IncomeRegime::lognormal_unit_mean(1e-9).unwrap();
        let v = sample_incomes(&regime, 10, &mut RunKey::new(3, 0).income_rng()).unwrap();
        for y in v.incomes() {
            assert!((y - 1.0).abs() < 1e-8);
        }
        assert!(stats::gini(v.incomes()).unwrap() < 1e-8);
    }

    #[test]
    fn unit_mean_location() {
        assert_eq!(lognormal_location_for_unit_mean(1.0).unwrap(), -0.5);
        assert_eq!(lognormal_location_for_unit_mean(2.0).unwrap(), -2.0);
        assert!(lognormal_location_for_unit_mean(1e-9).unwrap().abs() < 1e-17);
        assert!(lognormal_location_for_unit_mean(0.0).is_err());
        assert!(lognormal_location_for_unit_mean(-1.0).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut rng = RunKey::new(0, 0).income_rng();
        assert!(matches!(
            sample_incomes(&IncomeRegime::default(), 1, &mut rng),
            Err(Error::TooFewAgents { .. })
        ));
        assert!(sample_incomes(&IncomeRegime::Exponential { rate: 0.0 }, 10, &mut rng).is_err());
        assert!(sample_incomes(
            &IncomeRegime::LogNormal {
                location: 0.0,
                dispersion: -1.0
            },
            10,
            &mut rng
        )
        .is_err());
        assert!(IncomeVector::from_incomes(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn decile_sizes_and_ordering() {
        let v = IncomeVector::from_incomes((1..=25).rev().map(f64::from).collect()).unwrap();
        let mut counts = [0usize; 10];
        for &d in v.deciles() {
            counts[d as usize - 1] += 1;
        }
        assert!(counts.iter().all(|&c| c == 2 || c == 3), "{counts:?}");
        // agent 0 has the largest income
        assert_eq!(v.deciles()[0], 10);
        assert_eq!(v.deciles()[24], 1);
    }

    #[test]
    fn ties_break_by_index() {
        let v = IncomeVector::from_incomes(vec![1.0; 20]).unwrap();
        let expected: Vec<u8> = (0..20).map(|i| (i / 2) as u8 + 1).collect();
        assert_eq!(v.deciles(), expected.as_slice());
    }

    #[test]
    fn theoretical_gini_values() {
        assert_eq!(IncomeRegime::default().theoretical_gini(), 0.5);
        let g = IncomeRegime::lognormal_unit_mean(1.0)
            .unwrap()
            .theoretical_gini();
        // erf(0.5)
        assert!((g - 0.520_499_877_813_046_5).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn same_seed_same_incomes(seed in any::<u64>(), n in 2usize..200, sigma in 0.01f64..2.0) {
            for regime in [IncomeRegime::default(), IncomeRegime::lognormal_unit_mean(sigma).unwrap()] {
                let a = sample_incomes(&regime, n, &mut RunKey::new(seed, 0).income_rng()).unwrap();
                let b = sample_incomes(&regime, n, &mut RunKey::new(seed, 0).income_rng()).unwrap();
                prop_assert_eq!(&a, &b);
                prop_assert!(a.incomes().iter().all(|&y| y > 0.0));
            }
        }

        #[test]
        fn deciles_follow_the_multiset(mut values in prop::collection::vec(0.001f64..100.0, 10..60), shift in 0usize..60) {
            let v = IncomeVector::from_incomes(values.clone()).unwrap();
            let len = values.len();
            values.rotate_left(shift % len);
            let rotated = IncomeVector::from_incomes(values.clone()).unwrap();
            // The income at each decile boundary is the same multiset after permutation.
            for d in 1..=10u8 {
                let mut a: Vec<f64> = v.incomes().iter().zip(v.deciles()).filter(|(_, &x)| x == d).map(|(y, _)| *y).collect();
                let mut b: Vec<f64> = rotated.incomes().iter().zip(rotated.deciles()).filter(|(_, &x)| x == d).map(|(y, _)| *y).collect();
                a.sort_by(f64::total_cmp);
                b.sort_by(f64::total_cmp);
                prop_assert_eq!(a, b);
            }
        }
    }
}
