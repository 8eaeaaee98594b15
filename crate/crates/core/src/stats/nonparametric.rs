//! Friedman, Wilcoxon signed-rank and sign tests over per-instance results.
//!
//! Conventions are pinned deliberately:
//!
//! * Wilcoxon drops exact zeros, mid-ranks tied magnitudes, and uses the
//!   plain normal approximation `Z = (T+ - n(n+1)/4) / sqrt(n(n+1)(2n+1)/24)`
//!   with neither a continuity correction nor a tie-variance correction.
//! * The sign test is exact-binomial, two-sided via doubling the smaller tail.
//! * Friedman uses the tie-corrected chi-square form; when every block is
//!   fully tied the statistic is defined as 0 with p = 1.

use super::dist::{binomial_half_cdf, chi_square_sf, normal_sf};
use super::{midranks_ascending, StatsError};
use serde::Serialize;

/// A hypothesis test result. `statistics` holds the named test statistics
/// (for example `T+`, `T-`, `Z` or `S`); `n_effective` is the sample size
/// after zero-removal; `exact` distinguishes exact p-values from
/// approximations; `degenerate` flags outcomes with no usable data, which
/// report p = 1.
#[derive(Debug, Clone, Serialize)]
pub struct TestOutcome {
    pub statistics: Vec<(String, f64)>,
    pub n_effective: usize,
    pub exact: bool,
    pub degenerate: bool,
    pub p_value: f64,
    pub two_sided: bool,
}

impl TestOutcome {
    pub fn statistic(&self, name: &str) -> Option<f64> {
        self.statistics.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }

    /// Significant at the given level (never true for degenerate outcomes).
    pub fn significant_at(&self, level: f64) -> bool {
        !self.degenerate && self.p_value < level
    }
}

fn check_finite(values: &[f64]) -> Result<(), StatsError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(StatsError::NonFiniteValue)
    }
}

/// Two-sided Wilcoxon signed-rank test that the values are centred on zero.
pub fn wilcoxon_signed_rank(values: &[f64]) -> Result<TestOutcome, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    check_finite(values)?;

    let nonzero: Vec<f64> = values.iter().copied().filter(|&v| v != 0.0).collect();
    let n = nonzero.len();
    if n == 0 {
        return Ok(TestOutcome {
            statistics: vec![("T+".into(), 0.0), ("T-".into(), 0.0), ("Z".into(), 0.0)],
            n_effective: 0,
            exact: false,
            degenerate: true,
            p_value: 1.0,
            two_sided: true,
        });
    }

    let magnitudes: Vec<f64> = nonzero.iter().map(|v| v.abs()).collect();
    let ranks = midranks_ascending(&magnitudes);
    // fold from +0.0: an empty `sum()` would yield -0.0.
    let t_plus: f64 = nonzero
        .iter()
        .zip(&ranks)
        .filter(|(&v, _)| v > 0.0)
        .fold(0.0, |acc, (_, &r)| acc + r);
    let rank_total = (n * (n + 1)) as f64 / 2.0;
    let t_minus = rank_total - t_plus;

    let n_f = n as f64;
    let mean = n_f * (n_f + 1.0) / 4.0;
    let variance = n_f * (n_f + 1.0) * (2.0 * n_f + 1.0) / 24.0;
    let z = (t_plus - mean) / variance.sqrt();
    let p = (2.0 * normal_sf(z.abs())).min(1.0);

    Ok(TestOutcome {
        statistics: vec![("T+".into(), t_plus), ("T-".into(), t_minus), ("Z".into(), z)],
        n_effective: n,
        exact: false,
        degenerate: false,
        p_value: p,
        two_sided: true,
    })
}

/// Two-sided exact sign test that positives and negatives are equally likely,
/// ignoring zeros.
pub fn sign_test(values: &[f64]) -> Result<TestOutcome, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    check_finite(values)?;

    let positives = values.iter().filter(|&&v| v > 0.0).count();
    let n = values.iter().filter(|&&v| v != 0.0).count();
    if n == 0 {
        return Ok(TestOutcome {
            statistics: vec![("B".into(), 0.0)],
            n_effective: 0,
            exact: true,
            degenerate: true,
            p_value: 1.0,
            two_sided: true,
        });
    }

    let b = positives as i64;
    let lower = binomial_half_cdf(b, n as u64);
    // P(X >= b) = P(X <= n - b) for X ~ Binomial(n, 1/2).
    let upper = binomial_half_cdf(n as i64 - b, n as u64);
    let p = (2.0 * lower.min(upper)).min(1.0);

    Ok(TestOutcome {
        statistics: vec![("B".into(), positives as f64)],
        n_effective: n,
        exact: true,
        degenerate: false,
        p_value: p,
        two_sided: true,
    })
}

/// Friedman test outcome plus the per-algorithm average ranks that order the
/// algorithms overall.
#[derive(Debug, Clone, Serialize)]
pub struct FriedmanOutcome {
    pub outcome: TestOutcome,
    pub degrees_of_freedom: usize,
    pub average_ranks: Vec<f64>,
}

/// Tie-corrected Friedman test on a `P x K` matrix of per-instance mid-rank
/// vectors (each row ranks the K algorithms 1..=K, mid-ranks for ties).
pub fn friedman(rank_matrix: &[Vec<f64>]) -> Result<FriedmanOutcome, StatsError> {
    let blocks = rank_matrix.len();
    if blocks < 2 {
        return Err(StatsError::TooFew {
            what: "rank matrix rows",
            needed: 2,
            got: blocks,
        });
    }
    let k = rank_matrix[0].len();
    if k < 2 {
        return Err(StatsError::TooFew {
            what: "algorithms",
            needed: 2,
            got: k,
        });
    }
    let expected_row_sum = (k * (k + 1)) as f64 / 2.0;
    for (row, ranks) in rank_matrix.iter().enumerate() {
        if ranks.len() != k {
            return Err(StatsError::RaggedRankMatrix {
                row,
                got: ranks.len(),
                expected: k,
            });
        }
        check_finite(ranks)?;
        let sum: f64 = ranks.iter().sum();
        if (sum - expected_row_sum).abs() > 1e-6 {
            return Err(StatsError::BadRankRow {
                row,
                k,
                reason: format!("ranks sum to {sum}, expected {expected_row_sum}"),
            });
        }
        if ranks.iter().any(|&r| r < 1.0 || r > k as f64) {
            return Err(StatsError::BadRankRow {
                row,
                k,
                reason: "rank outside 1..=K".into(),
            });
        }
    }

    let p_f = blocks as f64;
    let k_f = k as f64;
    let column_sums: Vec<f64> =
        (0..k).map(|j| rank_matrix.iter().map(|row| row[j]).sum()).collect();
    let average_ranks: Vec<f64> = column_sums.iter().map(|&s| s / p_f).collect();

    // Conover's tie-corrected statistic:
    //   S = (K-1) [sum_j R_j^2 - P^2 K (K+1)^2 / 4] / (A - C)
    // with A the sum of squared cell ranks and C = P K (K+1)^2 / 4. Without
    // ties this reduces to the classic 12/(PK(K+1)) sum R_j^2 - 3P(K+1).
    let a: f64 = rank_matrix.iter().flatten().map(|&r| r * r).sum();
    let c = p_f * k_f * (k_f + 1.0) * (k_f + 1.0) / 4.0;
    let numerator = (k_f - 1.0) * (column_sums.iter().map(|&s| s * s).sum::<f64>() - p_f * c);
    let denominator = a - c;

    let df = k - 1;
    let (statistic, p_value) = if denominator <= 0.0 {
        // Every block fully tied: no evidence either way.
        (0.0, 1.0)
    } else {
        let s = numerator / denominator;
        (s, chi_square_sf(s, df))
    };

    Ok(FriedmanOutcome {
        outcome: TestOutcome {
            statistics: vec![("S".into(), statistic), ("df".into(), df as f64)],
            n_effective: blocks,
            exact: false,
            degenerate: false,
            p_value,
            two_sided: false,
        },
        degrees_of_freedom: df,
        average_ranks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilcoxon_symmetric_pair() {
        // {+1, -1}: tied magnitudes share rank 1.5 each, Z = 0.
        let out = wilcoxon_signed_rank(&[1.0, -1.0]).unwrap();
        assert_eq!(out.statistic("T+"), Some(1.5));
        assert_eq!(out.statistic("T-"), Some(1.5));
        assert_eq!(out.statistic("Z"), Some(0.0));
        assert_eq!(out.n_effective, 2);
        assert_eq!(out.p_value, 1.0);
    }

    #[test]
    fn wilcoxon_drops_zeros_and_flags_degenerate() {
        let out = wilcoxon_signed_rank(&[0.0, 0.0]).unwrap();
        assert!(out.degenerate);
        assert_eq!(out.n_effective, 0);
        assert_eq!(out.p_value, 1.0);
        assert!(!out.significant_at(0.05));

        let out = wilcoxon_signed_rank(&[0.0, 2.0, -1.0, 0.0]).unwrap();
        assert_eq!(out.n_effective, 2);
    }

    #[test]
    fn wilcoxon_rank_sum_identity() {
        let values = [0.3, -0.2, 0.7, 0.7, -0.1, 0.0, 0.4];
        let out = wilcoxon_signed_rank(&values).unwrap();
        let n = out.n_effective as f64;
        let total = out.statistic("T+").unwrap() + out.statistic("T-").unwrap();
        assert_eq!(total, n * (n + 1.0) / 2.0);
    }

    #[test]
    fn wilcoxon_all_negative_reports_plain_zero_t_plus() {
        let out = wilcoxon_signed_rank(&[-1.0, -0.5, -0.25]).unwrap();
        let t_plus = out.statistic("T+").unwrap();
        assert_eq!(t_plus.to_bits(), 0.0f64.to_bits(), "got {t_plus}");
        assert_eq!(out.statistic("T-"), Some(6.0));
    }

    #[test]
    fn wilcoxon_rejects_bad_input() {
        assert_eq!(wilcoxon_signed_rank(&[]).unwrap_err(), StatsError::EmptyInput);
        assert_eq!(
            wilcoxon_signed_rank(&[1.0, f64::NAN]).unwrap_err(),
            StatsError::NonFiniteValue
        );
    }

    #[test]
    fn sign_test_balance_gives_p_one() {
        let values: Vec<f64> = (0..10).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let out = sign_test(&values).unwrap();
        assert_eq!(out.statistic("B"), Some(5.0));
        assert_eq!(out.p_value, 1.0);
        assert!(out.exact);
    }

    #[test]
    fn sign_test_is_symmetric_under_sign_flip() {
        let values = [1.0, 2.0, 3.0, -0.5, 4.0, -0.25, 5.0];
        let flipped: Vec<f64> = values.iter().map(|v| -v).collect();
        let a = sign_test(&values).unwrap();
        let b = sign_test(&flipped).unwrap();
        assert_eq!(a.p_value, b.p_value);
        assert_eq!(
            a.statistic("B").unwrap(),
            a.n_effective as f64 - b.statistic("B").unwrap()
        );
    }

    #[test]
    fn sign_test_all_zero_is_degenerate() {
        let out = sign_test(&[0.0, 0.0, 0.0]).unwrap();
        assert!(out.degenerate);
        assert_eq!(out.p_value, 1.0);
    }

    #[test]
    fn friedman_consistent_untied_rankings() {
        // K = 3, P = 2, identical rankings: S = 4 by the classic formula.
        let out = friedman(&[vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]]).unwrap();
        assert_eq!(out.outcome.statistic("S"), Some(4.0));
        assert_eq!(out.degrees_of_freedom, 2);
        assert_eq!(out.average_ranks, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn friedman_fully_tied_is_zero() {
        let row = vec![2.0, 2.0, 2.0];
        let out = friedman(&[row.clone(), row]).unwrap();
        assert_eq!(out.outcome.statistic("S"), Some(0.0));
        assert_eq!(out.outcome.p_value, 1.0);
    }

    #[test]
    fn friedman_validates_input() {
        assert!(matches!(
            friedman(&[vec![1.0, 2.0]]),
            Err(StatsError::TooFew { what: "rank matrix rows", .. })
        ));
        assert!(matches!(
            friedman(&[vec![1.0, 2.0], vec![1.0]]),
            Err(StatsError::RaggedRankMatrix { .. })
        ));
        assert!(matches!(
            friedman(&[vec![1.0, 2.0], vec![2.0, 2.0]]),
            Err(StatsError::BadRankRow { .. })
        ));
    }

    #[test]
    fn friedman_with_midrank_ties_uses_correction() {
        // One row tied at 1.5/1.5, one untied; the corrected statistic stays
        // finite and within [0, P(K-1)].
        let out = friedman(&[vec![1.5, 1.5, 3.0], vec![1.0, 2.0, 3.0]]).unwrap();
        let s = out.outcome.statistic("S").unwrap();
        assert!(s > 0.0 && s <= 4.0, "S = {s}");
    }
}
