//! Two-sample t-tests and McNemar's test for comparing the original and
//! refined key-point sets.

use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

/// Significance level used for the reported critical values.
pub const SIGNIFICANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSummary {
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator).
    pub sd: f64,
    pub n: usize,
}

impl SampleSummary {
    pub fn new(mean: f64, sd: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "a sample needs at least 2 observations, got {n}"
            )));
        }
        if !sd.is_finite() || sd < 0.0 || !mean.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "invalid summary mean={mean} sd={sd}"
            )));
        }
        Ok(Self { mean, sd, n })
    }

    pub fn from_samples(xs: &[f64]) -> Result<Self> {
        if xs.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a sample needs at least 2 observations, got {}",
                xs.len()
            )));
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
        Self::new(mean, (ss / (n - 1.0)).sqrt(), xs.len())
    }

    fn variance(&self) -> f64 {
        self.sd * self.sd
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VarianceModel {
    /// Student's test with pooled variance, `df = n_a + n_b - 2`.
    #[default]
    Pooled,
    /// Welch's test with Satterthwaite degrees of freedom.
    Welch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTestReport {
    pub t_stat: f64,
    pub df: f64,
    /// `P(T > |t|)`.
    pub p_one_tail: f64,
    pub p_two_tail: f64,
    pub t_crit_one: f64,
    pub t_crit_two: f64,
}

/// Upper tail `P(T > t)` of Student's t with `df` degrees of freedom.
pub fn student_t_sf(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t == f64::INFINITY {
        return 0.0;
    }
    if t == f64::NEG_INFINITY {
        return 1.0;
    }
    let x = df / (df + t * t);
    let tail = 0.5 * beta_reg(0.5 * df, 0.5, x);
    if t >= 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    if t >= 0.0 {
        1.0 - student_t_sf(t, df)
    } else {
        student_t_sf(-t, df)
    }
}

/// Upper-tail critical value: the `t` with `P(T > t) = upper_tail`, found by
/// bisection on the survival function.
pub fn student_t_critical(upper_tail: f64, df: f64) -> f64 {
    assert!(upper_tail > 0.0 && upper_tail < 1.0, "tail probability out of range");
    if upper_tail > 0.5 {
        return -student_t_critical(1.0 - upper_tail, df);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while student_t_sf(hi, df) > upper_tail {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if student_t_sf(mid, df) > upper_tail {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Student's two-sample t-test with pooled variance.
pub fn t_test_two_sample(a: &SampleSummary, b: &SampleSummary) -> TTestReport {
    t_test_two_sample_with(a, b, VarianceModel::Pooled)
}

pub fn t_test_two_sample_with(a: &SampleSummary, b: &SampleSummary, model: VarianceModel) -> TTestReport {
    let (na, nb) = (a.n as f64, b.n as f64);
    let (se2, df) = match model {
        VarianceModel::Pooled => {
            let df = na + nb - 2.0;
            let pooled = ((na - 1.0) * a.variance() + (nb - 1.0) * b.variance()) / df;
            (pooled * (1.0 / na + 1.0 / nb), df)
        }
        VarianceModel::Welch => {
            let (qa, qb) = (a.variance() / na, b.variance() / nb);
            let se2 = qa + qb;
            let denom = qa * qa / (na - 1.0) + qb * qb / (nb - 1.0);
            let df = if denom > 0.0 { se2 * se2 / denom } else { na + nb - 2.0 };
            (se2, df)
        }
    };
    let diff = a.mean - b.mean;
    let t_stat = if se2 > 0.0 {
        diff / se2.sqrt()
    } else if diff == 0.0 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    };
    let p_one_tail = student_t_sf(t_stat.abs(), df);
    TTestReport {
        t_stat,
        df,
        p_one_tail,
        p_two_tail: (2.0 * p_one_tail).min(1.0),
        t_crit_one: student_t_critical(SIGNIFICANCE, df),
        t_crit_two: student_t_critical(SIGNIFICANCE / 2.0, df),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McNemarReport {
    /// Discordant pairs where the original set did better.
    pub b: u64,
    /// Discordant pairs where the refined set did better.
    pub c: u64,
    pub z: f64,
}

/// Continuity-corrected McNemar z, `max(|b - c| - 1, 0) / sqrt(b + c)`.
pub fn mcnemar(b: u64, c: u64) -> McNemarReport {
    let total = b + c;
    let z = if total == 0 {
        0.0
    } else {
        let num = (b.abs_diff(c) as f64 - 1.0).max(0.0);
        num / (total as f64).sqrt()
    };
    McNemarReport { b, c, z }
}

/// Counts discordant pairs: `b` where the original error is lower by more
/// than `tie_epsilon`, `c` where the refined error is. Ties go to neither.
pub fn paired_outcomes(errors_original: &[f64], errors_refined: &[f64], tie_epsilon: f64) -> Result<(u64, u64)> {
    if errors_original.len() != errors_refined.len() {
        return Err(Error::InvalidArgument(format!(
            "paired samples differ in length: {} vs {}",
            errors_original.len(),
            errors_refined.len()
        )));
    }
    let mut b = 0;
    let mut c = 0;
    for (&o, &r) in errors_original.iter().zip(errors_refined) {
        if o < r - tie_epsilon {
            b += 1;
        } else if r < o - tie_epsilon {
            c += 1;
        }
    }
    Ok((b, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn s(mean: f64, sd: f64, n: usize) -> SampleSummary {
        SampleSummary::new(mean, sd, n).unwrap()
    }

    #[test]
    fn coverage_table() {
        let r = t_test_two_sample(&s(3897.1002, 1880.8933, 520), &s(2783.8826, 1492.5160, 520));
        assert!((r.t_stat - 10.5723).abs() < 1e-3, "{}", r.t_stat);
        assert_eq!(r.df, 1038.0);
        assert!((r.t_crit_one - 1.6464).abs() < 5e-4);
        assert!((r.t_crit_two - 1.9624).abs() < 5e-4);
        assert!(r.p_one_tail < 1e-20);
        assert!(r.p_one_tail > 0.0);
    }

    #[test]
    fn homography_table() {
        let r = t_test_two_sample(&s(4.4531, 1.6769, 288), &s(4.4933, 1.6807, 288));
        assert!(r.t_stat < 0.0);
        assert!((r.t_stat.abs() - 0.2875).abs() < 1e-3, "{}", r.t_stat);
        assert!((r.p_two_tail - 0.7739).abs() < 2e-3);
        assert!((r.p_one_tail - 0.3869).abs() < 1e-3);
        assert!((r.t_crit_one - 1.6475).abs() < 5e-4);
        assert!((r.t_crit_two - 1.9641).abs() < 5e-4);
    }

    #[test]
    fn identical_summaries() {
        let r = t_test_two_sample(&s(5.0, 2.0, 10), &s(5.0, 2.0, 10));
        assert_eq!(r.t_stat, 0.0);
        assert_eq!(r.p_two_tail, 1.0);
    }

    #[test]
    fn zero_variance() {
        let r = t_test_two_sample(&s(5.0, 0.0, 10), &s(5.0, 0.0, 10));
        assert_eq!(r.t_stat, 0.0);
        let r = t_test_two_sample(&s(5.0, 0.0, 10), &s(4.0, 0.0, 10));
        assert_eq!(r.t_stat, f64::INFINITY);
        assert_eq!(r.p_one_tail, 0.0);
    }

    #[test]
    fn welch_matches_pooled_for_balanced_equal_sd() {
        let a = s(1.0, 2.0, 30);
        let b = s(2.0, 2.0, 30);
        let p = t_test_two_sample(&a, &b);
        let w = t_test_two_sample_with(&a, &b, VarianceModel::Welch);
        assert_relative_eq!(p.t_stat, w.t_stat, epsilon = 1e-12);
        assert_relative_eq!(w.df, 58.0, epsilon = 1e-9);
    }

    #[test]
    fn critical_values_table() {
        assert_relative_eq!(student_t_critical(0.05, 1.0), 6.314, epsilon = 1e-3);
        assert_relative_eq!(student_t_critical(0.025, 10.0), 2.228, epsilon = 1e-3);
        assert_relative_eq!(student_t_critical(0.95, 10.0), -1.812, epsilon = 1e-3);
        assert!((student_t_critical(0.05, 1038.0) - 1.6464).abs() < 5e-4);
        assert!((student_t_critical(0.025, 574.0) - 1.9641).abs() < 5e-4);
    }

    #[test]
    fn summary_from_samples() {
        let x = s(0.0, 0.0, 2);
        assert_eq!(x.n, 2);
        let r = SampleSummary::from_samples(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_relative_eq!(r.mean, 2.5);
        assert_relative_eq!(r.sd, (5.0f64 / 3.0).sqrt());
        assert!(SampleSummary::from_samples(&[1.0]).is_err());
        assert!(SampleSummary::new(0.0, -1.0, 5).is_err());
    }

    #[test]
    fn mcnemar_examples() {
        assert_eq!(mcnemar(7, 7).z, 0.0);
        assert_relative_eq!(mcnemar(10, 0).z, 9.0 / 10f64.sqrt());
        assert_relative_eq!(mcnemar(10, 0).z, 2.8460, epsilon = 1e-4);
        assert_relative_eq!(mcnemar(8, 3).z, 1.2060, epsilon = 1e-4);
        assert_eq!(mcnemar(0, 0).z, 0.0);
        assert_eq!(mcnemar(1, 0).z, 0.0);
    }

    #[test]
    fn paired_outcome_examples() {
        assert_eq!(paired_outcomes(&[1.0, 2.0], &[1.0, 2.0], 0.0).unwrap(), (0, 0));
        assert_eq!(paired_outcomes(&[1.0, 1.0, 1.0], &[2.0, 2.0, 0.0], 0.0).unwrap(), (2, 1));
        assert_eq!(paired_outcomes(&[1.0, 2.0], &[1.05, 1.96], 0.1).unwrap(), (0, 0));
        assert!(paired_outcomes(&[1.0], &[1.0, 2.0], 0.0).is_err());
    }

    proptest! {
        #[test]
        fn t_test_antisymmetric(
            ma in -100.0..100.0f64, sa in 0.1..50.0f64, na in 2usize..500,
            mb in -100.0..100.0f64, sb in 0.1..50.0f64, nb in 2usize..500,
        ) {
            let (a, b) = (s(ma, sa, na), s(mb, sb, nb));
            let ab = t_test_two_sample(&a, &b);
            let ba = t_test_two_sample(&b, &a);
            prop_assert_eq!(ab.t_stat, -ba.t_stat);
            prop_assert_eq!(ab.p_one_tail, ba.p_one_tail);
            prop_assert_eq!(ab.p_two_tail, ba.p_two_tail);
            prop_assert!(ab.t_crit_two > ab.t_crit_one && ab.t_crit_one > 0.0);
            prop_assert!((0.0..=1.0).contains(&ab.p_two_tail));
        }

        #[test]
        fn mcnemar_symmetric(b in 0u64..10_000, c in 0u64..10_000) {
            prop_assert_eq!(mcnemar(b, c).z, mcnemar(c, b).z);
            prop_assert!(mcnemar(b, c).z >= 0.0);
        }
    }
}
