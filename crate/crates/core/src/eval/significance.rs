use std::fmt;

use crate::error::{Error, Result};

use super::special::{chi_squared_1_upper, student_t_two_tailed};

pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

/// Above this many discordant pairs McNemar switches from the exact binomial
/// to the continuity-corrected χ² approximation.
pub const MCNEMAR_EXACT_LIMIT: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    Welch,
    McNemar,
}

impl TestKind {
    pub fn id(self) -> &'static str {
        match self {
            TestKind::Welch => "welch",
            TestKind::McNemar => "mcnemar",
        }
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignificanceReport {
    pub dataset: String,
    pub model_a: String,
    pub model_b: String,
    pub test: TestKind,
    pub statistic: f64,
    /// Welch–Satterthwaite degrees of freedom; `None` for McNemar.
    pub degrees_of_freedom: Option<f64>,
    pub p_value: f64,
    pub reject_at_05: bool,
}

impl SignificanceReport {
    fn new(test: TestKind, statistic: f64, degrees_of_freedom: Option<f64>, p_value: f64) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        Self {
            dataset: String::new(),
            model_a: String::new(),
            model_b: String::new(),
            test,
            statistic,
            degrees_of_freedom,
            p_value,
            reject_at_05: p_value < SIGNIFICANCE_LEVEL,
        }
    }

    pub fn labeled(mut self, dataset: &str, model_a: &str, model_b: &str) -> Self {
        self.dataset = dataset.to_owned();
        self.model_a = model_a.to_owned();
        self.model_b = model_b.to_owned();
        self
    }
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Welch's unequal-variance t-test, two-tailed.
pub fn welch_t_test_two_tailed(sample_a: &[f64], sample_b: &[f64]) -> Result<SignificanceReport> {
    if sample_a.len() < 2 || sample_b.len() < 2 {
        return Err(Error::Config(format!(
            "Welch test needs at least 2 values per sample, got {} and {}",
            sample_a.len(),
            sample_b.len()
        )));
    }
    let (ma, va) = mean_var(sample_a);
    let (mb, vb) = mean_var(sample_b);
    let sa = va / sample_a.len() as f64;
    let sb = vb / sample_b.len() as f64;
    let se2 = sa + sb;
    if se2 == 0.0 {
        // both samples constant
        return Ok(if ma == mb {
            SignificanceReport::new(TestKind::Welch, 0.0, None, 1.0)
        } else {
            let t = f64::INFINITY.copysign(ma - mb);
            SignificanceReport::new(TestKind::Welch, t, None, 0.0)
        });
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2
        / (sa * sa / (sample_a.len() - 1) as f64 + sb * sb / (sample_b.len() - 1) as f64);
    Ok(SignificanceReport::new(TestKind::Welch, t, Some(df), student_t_two_tailed(t, df)))
}

/// Discordant counts `(a right & b wrong, a wrong & b right)`.
pub fn discordant_counts(preds_a: &[u8], preds_b: &[u8], labels: &[u8]) -> Result<(usize, usize)> {
    if preds_a.len() != labels.len() || preds_b.len() != labels.len() {
        return Err(Error::Dimension {
            expected: labels.len(),
            got: if preds_a.len() != labels.len() { preds_a.len() } else { preds_b.len() },
        });
    }
    let mut only_a = 0;
    let mut only_b = 0;
    for ((a, b), y) in preds_a.iter().zip(preds_b).zip(labels) {
        match (a == y, b == y) {
            (true, false) => only_a += 1,
            (false, true) => only_b += 1,
            _ => {}
        }
    }
    Ok((only_a, only_b))
}

/// Paired McNemar test on two prediction vectors.
pub fn mcnemar_test(preds_a: &[u8], preds_b: &[u8], labels: &[u8]) -> Result<SignificanceReport> {
    let (b, c) = discordant_counts(preds_a, preds_b, labels)?;
    Ok(mcnemar_from_counts(b, c))
}

pub fn mcnemar_from_counts(b: usize, c: usize) -> SignificanceReport {
    let d = b + c;
    if d == 0 {
        return SignificanceReport::new(TestKind::McNemar, 0.0, None, 1.0);
    }
    if d > MCNEMAR_EXACT_LIMIT {
        let diff = (b as f64 - c as f64).abs() - 1.0;
        let stat = diff.max(0.0).powi(2) / d as f64;
        return SignificanceReport::new(TestKind::McNemar, stat, None, chi_squared_1_upper(stat));
    }
    // exact two-tailed binomial with success probability 1/2
    let k = b.min(c);
    let mut coef = 1.0f64;
    let mut tail = 0.0;
    for j in 0..=k {
        if j > 0 {
            coef *= (d - j + 1) as f64 / j as f64;
        }
        tail += coef;
    }
    let p = (2.0 * tail * 0.5f64.powi(d as i32)).min(1.0);
    SignificanceReport::new(TestKind::McNemar, k as f64, None, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn identical_samples_give_one() {
        let a = [0.8, 0.82, 0.79];
        let r = welch_t_test_two_tailed(&a, &a).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        assert!(!r.reject_at_05);
    }

    #[test]
    fn constant_equal_samples_give_one() {
        let r = welch_t_test_two_tailed(&[0.5, 0.5], &[0.5, 0.5, 0.5]).unwrap();
        assert_eq!(r.p_value, 1.0);
        let r = welch_t_test_two_tailed(&[0.5, 0.5], &[0.6, 0.6]).unwrap();
        assert_eq!(r.p_value, 0.0);
    }

    #[test]
    fn welch_reference_values() {
        // frozen from an independent t-distribution implementation
        let r = welch_t_test_two_tailed(&[0.80, 0.81, 0.79], &[0.60, 0.61, 0.59]).unwrap();
        assert!(close(r.p_value, 1.648_308_898_718_124e-5, 1e-6), "{}", r.p_value);
        assert!(r.p_value < 0.001 && r.reject_at_05);

        let r = welch_t_test_two_tailed(&[0.81, 0.83, 0.80, 0.79], &[0.78, 0.80, 0.82]).unwrap();
        assert!(close(r.statistic, 0.522_232_967_867_106_6, 1e-10));
        assert!(close(r.degrees_of_freedom.unwrap(), 3.990_093_635_500_067, 1e-10));
        assert!((r.p_value - 0.629_159_591_081_730_3).abs() < 1e-8);

        let r = welch_t_test_two_tailed(&[1.0, 2.0, 3.5, 4.1, 2.2], &[2.5, 3.1, 3.9, 4.4, 5.0, 4.8])
            .unwrap();
        assert!(close(r.statistic, -2.030_911_059_006_549, 1e-10));
        assert!(close(r.degrees_of_freedom.unwrap(), 7.635_289_510_468_315, 1e-10));
        assert!((r.p_value - 0.078_437_352_881_925_73).abs() < 1e-8);
    }

    #[test]
    fn welch_is_symmetric() {
        let a = [0.80, 0.81, 0.79, 0.83];
        let b = [0.78, 0.60, 0.70];
        let ab = welch_t_test_two_tailed(&a, &b).unwrap();
        let ba = welch_t_test_two_tailed(&b, &a).unwrap();
        assert_eq!(ab.p_value, ba.p_value);
        assert_eq!(ab.statistic, -ba.statistic);
    }

    #[test]
    fn welch_needs_two_values() {
        assert!(welch_t_test_two_tailed(&[0.5], &[0.5, 0.6]).is_err());
    }

    #[test]
    fn mcnemar_reference_values() {
        let labels = vec![1u8; 20];
        let r = mcnemar_test(&labels, &[0u8; 20], &labels).unwrap();
        assert!(close(r.p_value, 1.907_348_632_812_5e-6, 1e-12));

        assert!(close(mcnemar_from_counts(3, 12).p_value, 0.035_156_25, 1e-12));
        assert!(close(mcnemar_from_counts(30, 10).p_value, 0.002_663_119_259_138_558, 1e-8));
    }

    #[test]
    fn mcnemar_trivial_cases() {
        let p = [1u8, 0, 1, 1, 0];
        let y = [1u8, 1, 0, 1, 0];
        assert_eq!(mcnemar_test(&p, &p, &y).unwrap().p_value, 1.0);
        assert_eq!(mcnemar_from_counts(5, 5).p_value, 1.0);
        assert_eq!(mcnemar_from_counts(40, 40).p_value, 1.0);
        assert!(mcnemar_test(&p, &p[..4], &y).is_err());
    }
}
