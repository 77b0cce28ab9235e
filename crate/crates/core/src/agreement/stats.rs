use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// z-score of a two-sided 95% normal interval.
pub const CI_Z: f64 = 1.96;

/// Mean with a normal-approximation 95% interval, `1.96 * sd / sqrt(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanCi {
    pub mean: f64,
    /// Sample standard deviation (denominator `n - 1`, 0 when `n == 1`).
    pub sd: f64,
    pub half_width: f64,
    pub n: usize,
}

pub fn mean_ci(values: &[f64]) -> Result<MeanCi> {
    if values.is_empty() {
        return Err(Error::InsufficientData("no values to summarize".into()));
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(MeanCi {
        mean,
        sd,
        half_width: CI_Z * sd / (n as f64).sqrt(),
        n,
    })
}

/// Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!(
            "samples have {} and {} values",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: x.len(),
        });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::UndefinedCorrelation(
            "one of the samples has zero variance".into(),
        ));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Result of a two-sided t-test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub t: f64,
    pub p: f64,
    pub df: f64,
}

/// Paired t-test on `a - b`, or Welch's unequal-variance test when
/// `paired` is false. The p-value is two-sided.
pub fn t_test(a: &[f64], b: &[f64], paired: bool) -> Result<TTest> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: a.len().min(b.len()),
        });
    }
    let (mean_diff, se2, df) = if paired {
        if a.len() != b.len() {
            return Err(Error::Shape(format!(
                "paired samples have {} and {} values",
                a.len(),
                b.len()
            )));
        }
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        let (m, v) = mean_var(&d);
        let n = d.len() as f64;
        (m, v / n, n - 1.0)
    } else {
        let (ma, va) = mean_var(a);
        let (mb, vb) = mean_var(b);
        let (na, nb) = (a.len() as f64, b.len() as f64);
        let (qa, qb) = (va / na, vb / nb);
        let se2 = qa + qb;
        let df = if se2 > 0.0 {
            se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0))
        } else {
            na + nb - 2.0
        };
        (ma - mb, se2, df)
    };
    if se2 <= 0.0 {
        if mean_diff == 0.0 {
            return Ok(TTest { t: 0.0, p: 1.0, df });
        }
        return Err(Error::UndefinedTest(
            "differences have zero variance".into(),
        ));
    }
    let t = mean_diff / se2.sqrt();
    Ok(TTest {
        t,
        p: two_sided_p(t, df),
        df,
    })
}

fn two_sided_p(t: f64, df: f64) -> f64 {
    let dist = StudentsT::new(0.0, 1.0, df).expect("df is positive");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

fn mean_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pearson_extremes() {
        let x = [1.0, 2.0, 5.0, 3.0];
        assert!((pearson(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        let y: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &y).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn pearson_longhand() {
        // means 2 and 7/3; Sxy = 3, Sxx = 2, Syy = 14/3
        let expected = 3.0 / (2.0f64 * 14.0 / 3.0).sqrt();
        let r = pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0, 4.0]).unwrap();
        assert!((r - expected).abs() < 1e-15);
    }

    #[test]
    fn pearson_zero_variance() {
        assert_eq!(
            pearson(&[1.0, 1.0], &[1.0, 2.0]).unwrap_err().kind(),
            "undefined_correlation"
        );
    }

    #[test]
    fn identical_paired_samples() {
        let a = [0.1, 0.4, 0.3];
        let r = t_test(&a, &a, true).unwrap();
        assert_eq!((r.t, r.p), (0.0, 1.0));
    }

    #[test]
    fn constant_difference_is_undefined() {
        let a = [1.0, 2.0, 3.0];
        let b = [0.0, 1.0, 2.0];
        assert_eq!(t_test(&a, &b, true).unwrap_err().kind(), "undefined_test");
    }

    #[test]
    fn known_paired_value() {
        // d = [1, 2, 3]: mean 2, sd 1, t = 2 / (1 / sqrt 3) = 2 sqrt 3, df 2
        let r = t_test(&[2.0, 4.0, 6.0], &[1.0, 2.0, 3.0], true).unwrap();
        assert!((r.t - 2.0 * 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.df, 2.0);
        // two-sided p for t with 2 df: 1 - t / sqrt(t^2 + 2)
        let expected = 1.0 - r.t / (r.t * r.t + 2.0).sqrt();
        assert!((r.p - expected).abs() < 1e-12);
    }

    #[test]
    fn mean_ci_convention() {
        let ci = mean_ci(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(ci.mean, 2.5);
        let sd = (5.0f64 / 3.0).sqrt();
        assert!((ci.sd - sd).abs() < 1e-15);
        assert!((ci.half_width - 1.96 * sd / 2.0).abs() < 1e-15);
        let one = mean_ci(&[0.7]).unwrap();
        assert_eq!((one.sd, one.half_width), (0.0, 0.0));
    }
}
