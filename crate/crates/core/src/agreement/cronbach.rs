use super::RatingsMatrix;
use crate::error::{Error, Result};

/// Cronbach's α with raters as test items and columns as observations.
///
/// `α = r/(r-1) * (1 - Σ var_rater / var_total)`, with sample variances
/// (denominator `n - 1`) and `var_total` the variance of per-column sums.
pub fn cronbach_alpha(matrix: &RatingsMatrix) -> Result<f64> {
    if matrix.has_missing() {
        return Err(Error::MissingData(
            "Cronbach's alpha needs a complete matrix".into(),
        ));
    }
    let rows: Vec<Vec<f64>> = matrix
        .rows()
        .iter()
        .map(|r| r.iter().map(|v| v.expect("checked complete")).collect())
        .collect();
    let raters = rows.len() as f64;
    let sums: Vec<f64> = (0..matrix.items())
        .map(|i| rows.iter().map(|r| r[i]).sum())
        .collect();
    let total_variance = sample_variance(&sums);
    if total_variance <= 0.0 {
        return Err(Error::UndefinedAlpha(
            "per-observation sums have zero variance".into(),
        ));
    }
    let rater_variance: f64 = rows.iter().map(|r| sample_variance(r)).sum();
    Ok(raters / (raters - 1.0) * (1.0 - rater_variance / total_variance))
}

fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_raters() {
        let m = RatingsMatrix::complete(vec![vec![0.0, 1.0, 3.0, 2.0]; 2]).unwrap();
        assert!((cronbach_alpha(&m).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn anti_correlated_raters_are_undefined() {
        let m = RatingsMatrix::complete(vec![vec![0.0, 1.0, 2.0, 3.0], vec![3.0, 2.0, 1.0, 0.0]])
            .unwrap();
        assert_eq!(cronbach_alpha(&m).unwrap_err().kind(), "undefined_alpha");
    }

    #[test]
    fn missing_cells_are_rejected() {
        let m = RatingsMatrix::new(vec![
            vec![Some(1.0), Some(2.0), None],
            vec![Some(1.0), Some(3.0), Some(2.0)],
        ])
        .unwrap();
        assert_eq!(cronbach_alpha(&m).unwrap_err().kind(), "missing_data");
    }
}
