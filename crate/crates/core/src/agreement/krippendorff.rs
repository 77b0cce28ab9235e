use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::RatingsMatrix;
use crate::error::{Error, Result};

/// Scale of the rated values, selecting the difference function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasurementLevel {
    Nominal,
    Ordinal,
    #[default]
    Interval,
}

impl MeasurementLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            MeasurementLevel::Nominal => "nominal",
            MeasurementLevel::Ordinal => "ordinal",
            MeasurementLevel::Interval => "interval",
        }
    }
}

impl fmt::Display for MeasurementLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeasurementLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nominal" => Ok(MeasurementLevel::Nominal),
            "ordinal" => Ok(MeasurementLevel::Ordinal),
            "interval" => Ok(MeasurementLevel::Interval),
            other => Err(Error::InvalidParameter(format!(
                "unknown measurement level {other:?}"
            ))),
        }
    }
}

/// Value-by-value coincidences of pairable ratings.
///
/// Only items with at least two ratings contribute. Every ordered pair of
/// ratings `(c, k)` from different raters within an item of `m` ratings adds
/// `1 / (m - 1)` to cell `(c, k)`.
struct CoincidenceMatrix {
    values: Vec<f64>,
    cells: BTreeMap<(usize, usize), f64>,
    marginals: Vec<f64>,
    total: f64,
}

impl CoincidenceMatrix {
    fn build(matrix: &RatingsMatrix) -> Self {
        let mut values: Vec<f64> = (0..matrix.items())
            .filter(|&i| matrix.item(i).count() >= 2)
            .flat_map(|i| matrix.item(i))
            .collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        let index = |v: f64| {
            values
                .binary_search_by(|x| x.total_cmp(&v))
                .expect("value was collected")
        };

        let mut cells: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for i in 0..matrix.items() {
            let m = matrix.item(i).count();
            if m < 2 {
                continue;
            }
            let ratings: Vec<usize> = matrix.item(i).map(index).collect();
            let weight = 1.0 / (m - 1) as f64;
            for (a, &c) in ratings.iter().enumerate() {
                for (b, &k) in ratings.iter().enumerate() {
                    if a != b {
                        *cells.entry((c, k)).or_default() += weight;
                    }
                }
            }
        }
        let mut marginals = vec![0.0; values.len()];
        for (&(c, _), &o) in &cells {
            marginals[c] += o;
        }
        let total = marginals.iter().sum();
        Self {
            values,
            cells,
            marginals,
            total,
        }
    }
}

/// Squared difference function over category indices.
struct Metric<'a> {
    level: MeasurementLevel,
    values: &'a [f64],
    /// cumulative[i] = sum of marginals below category i
    cumulative: Vec<f64>,
    marginals: &'a [f64],
}

impl<'a> Metric<'a> {
    fn new(level: MeasurementLevel, cm: &'a CoincidenceMatrix) -> Self {
        let mut cumulative = Vec::with_capacity(cm.marginals.len() + 1);
        cumulative.push(0.0);
        for n in &cm.marginals {
            cumulative.push(cumulative[cumulative.len() - 1] + n);
        }
        Self {
            level,
            values: &cm.values,
            cumulative,
            marginals: &cm.marginals,
        }
    }

    fn delta2(&self, c: usize, k: usize) -> f64 {
        match self.level {
            MeasurementLevel::Nominal => {
                if c == k {
                    0.0
                } else {
                    1.0
                }
            }
            MeasurementLevel::Ordinal => {
                let (lo, hi) = if c <= k { (c, k) } else { (k, c) };
                let span = self.cumulative[hi + 1] - self.cumulative[lo];
                (span - (self.marginals[lo] + self.marginals[hi]) / 2.0).powi(2)
            }
            MeasurementLevel::Interval => (self.values[c] - self.values[k]).powi(2),
        }
    }

    /// `Σ_c Σ_k n_c n_k δ²(c, k)`.
    fn expected_sum(&self, total: f64) -> f64 {
        let n = self.marginals;
        match self.level {
            MeasurementLevel::Nominal => total * total - n.iter().map(|x| x * x).sum::<f64>(),
            MeasurementLevel::Interval => {
                let mean = n.iter().zip(self.values).map(|(c, v)| c * v).sum::<f64>() / total;
                2.0 * total
                    * n.iter()
                        .zip(self.values)
                        .map(|(c, v)| c * (v - mean).powi(2))
                        .sum::<f64>()
            }
            MeasurementLevel::Ordinal => {
                let mut sum = 0.0;
                for c in 0..n.len() {
                    for k in (c + 1)..n.len() {
                        sum += 2.0 * n[c] * n[k] * self.delta2(c, k);
                    }
                }
                sum
            }
        }
    }
}

/// Krippendorff's α = 1 - D_o / D_e over the coincidence matrix.
///
/// Missing cells are allowed; items with fewer than two ratings are not
/// pairable and are skipped.
pub fn krippendorff_alpha(matrix: &RatingsMatrix, level: MeasurementLevel) -> Result<f64> {
    let cm = CoincidenceMatrix::build(matrix);
    let n = cm.total;
    if n < 2.0 {
        return Err(Error::InsufficientData(format!(
            "{n} pairable values, need at least 2"
        )));
    }
    let metric = Metric::new(level, &cm);
    let observed = cm
        .cells
        .iter()
        .map(|(&(c, k), &o)| o * metric.delta2(c, k))
        .sum::<f64>()
        / n;
    let expected = metric.expected_sum(n) / (n * (n - 1.0));
    if expected <= 0.0 {
        return Err(Error::UndefinedAlpha(
            "expected disagreement is zero (all pairable values equal)".into(),
        ));
    }
    Ok(1.0 - observed / expected)
}
