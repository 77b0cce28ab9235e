use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{diff_signs_of, SampledSignal};

/// How sign agreement is turned into a score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SdaVariant {
    /// Mean of `sign(Δa) * sign(Δb)`; a flat step in either signal scores 0.
    #[default]
    Product,
    /// `(agreements - disagreements) / (T - 1)`, where a step agrees only when
    /// both signals move in the same direction and anything else, flats
    /// included, disagrees.
    Indicator,
}

impl SdaVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            SdaVariant::Product => "product",
            SdaVariant::Indicator => "indicator",
        }
    }
}

impl fmt::Display for SdaVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SdaVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "product" => Ok(SdaVariant::Product),
            "indicator" => Ok(SdaVariant::Indicator),
            other => Err(Error::InvalidParameter(format!(
                "unknown SDA variant {other:?} (expected product or indicator)"
            ))),
        }
    }
}

/// Signed differential agreement, product form.
pub fn sda(a: &[f64], b: &[f64]) -> Result<f64> {
    sda_with(a, b, SdaVariant::Product)
}

pub fn sda_with(a: &[f64], b: &[f64], variant: SdaVariant) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!(
            "signals have {} and {} samples",
            a.len(),
            b.len()
        )));
    }
    let da = diff_signs_of(a)?;
    let db = diff_signs_of(b)?;
    let total: i64 = match variant {
        SdaVariant::Product => da.iter().zip(&db).map(|(x, y)| (x * y) as i64).sum(),
        SdaVariant::Indicator => da
            .iter()
            .zip(&db)
            .map(|(&x, &y)| if x != 0 && x == y { 1 } else { -1 })
            .sum(),
    };
    Ok(total as f64 / da.len() as f64)
}

/// [`sda_with`] on two signals sharing a sample rate.
pub fn sda_signals(a: &SampledSignal, b: &SampledSignal, variant: SdaVariant) -> Result<f64> {
    if a.sample_rate_hz() != b.sample_rate_hz() {
        return Err(Error::Shape(format!(
            "signals sampled at {} Hz and {} Hz",
            a.sample_rate_hz(),
            b.sample_rate_hz()
        )));
    }
    sda_with(a.values(), b.values(), variant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn perfect_agreement() {
        assert_eq!(sda(&[0.0, 1.0, 2.0, 3.0], &[0.0, 1.0, 2.0, 3.0]).unwrap(), 1.0);
    }

    #[test]
    fn perfect_disagreement() {
        assert_eq!(sda(&[0.0, 1.0, 2.0], &[2.0, 1.0, 0.0]).unwrap(), -1.0);
    }

    #[test]
    fn constant_signal_scores_zero() {
        assert_eq!(sda(&[4.0; 5], &[0.0, 3.0, 1.0, 2.0, 9.0]).unwrap(), 0.0);
    }

    #[test]
    fn hand_enumerated_value() {
        // (+1)(+1) + (0)(-1) + (+1)(+1) = 2 over 3 steps
        let v = sda(&[0.0, 1.0, 1.0, 2.0], &[0.0, 1.0, 0.0, 2.0]).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn indicator_variant_counts_flats_as_disagreement() {
        // agree, disagree (flat vs fall), agree
        let v = sda_with(&[0.0, 1.0, 1.0, 2.0], &[0.0, 1.0, 0.0, 2.0], SdaVariant::Indicator)
            .unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        let v = sda_with(&[1.0; 4], &[1.0; 4], SdaVariant::Indicator).unwrap();
        assert_eq!(v, -1.0);
    }

    #[test]
    fn errors() {
        assert_eq!(sda(&[0.0, 1.0], &[0.0]).unwrap_err().kind(), "shape");
        assert_eq!(sda(&[0.0], &[1.0]).unwrap_err().kind(), "too_short");
        let a = SampledSignal::new(0, 10.0, vec![0.0, 1.0]).unwrap();
        let b = SampledSignal::new(0, 5.0, vec![0.0, 1.0]).unwrap();
        assert_eq!(sda_signals(&a, &b, SdaVariant::Product).unwrap_err().kind(), "shape");
    }

    #[test]
    fn variant_parsing() {
        assert_eq!("indicator".parse::<SdaVariant>().unwrap(), SdaVariant::Indicator);
        assert!("mean".parse::<SdaVariant>().is_err());
    }

    proptest! {
        #[test]
        fn symmetric_and_bounded(
            pair in (2usize..50).prop_flat_map(|n| (
                prop::collection::vec(-5i8..5, n),
                prop::collection::vec(-5i8..5, n),
            ))
        ) {
            let a: Vec<f64> = pair.0.iter().map(|&x| x as f64).collect();
            let b: Vec<f64> = pair.1.iter().map(|&x| x as f64).collect();
            for variant in [SdaVariant::Product, SdaVariant::Indicator] {
                let ab = sda_with(&a, &b, variant).unwrap();
                prop_assert_eq!(ab, sda_with(&b, &a, variant).unwrap());
                prop_assert!((-1.0..=1.0).contains(&ab));
            }
        }
    }
}
