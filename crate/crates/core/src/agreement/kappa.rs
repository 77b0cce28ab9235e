use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Cohen's κ between two categorical sequences.
///
/// `κ = (p_o - p_e) / (1 - p_e)`. When `p_e = 1` both sequences are the same
/// single category, and κ is defined as 1.
pub fn cohens_kappa<T: Ord + Copy>(a: &[T], b: &[T]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!(
            "sequences have {} and {} items",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::TooShort { needed: 1, got: 0 });
    }
    let n = a.len() as f64;
    let mut marginals: BTreeMap<T, (usize, usize)> = BTreeMap::new();
    let mut agreements = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        marginals.entry(x).or_default().0 += 1;
        marginals.entry(y).or_default().1 += 1;
        if x == y {
            agreements += 1;
        }
    }
    let observed = agreements as f64 / n;
    let expected: f64 = marginals
        .values()
        .map(|&(ca, cb)| (ca as f64 / n) * (cb as f64 / n))
        .sum();
    if expected >= 1.0 {
        return Ok(1.0);
    }
    Ok((observed - expected) / (1.0 - expected))
}
