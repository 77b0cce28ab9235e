use crate::error::{Error, Result};

/// Ratings with one row per rater and one column per item. Cells may be
/// missing.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingsMatrix {
    rows: Vec<Vec<Option<f64>>>,
    items: usize,
}

impl RatingsMatrix {
    pub fn new(rows: Vec<Vec<Option<f64>>>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "need at least 2 raters, got {}",
                rows.len()
            )));
        }
        let items = rows[0].len();
        if let Some(r) = rows.iter().position(|r| r.len() != items) {
            return Err(Error::Shape(format!(
                "rater {r} has {} items, rater 0 has {items}",
                rows[r].len()
            )));
        }
        if items < 2 {
            return Err(Error::InsufficientData(format!(
                "need at least 2 items, got {items}"
            )));
        }
        if rows.iter().flatten().flatten().any(|v| !v.is_finite()) {
            return Err(Error::MalformedSignal("ratings must be finite".into()));
        }
        let matrix = Self { rows, items };
        if !(0..items).any(|i| matrix.item(i).count() >= 2) {
            return Err(Error::InsufficientData(
                "no item has two or more ratings".into(),
            ));
        }
        Ok(matrix)
    }

    /// A matrix without missing cells.
    pub fn complete(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(
            rows.into_iter()
                .map(|r| r.into_iter().map(Some).collect())
                .collect(),
        )
    }

    pub fn raters(&self) -> usize {
        self.rows.len()
    }

    pub fn items(&self) -> usize {
        self.items
    }

    pub fn rows(&self) -> &[Vec<Option<f64>>] {
        &self.rows
    }

    /// Non-missing ratings of one item.
    pub fn item(&self, index: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().filter_map(move |r| r[index])
    }

    pub fn has_missing(&self) -> bool {
        self.rows.iter().flatten().any(Option::is_none)
    }
}
