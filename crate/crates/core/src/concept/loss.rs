use std::collections::HashSet;

use crate::{Error, Result};

/// Loss `ℓ(y, ŷ) ∈ [0, 1]` over a finite label alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct LossFunction {
    labels: Vec<String>,
    table: Vec<Vec<f64>>,
    image: Vec<f64>,
    image_index: Vec<Vec<usize>>,
}

impl LossFunction {
    /// `table[y][ŷ]` is the loss of predicting `ŷ` when the label is `y`.
    pub fn new(labels: Vec<String>, table: Vec<Vec<f64>>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidLoss("empty label alphabet".into()));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::InvalidLoss(format!("duplicate label {dup}")));
        }
        let n = labels.len();
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidLoss(format!("table must be {n}x{n}")));
        }
        if let Some(bad) = table.iter().flatten().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidLoss(format!("value {bad} outside [0, 1]")));
        }
        let mut image: Vec<f64> = table.iter().flatten().copied().collect();
        image.sort_by(f64::total_cmp);
        image.dedup();
        let image_index = table
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| image.iter().position(|z| z == v).expect("value in image"))
                    .collect()
            })
            .collect();
        Ok(Self {
            labels,
            table,
            image,
            image_index,
        })
    }

    pub fn zero_one(labels: Vec<String>) -> Result<Self> {
        let n = labels.len();
        let table = (0..n)
            .map(|y| (0..n).map(|yh| if y == yh { 0.0 } else { 1.0 }).collect())
            .collect();
        Self::new(labels, table)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn table(&self) -> &[Vec<f64>] {
        &self.table
    }

    /// Sorted distinct loss values.
    pub fn image(&self) -> &[f64] {
        &self.image
    }

    pub fn value(&self, y: usize, predicted: usize) -> f64 {
        self.table[y][predicted]
    }

    /// Position of `ℓ(y, ŷ)` inside [`Self::image`].
    pub fn image_index(&self, y: usize, predicted: usize) -> usize {
        self.image_index[y][predicted]
    }

    /// Largest minus smallest loss value.
    pub fn range(&self) -> f64 {
        self.image[self.image.len() - 1] - self.image[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|k| k.to_string()).collect()
    }

    #[test]
    fn zero_one_image() {
        let l = LossFunction::zero_one(labels(3)).unwrap();
        assert_eq!(l.image(), &[0.0, 1.0]);
        assert_eq!(l.image_index(2, 1), 1);
        assert_eq!(l.image_index(1, 1), 0);
    }

    #[test]
    fn constant_loss_has_single_value() {
        let l = LossFunction::new(labels(2), vec![vec![0.0; 2]; 2]).unwrap();
        assert_eq!(l.image(), &[0.0]);
        assert_eq!(l.range(), 0.0);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(LossFunction::new(labels(2), vec![vec![0.0, 1.5], vec![0.0, 0.0]]).is_err());
        assert!(LossFunction::new(labels(2), vec![vec![0.0, f64::NAN], vec![0.0, 0.0]]).is_err());
        assert!(LossFunction::new(labels(2), vec![vec![0.0, 1.0]]).is_err());
        assert!(LossFunction::new(vec!["a".into(), "a".into()], vec![vec![0.0; 2]; 2]).is_err());
    }
}
