//! Validated logit/label datasets.

use crate::error::{Error, Result};
use crate::softmax::{predict_unchecked, Prediction};

/// An `N x C` matrix of finite logits with optional class labels.
///
/// Only constructible through [`validate_dataset`], so every instance
/// upholds: `N >= 1`, `C >= 2`, all logits finite, all labels `< C`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitDataset {
    logits: Vec<f64>,
    rows: usize,
    num_classes: usize,
    labels: Option<Vec<usize>>,
    pub name: String,
}

/// Checks raw row-major logits and labels and builds a [`LogitDataset`].
pub fn validate_dataset(
    logits: Vec<f64>,
    rows: usize,
    cols: usize,
    labels: Option<&[i64]>,
) -> Result<LogitDataset> {
    if rows == 0 {
        return Err(Error::ShapeMismatch("dataset has no rows".into()));
    }
    if cols < 2 {
        return Err(Error::ShapeMismatch(format!(
            "need at least 2 classes, got {cols}"
        )));
    }
    if logits.len() != rows * cols {
        return Err(Error::ShapeMismatch(format!(
            "{} values do not fill a {rows}x{cols} matrix",
            logits.len()
        )));
    }
    if let Some(i) = logits.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            row: i / cols,
            col: i % cols,
        });
    }
    let labels = match labels {
        None => None,
        Some(raw) => {
            if raw.len() != rows {
                return Err(Error::ShapeMismatch(format!(
                    "{} labels for {rows} rows",
                    raw.len()
                )));
            }
            let mut out = Vec::with_capacity(rows);
            for (row, &label) in raw.iter().enumerate() {
                if label < 0 || label as u64 >= cols as u64 {
                    return Err(Error::LabelOutOfRange {
                        row,
                        label,
                        classes: cols,
                    });
                }
                out.push(label as usize);
            }
            Some(out)
        }
    };
    Ok(LogitDataset {
        logits,
        rows,
        num_classes: cols,
        labels,
        name: String::new(),
    })
}

impl LogitDataset {
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn len(&self) -> usize {
        self.rows
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.logits[i * self.num_classes..(i + 1) * self.num_classes]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.logits.chunks_exact(self.num_classes)
    }

    /// Row-major logits.
    pub fn logits(&self) -> &[f64] {
        &self.logits
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn require_labels(&self) -> Result<&[usize]> {
        self.labels().ok_or(Error::MissingLabels)
    }

    pub fn predictions(&self) -> Vec<Prediction> {
        self.rows().map(predict_unchecked).collect()
    }

    /// Per-row `top_class == label`.
    pub fn correctness(&self) -> Result<Vec<bool>> {
        let labels = self.require_labels()?;
        Ok(self
            .rows()
            .zip(labels)
            .map(|(z, &y)| crate::softmax::argmax(z) == y)
            .collect())
    }

    /// Copy with every logit multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<LogitDataset> {
        let logits = self.logits.iter().map(|v| v * factor).collect();
        let labels: Option<Vec<i64>> = self
            .labels
            .as_ref()
            .map(|l| l.iter().map(|&v| v as i64).collect());
        Ok(
            validate_dataset(logits, self.rows, self.num_classes, labels.as_deref())?
                .with_name(self.name.clone()),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix() -> Vec<f64> {
        (0..12).map(|v| v as f64 * 0.5).collect()
    }

    #[test]
    fn accepts_valid_labels() {
        let ds = validate_dataset(matrix(), 3, 4, Some(&[0, 3, 1])).unwrap();
        assert_eq!(ds.num_classes(), 4);
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.labels(), Some(&[0usize, 3, 1][..]));
        assert_eq!(ds.row(1), &[2.0, 2.5, 3.0, 3.5]);
    }

    #[test]
    fn rejects_out_of_range_label() {
        match validate_dataset(matrix(), 3, 4, Some(&[0, 4, 1])) {
            Err(Error::LabelOutOfRange { row, label, .. }) => {
                assert_eq!((row, label), (1, 4));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            validate_dataset(matrix(), 3, 4, Some(&[0, -1, 1])),
            Err(Error::LabelOutOfRange { row: 1, .. })
        ));
    }

    #[test]
    fn rejects_non_finite_with_position() {
        let mut m = matrix();
        m[8] = f64::NAN;
        match validate_dataset(m, 3, 4, None) {
            Err(Error::NonFinite { row, col }) => assert_eq!((row, col), (2, 0)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            validate_dataset(matrix(), 3, 4, Some(&[0, 1])),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            validate_dataset(vec![], 0, 4, None),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            validate_dataset(vec![1.0, 2.0], 2, 1, None),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            validate_dataset(matrix(), 4, 4, None),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn correctness_needs_labels() {
        let ds = validate_dataset(vec![2.0, 1.0, 0.0, 3.0], 2, 2, None).unwrap();
        assert!(matches!(ds.correctness(), Err(Error::MissingLabels)));
        let ds = validate_dataset(vec![2.0, 1.0, 0.0, 3.0], 2, 2, Some(&[0, 0])).unwrap();
        assert_eq!(ds.correctness().unwrap(), vec![true, false]);
    }
}
