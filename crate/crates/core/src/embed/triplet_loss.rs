use serde::{Deserialize, Serialize};

use super::EmbedError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distance {
    Euclidean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pooling {
    Mean,
}

/// Fine-tuning settings shared with the sentence-encoder trainer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripletLossConfig {
    pub margin: f64,
    pub distance: Distance,
    pub pooling: Pooling,
    pub batch_size: usize,
    pub epochs: usize,
    pub validation_every: usize,
}

impl Default for TripletLossConfig {
    fn default() -> Self {
        Self {
            margin: 5.0,
            distance: Distance::Euclidean,
            pooling: Pooling::Mean,
            batch_size: 8,
            epochs: 1,
            validation_every: 1000,
        }
    }
}

impl TripletLossConfig {
    pub fn validate(&self) -> Result<(), EmbedError> {
        if !(self.margin > 0.0 && self.margin.is_finite()) {
            return Err(EmbedError::Parameter(format!("margin must be > 0, got {}", self.margin)));
        }
        if self.batch_size == 0 || self.epochs == 0 || self.validation_every == 0 {
            return Err(EmbedError::Parameter(
                "batch_size, epochs and validation_every must be positive".into(),
            ));
        }
        Ok(())
    }
}

pub fn euclidean<T: Scalar>(a: &[T], b: &[T]) -> Result<T, EmbedError> {
    if a.len() != b.len() {
        return Err(EmbedError::DimMismatch { left: a.len(), right: b.len() });
    }
    Ok(a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum::<T>().sqrt())
}

/// max(‖a − p‖ − ‖a − n‖ + margin, 0)
pub fn triplet_loss<T: Scalar>(anchor: &[T], positive: &[T], negative: &[T], margin: T) -> Result<T, EmbedError> {
    let d = euclidean(anchor, positive)? - euclidean(anchor, negative)? + margin;
    Ok(d.max(T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn defaults_and_validation() {
        let c = TripletLossConfig::default();
        assert_eq!((c.margin, c.batch_size, c.epochs, c.validation_every), (5.0, 8, 1, 1000));
        assert!(c.validate().is_ok());
        assert!(TripletLossConfig { margin: 0.0, ..c }.validate().is_err());
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains("\"distance\":\"euclidean\""));
        assert_eq!(serde_json::from_str::<TripletLossConfig>(&json).unwrap(), c);
    }

    #[test]
    fn degenerate_triplets() {
        let a = [0.0f64, 3.0];
        let n = [4.0f64, 0.0];
        assert_eq!(triplet_loss(&a, &a, &n, 5.0).unwrap(), 0.0);
        assert_eq!(triplet_loss(&a, &a, &[0.0, 0.0], 5.0).unwrap(), 2.0);
        assert_eq!(triplet_loss(&a, &a, &a, 0.0).unwrap(), 0.0);
    }

    proptest! {
        #[test]
        fn loss_is_zero_iff_margin_satisfied(v in prop::collection::vec(-5.0f64..5.0, 9), m in 0.01f64..6.0) {
            let (a, p, n) = (&v[0..3], &v[3..6], &v[6..9]);
            let loss = triplet_loss(a, p, n, m).unwrap();
            prop_assert!(loss >= 0.0);
            let satisfied = euclidean(a, p).unwrap() + m <= euclidean(a, n).unwrap();
            prop_assert_eq!(loss == 0.0, satisfied);
        }
    }
}
