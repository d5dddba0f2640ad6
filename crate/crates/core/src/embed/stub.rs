use super::{DenseVector, EmbedError, Embedder, TextRef};
use crate::scalar::Scalar;
use crate::text::tokenize;

/// Deterministic feature-hashing embedder.
///
/// Every token adds ±1 to a seeded hash bucket. Needs no training, which
/// makes it the reference and roster stand-in for runs that have no trained
/// or exported models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashingEmbedder {
    dim: usize,
    seed: u64,
}

impl HashingEmbedder {
    pub fn new(dim: usize, seed: u64) -> Result<Self, EmbedError> {
        if dim == 0 {
            return Err(EmbedError::Parameter("dim must be positive".into()));
        }
        Ok(Self { dim, seed })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl<T: Scalar> Embedder<T> for HashingEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, input: TextRef<'_>) -> Result<DenseVector<T>, EmbedError> {
        let mut values = vec![T::zero(); self.dim];
        for token in tokenize(input.text) {
            let h = fnv1a(self.seed, token.as_bytes());
            let bucket = (h % self.dim as u64) as usize;
            let sign = if (h >> 63) == 0 { T::one() } else { -T::one() };
            values[bucket] += sign;
        }
        if values.iter().all(|v| v.is_zero()) {
            return Err(EmbedError::NoKnownTokens(input.id.to_string()));
        }
        DenseVector::new(values)
    }
}

fn fnv1a(seed: u64, bytes: &[u8]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    for b in seed.to_le_bytes().iter().chain(bytes) {
        h ^= *b as u64;
        h = h.wrapping_mul(PRIME);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::cosine;

    #[test]
    fn deterministic_and_seed_dependent() {
        let a = HashingEmbedder::new(32, 1).unwrap();
        let b = HashingEmbedder::new(32, 2).unwrap();
        let text = TextRef::new("x", "a glass door for a refrigerated display case");
        let va: DenseVector<f64> = a.embed(text).unwrap();
        assert_eq!(va, a.embed(text).unwrap());
        let vb: DenseVector<f64> = b.embed(text).unwrap();
        assert_ne!(va, vb);
    }

    #[test]
    fn shared_words_raise_similarity() {
        let e = HashingEmbedder::new(256, 0).unwrap();
        let door: DenseVector<f64> = e.embed(TextRef::new("a", "glass door panel coating")).unwrap();
        let door2 = e.embed(TextRef::new("b", "glass door panel frame")).unwrap();
        let seat = e.embed(TextRef::new("c", "juvenile seat anchor belt")).unwrap();
        assert!(cosine(&door, &door2).unwrap() > cosine(&door, &seat).unwrap());
    }

    #[test]
    fn text_without_tokens_is_undefined() {
        let e = HashingEmbedder::new(8, 0).unwrap();
        assert!(matches!(
            Embedder::<f32>::embed(&e, TextRef::new("empty", "- , .")),
            Err(EmbedError::NoKnownTokens(_))
        ));
    }
}
