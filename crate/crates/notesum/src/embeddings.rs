//! Word vectors: loading the common text format, deterministic fallback
//! vectors for words without a pretrained entry, and cosine similarity.

use std::collections::HashMap;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const DEFAULT_DIM: usize = 200;

/// A fixed-dimension word vector table. Lookups for unknown words fall back
/// to a seeded pseudo-random unit vector when `fallback_seed` is set, and to
/// the zero vector otherwise.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
    fallback_seed: Option<u64>,
}

impl EmbeddingTable {
    /// An empty table that answers every lookup from the seeded fallback.
    pub fn with_fallback(dim: usize, seed: u64) -> Self {
        EmbeddingTable {
            dim,
            vectors: HashMap::new(),
            fallback_seed: Some(seed),
        }
    }

    pub fn from_vectors(dim: usize, vectors: HashMap<String, Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("embedding dimension must be >= 1".into()));
        }
        for (word, v) in &vectors {
            if v.len() != dim {
                return Err(Error::Config(format!(
                    "vector for {word:?} has length {}, table dim is {dim}",
                    v.len()
                )));
            }
        }
        Ok(EmbeddingTable {
            dim,
            vectors,
            fallback_seed: None,
        })
    }

    /// Load the text vector format: a `<vocab_size> <dim>` header line, then
    /// one `word v1 .. vdim` line per word.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())?;
        let mut lines = BufReader::new(file).lines();
        let header = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            msg: "empty embedding file".into(),
        })??;
        let mut parts = header.split_whitespace();
        let declared: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse {
                line: 1,
                msg: "header must be `<vocab_size> <dim>`".into(),
            })?;
        let dim: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse {
                line: 1,
                msg: "header must be `<vocab_size> <dim>`".into(),
            })?;
        let mut vectors = HashMap::with_capacity(declared);
        for (i, line) in lines.enumerate() {
            let line_no = i + 2;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let word = fields
                .next()
                .ok_or_else(|| Error::Parse {
                    line: line_no,
                    msg: "missing word".into(),
                })?
                .to_string();
            let values: Vec<f64> = fields
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse {
                    line: line_no,
                    msg: e.to_string(),
                })?;
            if values.len() != dim {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected {dim} values, got {}", values.len()),
                });
            }
            vectors.insert(word, values);
        }
        if vectors.len() != declared {
            return Err(Error::Parse {
                line: 1,
                msg: format!(
                    "header declares {declared} words, file holds {}",
                    vectors.len()
                ),
            });
        }
        Ok(EmbeddingTable {
            dim,
            vectors,
            fallback_seed: None,
        })
    }

    /// Enable seeded fallback vectors for unknown words.
    pub fn set_fallback_seed(&mut self, seed: u64) {
        self.fallback_seed = Some(seed);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contains(&self, word: &str) -> bool {
        self.vectors.contains_key(word)
    }

    /// The vector for one word: stored entry, seeded fallback, or zeros.
    pub fn embed_word(&self, word: &str) -> Vec<f64> {
        if let Some(v) = self.vectors.get(word) {
            return v.clone();
        }
        match self.fallback_seed {
            Some(seed) => fallback_vector(word, seed, self.dim),
            None => vec![0.0; self.dim],
        }
    }

    /// Average pooling of the entity's token vectors (the entity
    /// representation used in entity-sentence similarity).
    pub fn embed_entity(&self, tokens: &[String]) -> Vec<f64> {
        assert!(!tokens.is_empty(), "entity must have at least one token");
        let mut acc = vec![0.0; self.dim];
        for token in tokens {
            let v = self.embed_word(token);
            for (a, x) in acc.iter_mut().zip(&v) {
                *a += x;
            }
        }
        let inv = 1.0 / tokens.len() as f64;
        for a in &mut acc {
            *a *= inv;
        }
        acc
    }
}

/// Deterministic unit vector for an unknown word: FNV-1a of the word mixed
/// with the seed drives a ChaCha stream, Box-Muller turns it Gaussian, and
/// the result is normalized. Stable across processes for a fixed seed.
fn fallback_vector(word: &str, seed: u64, dim: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(word.as_bytes()));
    let mut v = Vec::with_capacity(dim);
    while v.len() < dim {
        let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
        let u2: f64 = rng.random();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        v.push(radius * angle.cos());
        if v.len() < dim {
            v.push(radius * angle.sin());
        }
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in &mut v {
            *x /= norm;
        }
    } else {
        v[0] = 1.0;
    }
    v
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        hash ^= *b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Cosine similarity with a zero-norm guard: either vector having zero norm
/// yields 0 rather than NaN.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    Ok(dot / (na.sqrt() * nb.sqrt()))
}

/// Write a table in the text vector format (used by the synthetic tooling).
pub fn save(table: &EmbeddingTable, mut writer: impl std::io::Write) -> Result<()> {
    writeln!(writer, "{} {}", table.vectors.len(), table.dim)?;
    let mut words: Vec<&String> = table.vectors.keys().collect();
    words.sort();
    for word in words {
        write!(writer, "{word}")?;
        for x in &table.vectors[word] {
            write!(writer, " {x}")?;
        }
        writeln!(writer)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn stored_vector_returned_verbatim() {
        let mut vectors = HashMap::new();
        vectors.insert("heart".to_string(), vec![1.0, 2.0, 3.0]);
        let table = EmbeddingTable::from_vectors(3, vectors).unwrap();
        assert_eq!(table.embed_word("heart"), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn unknown_word_without_fallback_is_zero() {
        let table = EmbeddingTable::from_vectors(4, HashMap::new()).unwrap();
        assert_eq!(table.embed_word("x"), vec![0.0; 4]);
    }

    #[test]
    fn fallback_is_deterministic_and_unit_norm() {
        let table = EmbeddingTable::with_fallback(64, 9);
        let a = table.embed_word("hemoglobin");
        let b = table.embed_word("hemoglobin");
        assert_eq!(a, b);
        let norm: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
        // Different words get different vectors.
        assert_ne!(a, table.embed_word("hematocrit"));
        // Different seeds get different vectors.
        assert_ne!(a, EmbeddingTable::with_fallback(64, 10).embed_word("hemoglobin"));
    }

    #[test]
    fn entity_embedding_is_token_mean() {
        let mut vectors = HashMap::new();
        vectors.insert("heart".to_string(), vec![1.0, 0.0]);
        vectors.insert("failure".to_string(), vec![0.0, 1.0]);
        let table = EmbeddingTable::from_vectors(2, vectors).unwrap();
        let e = table.embed_entity(&["heart".to_string(), "failure".to_string()]);
        assert_eq!(e, vec![0.5, 0.5]);
        // Mean of one token is the token itself.
        assert_eq!(table.embed_entity(&["heart".to_string()]), vec![1.0, 0.0]);
        // All tokens unknown, no fallback: zero vector.
        assert_eq!(table.embed_entity(&["unknown".to_string()]), vec![0.0, 0.0]);
    }

    #[test]
    fn cosine_basics() {
        assert_eq!(cosine(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let c = cosine(&[1.0, 1.0], &[1.0, 0.0]).unwrap();
        assert!((c - 0.70711).abs() < 1e-5);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        assert!(cosine(&[1.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn loads_text_format() {
        let data = "2 3\nheart 1.0 0.5 -0.25\nfailure 0 1 0\n";
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vecs.txt");
        std::fs::write(&path, data).unwrap();
        let table = EmbeddingTable::load(&path).unwrap();
        assert_eq!(table.dim(), 3);
        assert_eq!(table.embed_word("heart"), vec![1.0, 0.5, -0.25]);
        assert_eq!(table.embed_word("failure"), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn load_rejects_bad_counts() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vecs.txt");
        std::fs::write(&path, "2 3\nheart 1 2 3\n").unwrap();
        assert!(EmbeddingTable::load(&path).is_err());
        std::fs::write(&path, "1 3\nheart 1 2\n").unwrap();
        assert!(EmbeddingTable::load(&path).is_err());
    }

    #[test]
    fn save_load_round_trip() {
        let mut vectors = HashMap::new();
        vectors.insert("alpha".to_string(), vec![0.125, -3.5]);
        vectors.insert("beta".to_string(), vec![1.0, 2.0]);
        let table = EmbeddingTable::from_vectors(2, vectors).unwrap();
        let mut buf = Vec::new();
        save(&table, &mut buf).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vecs.txt");
        std::fs::write(&path, &buf).unwrap();
        let back = EmbeddingTable::load(&path).unwrap();
        assert_eq!(back.embed_word("alpha"), table.embed_word("alpha"));
        assert_eq!(back.embed_word("beta"), table.embed_word("beta"));
    }

    proptest! {
        #[test]
        fn prop_cosine_self_is_one(v in proptest::collection::vec(-10.0f64..10.0, 1..8)) {
            prop_assume!(v.iter().any(|x| x.abs() > 1e-6));
            let c = cosine(&v, &v).unwrap();
            prop_assert!((c - 1.0).abs() < 1e-9);
        }

        #[test]
        fn prop_cosine_symmetric_and_bounded(
            a in proptest::collection::vec(-10.0f64..10.0, 4),
            b in proptest::collection::vec(-10.0f64..10.0, 4),
        ) {
            let ab = cosine(&a, &b).unwrap();
            let ba = cosine(&b, &a).unwrap();
            prop_assert_eq!(ab, ba);
            prop_assert!(ab.abs() <= 1.0 + 1e-9);
        }

        #[test]
        fn prop_fallback_unit_norm(word in "[a-z]{1,10}", seed in 0u64..1000) {
            let table = EmbeddingTable::with_fallback(16, seed);
            let v = table.embed_word(&word);
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assert!((norm - 1.0).abs() < 1e-12);
        }
    }
}
