//! Key-value pairs, canonical ordering, shuffle-and-sort, and the standard
//! indexed input encoding.
//!
//! Canonical order is the backbone of deterministic execution: every pair is
//! tracked with its provenance (which invocation emitted it, at which output
//! position), and shuffle-and-sort orders pairs by (key bytes ascending,
//! origin index, emission index). Because provenance is a pure function of
//! content — never of execution schedule — two runs that execute invocations
//! in different orders still produce byte-identical round states.

use crate::error::MrcError;
use serde::{Deserialize, Serialize};

/// The atomic datum: a key and a value, both arbitrary byte-strings.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct KeyValuePair {
    #[serde(with = "crate::pair::byte_string")]
    pub key: Vec<u8>,
    #[serde(with = "crate::pair::byte_string")]
    pub value: Vec<u8>,
}

impl KeyValuePair {
    pub fn new(key: impl Into<Vec<u8>>, value: impl Into<Vec<u8>>) -> Self {
        KeyValuePair {
            key: key.into(),
            value: value.into(),
        }
    }

    /// Space charge of holding this pair: key bytes plus value bytes.
    pub fn bytes(&self) -> u64 {
        self.key.len() as u64 + self.value.len() as u64
    }
}

/// Byte-strings serialize as UTF-8 text when possible (the formats in this
/// workspace are ASCII), falling back to an explicit byte array.
pub(crate) mod byte_string {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], ser: S) -> Result<S::Ok, S::Error> {
        match std::str::from_utf8(bytes) {
            Ok(s) => ser.serialize_str(s),
            Err(_) => ser.collect_seq(bytes.iter()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<u8>, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Bytes(Vec<u8>),
        }
        Ok(match Repr::deserialize(de)? {
            Repr::Text(s) => s.into_bytes(),
            Repr::Bytes(b) => b,
        })
    }
}

/// A pair plus its provenance: the canonical index of the invocation that
/// emitted it and the position within that invocation's output list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacedPair {
    pub pair: KeyValuePair,
    pub origin: usize,
    pub emission: usize,
}

impl PlacedPair {
    pub fn new(pair: KeyValuePair, origin: usize, emission: usize) -> Self {
        PlacedPair {
            pair,
            origin,
            emission,
        }
    }

    fn canonical_key(&self) -> (&[u8], usize, usize) {
        (&self.pair.key, self.origin, self.emission)
    }
}

/// All values that share one key, in canonical order, ready for a reducer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyGroup {
    pub key: Vec<u8>,
    pub values: Vec<Vec<u8>>,
}

impl KeyGroup {
    /// Space charge of handing this group to a reducer.
    pub fn input_bytes(&self) -> u64 {
        self.key.len() as u64 + self.values.iter().map(|v| v.len() as u64).sum::<u64>()
    }
}

/// Groups pairs by key with values in canonical order and groups sorted by
/// key bytes. The grouping conserves the multiset exactly: every emitted
/// pair appears in exactly one group.
pub fn shuffle_and_sort(mut pairs: Vec<PlacedPair>) -> Vec<KeyGroup> {
    pairs.sort_by(|x, y| x.canonical_key().cmp(&y.canonical_key()));
    let mut groups: Vec<KeyGroup> = Vec::new();
    for placed in pairs {
        match groups.last_mut() {
            Some(g) if g.key == placed.pair.key => g.values.push(placed.pair.value),
            _ => groups.push(KeyGroup {
                key: placed.pair.key,
                values: vec![placed.pair.value],
            }),
        }
    }
    groups
}

/// The input to a run: `n` and the pair list. The standard encoding of a
/// bit-string is one pair per bit, `⟨i, x_i⟩` with decimal 1-based indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputEncoding {
    pairs: Vec<KeyValuePair>,
    n: usize,
}

impl InputEncoding {
    /// Encodes a string over `{0,1}`: pair `i` is (decimal index, bit).
    pub fn from_bits(x: &[u8]) -> Result<Self, MrcError> {
        for (i, &b) in x.iter().enumerate() {
            if b != b'0' && b != b'1' {
                return Err(MrcError::InvalidInput(format!(
                    "input byte {:?} at position {} is not a bit",
                    b as char, i
                )));
            }
        }
        Ok(Self::from_symbols(x))
    }

    /// Encodes a string over an arbitrary byte alphabet the same way:
    /// `⟨i, x_i⟩` with decimal 1-based indices, `n = |x|`.
    pub fn from_symbols(x: &[u8]) -> Self {
        let pairs = x
            .iter()
            .enumerate()
            .map(|(i, &b)| KeyValuePair::new((i + 1).to_string(), vec![b]))
            .collect();
        InputEncoding { pairs, n: x.len() }
    }

    /// Wraps explicit pairs (word-count style inputs). The size parameter of
    /// all resource bounds is the total byte count of the pairs.
    pub fn from_pairs(pairs: Vec<KeyValuePair>) -> Self {
        let n = pairs.iter().map(|p| p.bytes() as usize).sum();
        InputEncoding { pairs, n }
    }

    /// Reconstructs the byte-string from an indexed encoding — the inverse
    /// of [`InputEncoding::from_symbols`].
    pub fn decode_symbols(&self) -> Result<Vec<u8>, MrcError> {
        let mut out = vec![None; self.n];
        for p in &self.pairs {
            let idx: usize = std::str::from_utf8(&p.key)
                .ok()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| {
                    MrcError::InvalidInput(format!("pair key {:?} is not a decimal index", p.key))
                })?;
            if idx == 0 || idx > self.n {
                return Err(MrcError::InvalidInput(format!(
                    "pair index {idx} outside 1..={}",
                    self.n
                )));
            }
            if p.value.len() != 1 {
                return Err(MrcError::InvalidInput(format!(
                    "pair {idx} carries {} bytes, expected a single symbol",
                    p.value.len()
                )));
            }
            if out[idx - 1].replace(p.value[0]).is_some() {
                return Err(MrcError::InvalidInput(format!("duplicate pair index {idx}")));
            }
        }
        out.into_iter()
            .enumerate()
            .map(|(i, b)| {
                b.ok_or_else(|| MrcError::InvalidInput(format!("missing pair index {}", i + 1)))
            })
            .collect()
    }

    pub fn pairs(&self) -> &[KeyValuePair] {
        &self.pairs
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// The standard encoding of a bit-string input.
pub fn encode_input(x: &[u8]) -> Result<InputEncoding, MrcError> {
    InputEncoding::from_bits(x)
}
