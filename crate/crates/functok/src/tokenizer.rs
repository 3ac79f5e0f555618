//! Byte-level tokenizer extended with the functional-token specials.
//!
//! Ids 0..=255 map to raw bytes. Ids 256..256+N are `<nexa_0>`..`<nexa_{N-1}>`,
//! followed by `<nexa_end>`, BOS, and PAD. Encoding is greedy longest-match on
//! special surfaces; everything else is byte-by-byte, so round-tripping is exact
//! and there is no out-of-vocabulary input.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of base byte ids.
pub const BYTE_VOCAB: usize = 256;

#[derive(Debug, Error)]
pub enum TokenizerError {
    #[error("invalid token id {0} for vocabulary of size {1}")]
    InvalidId(u32, usize),
}

/// Byte vocabulary plus the N+3 special tokens.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Vocabulary {
    n_functions: usize,
    /// (surface, id) pairs in id order.
    special: Vec<(String, u32)>,
}

impl Vocabulary {
    /// Lays out the vocabulary for a pool of `n_functions` functions.
    pub fn build(n_functions: usize) -> Self {
        assert!(n_functions >= 1, "need at least one function");
        let mut special = Vec::with_capacity(n_functions + 3);
        for i in 0..n_functions {
            special.push((format!("<nexa_{i}>"), (BYTE_VOCAB + i) as u32));
        }
        special.push(("<nexa_end>".into(), (BYTE_VOCAB + n_functions) as u32));
        special.push(("<bos>".into(), (BYTE_VOCAB + n_functions + 1) as u32));
        special.push(("<pad>".into(), (BYTE_VOCAB + n_functions + 2) as u32));
        Vocabulary {
            n_functions,
            special,
        }
    }

    pub fn n_functions(&self) -> usize {
        self.n_functions
    }

    pub fn total_size(&self) -> usize {
        BYTE_VOCAB + self.special.len()
    }

    /// First functional-token id (`<nexa_0>`).
    pub fn first_function_id(&self) -> u32 {
        BYTE_VOCAB as u32
    }

    /// Id of `<nexa_i>`.
    pub fn function_id(&self, index: usize) -> u32 {
        assert!(index < self.n_functions);
        (BYTE_VOCAB + index) as u32
    }

    pub fn end_id(&self) -> u32 {
        (BYTE_VOCAB + self.n_functions) as u32
    }

    pub fn bos_id(&self) -> u32 {
        (BYTE_VOCAB + self.n_functions + 1) as u32
    }

    pub fn pad_id(&self) -> u32 {
        (BYTE_VOCAB + self.n_functions + 2) as u32
    }

    /// True when `id` is `<nexa_i>` or `<nexa_end>` (the weighted classes).
    pub fn is_special(&self, id: u32) -> bool {
        id >= BYTE_VOCAB as u32 && id <= self.end_id()
    }

    /// Function index for `id`, if it is a bound functional token.
    pub fn function_index(&self, id: u32) -> Option<usize> {
        let id = id as usize;
        (BYTE_VOCAB..BYTE_VOCAB + self.n_functions).contains(&id).then(|| id - BYTE_VOCAB)
    }

    /// Greedy longest-match encoding over special surfaces, bytes elsewhere.
    pub fn encode(&self, text: &str) -> Vec<u32> {
        let bytes = text.as_bytes();
        let mut ids = Vec::with_capacity(bytes.len());
        let mut pos = 0;
        while pos < bytes.len() {
            // specials all start with '<'
            if bytes[pos] == b'<' {
                let rest = &bytes[pos..];
                let hit = self
                    .special
                    .iter()
                    .filter(|(s, _)| rest.starts_with(s.as_bytes()))
                    .max_by_key(|(s, _)| s.len());
                if let Some((s, id)) = hit {
                    ids.push(*id);
                    pos += s.len();
                    continue;
                }
            }
            ids.push(bytes[pos] as u32);
            pos += 1;
        }
        ids
    }

    /// Exact inverse of [`Vocabulary::encode`]; special ids render their surfaces.
    pub fn decode(&self, ids: &[u32]) -> Result<String, TokenizerError> {
        let mut bytes = Vec::with_capacity(ids.len());
        for &id in ids {
            if (id as usize) < BYTE_VOCAB {
                bytes.push(id as u8);
            } else {
                let surface = self
                    .special
                    .iter()
                    .find(|(_, sid)| *sid == id)
                    .map(|(s, _)| s)
                    .ok_or_else(|| TokenizerError::InvalidId(id, self.total_size()))?;
                bytes.extend_from_slice(surface.as_bytes());
            }
        }
        // lossy is fine: encode only ever splits valid UTF-8 into bytes
        Ok(String::from_utf8_lossy(&bytes).into_owned())
    }

    pub fn count_tokens(&self, text: &str) -> usize {
        self.encode(text).len()
    }

    /// Surface→id table, serialized alongside checkpoints.
    pub fn manifest(&self) -> Vec<(String, u32)> {
        self.special.clone()
    }
}
