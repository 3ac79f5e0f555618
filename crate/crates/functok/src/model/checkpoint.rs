//! Binary checkpoint format.
//!
//! Layout: 4-byte magic `FTCP`, little-endian `u32` version, little-endian
//! `u64` JSON header length, the JSON header, then all tensor data as raw
//! little-endian `f32` in row-major order. The header records the model
//! config, a vocabulary manifest, arbitrary metadata, and a tensor directory
//! (name, shape, element offset) in serialization order.

use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::net::Model;
use super::{ModelConfig, ModelError};

const MAGIC: &[u8; 4] = b"FTCP";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TensorEntry {
    name: String,
    shape: Vec<usize>,
    /// Element offset into the data section.
    offset: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Header {
    config: ModelConfig,
    vocab: serde_json::Value,
    metadata: serde_json::Value,
    tensors: Vec<TensorEntry>,
}

/// A model plus the context needed to use it: the vocabulary manifest it was
/// trained against and free-form metadata (dataset manifest, train config).
#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub model: Model<f32>,
    pub vocab: serde_json::Value,
    pub metadata: serde_json::Value,
}

impl Checkpoint {
    /// Writes the checkpoint to `path`, overwriting any existing file.
    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        let mut tensors = Vec::new();
        let mut offset = 0usize;
        for (name, t) in self.model.tensors() {
            let shape = t.shape();
            tensors.push(TensorEntry {
                name,
                shape,
                offset,
            });
            offset += t.as_slice().len();
        }
        let header = Header {
            config: self.model.config.clone(),
            vocab: self.vocab.clone(),
            metadata: self.metadata.clone(),
            tensors,
        };
        let header_json = serde_json::to_vec(&header)
            .map_err(|e| ModelError::Checkpoint(format!("header encode: {e}")))?;
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(header_json.len() as u64).to_le_bytes())?;
        w.write_all(&header_json)?;
        for (_, t) in self.model.tensors() {
            for &x in t.as_slice() {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads and validates a checkpoint from `path`.
    pub fn load(path: &Path) -> Result<Self, ModelError> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(ModelError::Checkpoint("bad magic".into()));
        }
        let mut buf4 = [0u8; 4];
        r.read_exact(&mut buf4)?;
        let version = u32::from_le_bytes(buf4);
        if version != VERSION {
            return Err(ModelError::Checkpoint(format!(
                "unsupported version {version}"
            )));
        }
        let mut buf8 = [0u8; 8];
        r.read_exact(&mut buf8)?;
        let header_len = u64::from_le_bytes(buf8) as usize;
        let mut header_json = vec![0u8; header_len];
        r.read_exact(&mut header_json)?;
        let header: Header = serde_json::from_slice(&header_json)
            .map_err(|e| ModelError::Checkpoint(format!("header decode: {e}")))?;
        let mut model = Model::<f32>::zeros(&header.config);
        header.config.check()?;
        let expected: Vec<(String, Vec<usize>)> = model
            .tensors()
            .into_iter()
            .map(|(n, t)| (n, t.shape()))
            .collect();
        if header.tensors.len() != expected.len() {
            return Err(ModelError::Checkpoint(format!(
                "tensor count {} does not match config ({})",
                header.tensors.len(),
                expected.len()
            )));
        }
        let mut data = Vec::new();
        r.read_to_end(&mut data)?;
        if data.len() % 4 != 0 {
            return Err(ModelError::Checkpoint("data not f32-aligned".into()));
        }
        let floats: Vec<f32> = data
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        for ((entry, (name, shape)), (_, mut dst)) in header
            .tensors
            .iter()
            .zip(&expected)
            .zip(model.tensors_mut())
        {
            if &entry.name != name || &entry.shape != shape {
                return Err(ModelError::Checkpoint(format!(
                    "tensor {} with shape {:?} does not match expected {} {:?}",
                    entry.name, entry.shape, name, shape
                )));
            }
            let dst = dst.as_slice_mut();
            let end = entry.offset + dst.len();
            if end > floats.len() {
                return Err(ModelError::Checkpoint(format!(
                    "tensor {} extends past data section",
                    entry.name
                )));
            }
            dst.copy_from_slice(&floats[entry.offset..end]);
        }
        Ok(Checkpoint {
            model,
            vocab: header.vocab,
            metadata: header.metadata,
        })
    }
}
