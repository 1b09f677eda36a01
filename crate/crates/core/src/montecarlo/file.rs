//! Flat binary sample files: a 32-byte little-endian header
//! `(magic, version, count, seed)` of `u64`s followed by `count` `f64`s.

use std::path::Path;

use super::sampler::SampleSet;
use crate::config::ChannelConfig;
use crate::error::{Error, Result};

/// `b"RAYPRODS"` read as a little-endian `u64`.
pub const SAMPLE_FILE_MAGIC: u64 = u64::from_le_bytes(*b"RAYPRODS");
pub const SAMPLE_FILE_VERSION: u64 = 1;
const HEADER_LEN: usize = 32;

pub fn encode_samples(seed: u64, values: &[f64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * values.len());
    for word in [SAMPLE_FILE_MAGIC, SAMPLE_FILE_VERSION, values.len() as u64, seed] {
        out.extend_from_slice(&word.to_le_bytes());
    }
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Returns `(seed, values)`.
pub fn decode_samples(bytes: &[u8]) -> Result<(u64, Vec<f64>)> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!(
            "sample file is {} bytes, shorter than its header",
            bytes.len()
        )));
    }
    let word = |i: usize| u64::from_le_bytes(bytes[8 * i..8 * i + 8].try_into().expect("8 bytes"));
    if word(0) != SAMPLE_FILE_MAGIC {
        return Err(Error::Format("not a sample file (bad magic)".into()));
    }
    if word(1) != SAMPLE_FILE_VERSION {
        return Err(Error::Format(format!(
            "unsupported sample file version {}",
            word(1)
        )));
    }
    let count = word(2);
    let body = &bytes[HEADER_LEN..];
    if !body.len().is_multiple_of(8) || (body.len() / 8) as u64 != count {
        return Err(Error::Format(format!(
            "header announces {count} samples but the body holds {} bytes",
            body.len()
        )));
    }
    let values: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::Format(
            "sample values must be finite and nonnegative".into(),
        ));
    }
    Ok((word(3), values))
}

impl SampleSet {
    pub fn to_bytes(&self) -> Vec<u8> {
        encode_samples(self.seed, &self.values)
    }

    /// The file does not record dimensions; the caller supplies them.
    pub fn from_bytes(config: ChannelConfig, bytes: &[u8]) -> Result<Self> {
        let (seed, values) = decode_samples(bytes)?;
        Ok(SampleSet { config, seed, values })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read(config: ChannelConfig, path: &Path) -> Result<Self> {
        Self::from_bytes(config, &std::fs::read(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let values = vec![0.0, 1.5, 3.25e10];
        let bytes = encode_samples(42, &values);
        assert_eq!(bytes.len(), 32 + 24);
        assert_eq!(&bytes[..8], b"RAYPRODS");
        assert_eq!(decode_samples(&bytes).unwrap(), (42, values));
        assert_eq!(decode_samples(&encode_samples(0, &[])).unwrap(), (0, vec![]));
    }

    #[test]
    fn rejects_malformed() {
        let good = encode_samples(1, &[1.0, 2.0]);
        assert!(decode_samples(&good[..31]).is_err());
        assert!(decode_samples(&good[..good.len() - 1]).is_err());
        let mut bad = good.clone();
        bad[0] ^= 1;
        assert!(decode_samples(&bad).is_err());
        let mut bad = good.clone();
        bad[8] = 2;
        assert!(decode_samples(&bad).is_err());
        let mut bad = good.clone();
        bad[16] = 3;
        assert!(decode_samples(&bad).is_err());
        assert!(decode_samples(&encode_samples(1, &[-1.0])).is_err());
        assert!(decode_samples(&encode_samples(1, &[f64::NAN])).is_err());
    }
}
