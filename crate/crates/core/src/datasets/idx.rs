//! IDX container format for unsigned-byte tensors: a big-endian magic
//! `00 00 08 ndim`, then `ndim` big-endian u32 dimensions, then the payload.

use crate::{Error, Result};

const IMAGES: u32 = 0x0000_0803;
const LABELS: u32 = 0x0000_0801;

/// Row-major image stack.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdxImages {
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
}

impl IdxImages {
    pub fn len(&self) -> usize {
        self.pixels.len().checked_div(self.rows * self.cols).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn image(&self, i: usize) -> &[u8] {
        let n = self.rows * self.cols;
        &self.pixels[i * n..(i + 1) * n]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IdxPayload {
    Images(IdxImages),
    Labels(Vec<u8>),
}

pub fn parse_idx(bytes: &[u8]) -> Result<IdxPayload> {
    let word = |i: usize| -> Result<usize> {
        bytes
            .get(4 * i..4 * i + 4)
            .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]) as usize)
            .ok_or_else(|| Error::Idx(format!("header truncated at {} bytes", bytes.len())))
    };
    let magic = word(0)? as u32;
    let dims: Vec<usize> = match magic {
        IMAGES => (1..4).map(word).collect::<Result<_>>()?,
        LABELS => vec![word(1)?],
        other => return Err(Error::Idx(format!("unsupported magic {other:#010x}"))),
    };
    let header = 4 * (dims.len() + 1);
    let expected = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::Idx("dimensions overflow".into()))?;
    let payload = &bytes[header..];
    if payload.len() != expected {
        return Err(Error::Idx(format!(
            "payload has {} bytes, dimensions {dims:?} need {expected}",
            payload.len()
        )));
    }
    Ok(match magic {
        IMAGES => IdxPayload::Images(IdxImages { rows: dims[1], cols: dims[2], pixels: payload.to_vec() }),
        _ => IdxPayload::Labels(payload.to_vec()),
    })
}

pub fn encode_idx_images(images: &IdxImages) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + images.pixels.len());
    for v in [IMAGES, images.len() as u32, images.rows as u32, images.cols as u32] {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out.extend_from_slice(&images.pixels);
    out
}

pub fn encode_idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABELS.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_headers() {
        let mut bytes = vec![0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 28, 0, 0, 0, 28];
        bytes.extend(std::iter::repeat_n(7u8, 2 * 784));
        let IdxPayload::Images(im) = parse_idx(&bytes).unwrap() else { panic!("expected images") };
        assert_eq!((im.len(), im.rows, im.cols), (2, 28, 28));
        assert_eq!(im.image(1)[783], 7);

        let labels = parse_idx(&[0, 0, 8, 1, 0, 0, 0, 3, 1, 2, 7]).unwrap();
        assert_eq!(labels, IdxPayload::Labels(vec![1, 2, 7]));
    }

    #[test]
    fn rejects_bad_files() {
        assert!(parse_idx(&[0, 0, 8, 2, 0, 0, 0, 0]).is_err());
        assert!(parse_idx(&[0, 0, 8]).is_err());
        assert!(parse_idx(&[0, 0, 8, 1, 0, 0, 0, 3, 1, 2]).is_err());
        assert!(parse_idx(&[0, 0, 8, 1, 0, 0, 0, 1, 1, 2]).is_err());
        assert!(parse_idx(&[0, 0, 8, 3, 0, 0, 0, 1, 0, 0, 0, 2]).is_err());
        let short = [0, 0, 8, 3, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0, 2, 9, 9, 9];
        assert!(matches!(parse_idx(&short), Err(Error::Idx(_))));
    }

    proptest! {
        #[test]
        fn round_trip(n in 0usize..4, rows in 1usize..6, cols in 1usize..6, seed in any::<u8>()) {
            let pixels: Vec<u8> = (0..n * rows * cols).map(|i| (i as u8).wrapping_mul(31) ^ seed).collect();
            let images = IdxImages { rows, cols, pixels };
            let bytes = encode_idx_images(&images);
            prop_assert_eq!(parse_idx(&bytes).unwrap(), IdxPayload::Images(images.clone()));
            prop_assert_eq!(encode_idx_images(&images), bytes);
            let labels: Vec<u8> = images.pixels.iter().map(|p| p % 10).collect();
            prop_assert_eq!(parse_idx(&encode_idx_labels(&labels)).unwrap(), IdxPayload::Labels(labels));
        }
    }
}
