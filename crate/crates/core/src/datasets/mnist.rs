//! Tiny-MNIST: digits 1, 2 and 7 shrunk to 3×3 binary images.

use std::collections::BTreeMap;
use std::path::Path;

use super::idx::{parse_idx, IdxImages, IdxPayload};
use super::{Correctness, Dataset, Sample};
use crate::{BitVector, Error, Result};

/// Classes kept, in tie-break order.
const DIGITS: [u8; 3] = [1, 2, 7];

/// A bilinear sample brighter than this (0..=255 scale) becomes a 1.
pub const THRESHOLD: u32 = 37;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MnistSplit {
    Train,
    Test,
}

impl MnistSplit {
    fn prefix(self) -> &'static str {
        match self {
            MnistSplit::Train => "train",
            MnistSplit::Test => "t10k",
        }
    }
}

/// Label bits `O_0O_1`: 1 → `10`, 2 → `01`, 7 → `00`.
pub fn tiny_mnist_label(digit: u8) -> Option<BitVector> {
    let index = match digit {
        1 => 0b01,
        2 => 0b10,
        7 => 0b00,
        _ => return None,
    };
    Some(BitVector::from_index(index, 2).expect("2-bit label"))
}

/// Decodes a 2-bit output index (digit 0 in the low bit) to 1, 2 or 7.
pub fn tiny_mnist_class(o: u64) -> u8 {
    match (o & 1, (o >> 1) & 1) {
        (1, _) => 1,
        (0, 1) => 2,
        _ => 7,
    }
}

/// Reads `{train,t10k}-{images-idx3,labels-idx1}-ubyte` from `dir`.
pub fn load_mnist(dir: &Path, split: MnistSplit) -> Result<(IdxImages, Vec<u8>)> {
    let read = |kind: &str| -> Result<IdxPayload> {
        let path = dir.join(format!("{}-{kind}-ubyte", split.prefix()));
        let bytes = std::fs::read(&path)
            .map_err(|e| Error::Idx(format!("cannot read {}: {e}", path.display())))?;
        parse_idx(&bytes)
    };
    let IdxPayload::Images(images) = read("images-idx3")? else {
        return Err(Error::Idx("image file holds labels".into()));
    };
    let IdxPayload::Labels(labels) = read("labels-idx1")? else {
        return Err(Error::Idx("label file holds images".into()));
    };
    Ok((images, labels))
}

/// Source row and weight, in sixths of a pixel, for output row `i` of 3.
///
/// Half-pixel-centred bilinear sampling: the source coordinate is
/// `(i + ½)·n/3 − ½`, clamped at 0.
fn tap(i: usize, n: usize) -> (usize, u32) {
    let sixths = ((2 * i + 1) * n).saturating_sub(3);
    let (lo, frac) = (sixths / 6, (sixths % 6) as u32);
    if lo + 1 >= n {
        (n - 2, 6)
    } else {
        (lo, frac)
    }
}

/// 3×3 bilinear downsample followed by binarization at [`THRESHOLD`].
pub fn downsample(image: &[u8], rows: usize, cols: usize) -> BitVector {
    let mut out = BitVector::zeros(9).expect("9 bits");
    let px = |r: usize, c: usize| u32::from(image[r * cols + c]);
    for i in 0..3 {
        let (r, fr) = tap(i, rows);
        for j in 0..3 {
            let (c, fc) = tap(j, cols);
            let top = (6 - fc) * px(r, c) + fc * px(r, c + 1);
            let bottom = (6 - fc) * px(r + 1, c) + fc * px(r + 1, c + 1);
            out.set(3 * i + j, (6 - fr) * top + fr * bottom >= 36 * THRESHOLD);
        }
    }
    out
}

/// Keeps digits 1, 2, 7, downsamples, and merges equal images by majority vote.
/// Ties go to the smallest digit. Samples are ordered by image index.
pub fn make_tiny_mnist(images: &IdxImages, labels: &[u8]) -> Result<Dataset> {
    if images.len() != labels.len() {
        return Err(Error::Idx(format!("{} images but {} labels", images.len(), labels.len())));
    }
    if images.rows < 2 || images.cols < 2 {
        return Err(Error::Idx(format!("images are {}×{}, need at least 2×2", images.rows, images.cols)));
    }
    let mut votes: BTreeMap<u64, [usize; 3]> = BTreeMap::new();
    for (i, &digit) in labels.iter().enumerate() {
        let Some(slot) = DIGITS.iter().position(|&d| d == digit) else { continue };
        let x = downsample(images.image(i), images.rows, images.cols);
        votes.entry(x.index()).or_default()[slot] += 1;
    }
    for (slot, digit) in DIGITS.iter().enumerate() {
        if votes.values().all(|v| v[slot] == 0) {
            return Err(Error::InvalidArgument(format!("no samples of digit {digit}")));
        }
    }
    let samples = votes
        .into_iter()
        .map(|(x, v)| {
            let best = (0..3).fold(0, |b, s| if v[s] > v[b] { s } else { b });
            Sample {
                x: BitVector::from_index(x, 9).expect("9 bits"),
                y: tiny_mnist_label(DIGITS[best]).expect("kept digit"),
            }
        })
        .collect();
    Dataset::new(samples, 3, Correctness::TinyMnistDecode)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stack(images: &[Vec<u8>]) -> IdxImages {
        IdxImages { rows: 28, cols: 28, pixels: images.concat() }
    }

    #[test]
    fn taps_for_28() {
        assert_eq!(tap(0, 28), (4, 1));
        assert_eq!(tap(1, 28), (13, 3));
        assert_eq!(tap(2, 28), (22, 5));
        // 3 → 3 is the identity
        assert_eq!([tap(0, 3), tap(1, 3), tap(2, 3)], [(0, 0), (1, 0), (1, 6)]);
    }

    #[test]
    fn downsample_blank_and_full() {
        assert_eq!(downsample(&[0; 784], 28, 28).index(), 0);
        assert_eq!(downsample(&[255; 784], 28, 28).index(), 511);
        let mut centre = vec![0u8; 784];
        for r in 13..15 {
            for c in 13..15 {
                centre[r * 28 + c] = 255;
            }
        }
        assert_eq!(downsample(&centre, 28, 28).to_string(), "000010000");
    }

    #[test]
    fn identity_on_3x3() {
        for x in 0..512u64 {
            let img: Vec<u8> = (0..9).map(|p| if x >> p & 1 == 1 { 200 } else { 0 }).collect();
            assert_eq!(downsample(&img, 3, 3).index(), x);
        }
    }

    #[test]
    fn majority_vote_and_filtering() {
        let blank = vec![0u8; 784];
        let full = vec![255u8; 784];
        let images = stack(&[blank.clone(), blank.clone(), blank.clone(), full.clone(), full.clone(), blank, full]);
        // blank: 7, 2, 7 → 7 ; full: 1, 2, (3 dropped) → tie → 1
        let d = make_tiny_mnist(&images, &[7, 2, 7, 1, 2, 0, 3]).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.samples()[0].y, tiny_mnist_label(7).unwrap());
        assert_eq!(d.samples()[1].y, tiny_mnist_label(1).unwrap());
        assert_eq!(d.correctness(), Correctness::TinyMnistDecode);

        let only_ones = stack(&[vec![0; 784]]);
        assert!(make_tiny_mnist(&only_ones, &[1]).is_err());
        assert!(make_tiny_mnist(&only_ones, &[1, 2]).is_err());
    }

    #[test]
    fn labels_decode_to_their_digit() {
        for d in DIGITS {
            assert_eq!(tiny_mnist_class(tiny_mnist_label(d).unwrap().index()), d);
        }
        assert!(tiny_mnist_label(3).is_none());
    }
}
