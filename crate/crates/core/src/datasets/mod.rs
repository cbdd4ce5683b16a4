//! Benchmark datasets: edge detection over all 3×3 binary images, its
//! horizontal-line-only variant, and Tiny-MNIST built from the IDX files.

mod idx;
mod mnist;

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{BitVector, Error, Result};

pub use idx::{encode_idx_images, encode_idx_labels, parse_idx, IdxImages, IdxPayload};
pub use mnist::{load_mnist, make_tiny_mnist, tiny_mnist_class, tiny_mnist_label, MnistSplit};

/// How a model output is compared with a label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Correctness {
    /// ŷ must equal y digit for digit.
    ExactMatch,
    /// ŷ and y are decoded to digits 1, 2, 7 and the digits compared. `O_0 = 1` is
    /// class 1 whatever `O_1` is, so `10` and `11` both decode to 1.
    TinyMnistDecode,
}

impl Correctness {
    /// `o` and `y` are output indices (digit 0 in the low bit).
    pub fn is_correct(self, o: u64, y: u64) -> bool {
        match self {
            Correctness::ExactMatch => o == y,
            Correctness::TinyMnistDecode => tiny_mnist_class(o) == tiny_mnist_class(y),
        }
    }

    /// Bit-sliced form of [`Self::is_correct`]: `o[j]`, `y[j]` hold digit `j` of 64
    /// samples, one per lane.
    pub fn lanes(self, o: &[u64], y: &[u64]) -> u64 {
        match self {
            Correctness::ExactMatch => !o.iter().zip(y).fold(0, |acc, (a, b)| acc | (a ^ b)),
            Correctness::TinyMnistDecode => (o[0] & y[0]) | (!o[0] & !y[0] & !(o[1] ^ y[1])),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sample {
    pub x: BitVector,
    pub y: BitVector,
}

/// An ordered, non-empty list of samples where equal inputs carry equal labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    samples: Vec<Sample>,
    input_width: usize,
    label_width: usize,
    classes: usize,
    correctness: Correctness,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>, classes: usize, correctness: Correctness) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| Error::InvalidArgument("dataset has no samples".into()))?;
        let (dx, dy) = (first.x.width(), first.y.width());
        let mut seen: HashMap<u64, u64> = HashMap::with_capacity(samples.len());
        for s in &samples {
            s.x.expect_width("sample input", dx)?;
            s.y.expect_width("sample label", dy)?;
            if let Some(&prev) = seen.get(&s.x.index()) {
                if prev != s.y.index() {
                    return Err(Error::InvalidArgument(format!("input {} has two labels", s.x)));
                }
            }
            seen.insert(s.x.index(), s.y.index());
        }
        if correctness == Correctness::TinyMnistDecode && dy != 2 {
            return Err(Error::WidthMismatch { what: "Tiny-MNIST label", expected: 2, got: dy });
        }
        Ok(Dataset { samples, input_width: dx, label_width: dy, classes, correctness })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn input_width(&self) -> usize {
        self.input_width
    }

    pub fn label_width(&self) -> usize {
        self.label_width
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn correctness(&self) -> Correctness {
        self.correctness
    }

    /// One line per sample: `x_bits,y_bits`, digits in order.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x_bits,y_bits\n");
        for smp in &self.samples {
            let _ = writeln!(s, "{},{}", smp.x, smp.y);
        }
        s
    }

    fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            samples: indices.iter().map(|&i| self.samples[i]).collect(),
            ..self.clone()
        }
    }
}

fn bv(index: u64, width: usize) -> BitVector {
    BitVector::from_index(index, width).expect("width in range")
}

fn row_full(x: u64, i: u64) -> bool {
    (x >> (3 * i)) & 0b111 == 0b111
}

fn column_full(x: u64, j: u64) -> bool {
    (0..3).all(|i| (x >> (3 * i + j)) & 1 == 1)
}

/// The two-sample identity dataset `{(0, 0), (1, 1)}`.
pub fn gen_toy() -> Dataset {
    let s = |v| Sample { x: bv(v, 1), y: bv(v, 1) };
    Dataset::new(vec![s(0), s(1)], 2, Correctness::ExactMatch).expect("toy dataset")
}

/// All 512 images, labelled `O_0 = ¬horizontal`, `O_1 = ¬vertical`. A line is
/// three ones in one row or one column.
///
/// | y (`O_0O_1`) | lines present     |
/// |--------------|-------------------|
/// | `00`         | both              |
/// | `01`         | horizontal only   |
/// | `10`         | vertical only     |
/// | `11`         | none              |
pub fn gen_edge_detection() -> Dataset {
    let samples = (0..512u64)
        .map(|x| {
            let horizontal = (0..3).any(|i| row_full(x, i));
            let vertical = (0..3).any(|j| column_full(x, j));
            let y = u64::from(!horizontal) | (u64::from(!vertical) << 1);
            Sample { x: bv(x, 9), y: bv(y, 2) }
        })
        .collect();
    Dataset::new(samples, 4, Correctness::ExactMatch).expect("edge detection dataset")
}

/// All 512 images, `y = 1` iff some row is all ones.
pub fn gen_simplified_ed() -> Dataset {
    let samples = (0..512u64)
        .map(|x| {
            let y = (0..3).any(|i| row_full(x, i));
            Sample { x: bv(x, 9), y: bv(u64::from(y), 1) }
        })
        .collect();
    Dataset::new(samples, 2, Correctness::ExactMatch).expect("simplified edge detection dataset")
}

/// Random partition into `n_train` and `len − n_train` samples.
///
/// The permutation is a Fisher-Yates shuffle driven by ChaCha8 seeded with `seed`.
/// Both halves keep the original sample order.
pub fn split(d: &Dataset, n_train: usize, seed: u64) -> Result<(Dataset, Dataset)> {
    if n_train == 0 || n_train >= d.len() {
        return Err(Error::InvalidArgument(format!(
            "training size {n_train} must lie strictly between 0 and {}",
            d.len()
        )));
    }
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (train, test) = order.split_at_mut(n_train);
    train.sort_unstable();
    test.sort_unstable();
    Ok((d.subset(train), d.subset(test)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Scans the 3×3 grid as a matrix, independent of the bit tricks above.
    fn lines(x: u64) -> (bool, bool) {
        let m: Vec<Vec<bool>> = (0..3).map(|i| (0..3).map(|j| x & (1 << (3 * i + j)) != 0).collect()).collect();
        let h = m.iter().any(|row| row.iter().all(|&b| b));
        let v = (0..3).any(|j| m.iter().all(|row| row[j]));
        (h, v)
    }

    #[test]
    fn edge_detection_labels() {
        let d = gen_edge_detection();
        assert_eq!((d.len(), d.input_width(), d.label_width(), d.classes()), (512, 9, 2, 4));
        let mut counts = [0usize; 4];
        for (i, s) in d.samples().iter().enumerate() {
            assert_eq!(s.x.index(), i as u64);
            let (h, v) = lines(i as u64);
            assert_eq!(s.y.get(0), !h);
            assert_eq!(s.y.get(1), !v);
            counts[s.y.index() as usize] += 1;
        }
        assert_eq!(d.samples()[511].y.to_string(), "00");
        assert_eq!(d.samples()[0].y.to_string(), "11");
        // both: 169 + 169 − |h ∪ v|, with |h ∪ v| by inclusion-exclusion below
        let h_or_v = (0..512u64).filter(|&x| lines(x).0 || lines(x).1).count();
        assert_eq!(counts[0], 169 + 169 - h_or_v);
        assert_eq!(counts.iter().sum::<usize>(), 512);
        assert_eq!(counts[1], counts[2]);
    }

    #[test]
    fn simplified_labels() {
        let d = gen_simplified_ed();
        let positives = d.samples().iter().filter(|s| s.y.get(0)).count();
        // 3·64 images with a chosen full row, minus 3·8 counted twice, plus 1 counted thrice
        assert_eq!(positives, 3 * 64 - 3 * 8 + 1);
        assert_eq!(positives, 169);
        assert!(d.samples()[0b000_111_000].y.get(0));
        assert!(!d.samples()[0].y.get(0));
    }

    #[test]
    fn rejects_contradictory_samples() {
        let s = |x, y| Sample { x: bv(x, 2), y: bv(y, 1) };
        assert!(Dataset::new(vec![s(1, 0), s(1, 1)], 2, Correctness::ExactMatch).is_err());
        assert!(Dataset::new(vec![s(1, 0), s(1, 0)], 2, Correctness::ExactMatch).is_ok());
        assert!(Dataset::new(vec![], 2, Correctness::ExactMatch).is_err());
        assert!(Dataset::new(vec![s(1, 0)], 2, Correctness::TinyMnistDecode).is_err());
    }

    #[test]
    fn split_sizes_and_determinism() {
        let d = gen_edge_detection();
        let (a, b) = split(&d, 400, 7).unwrap();
        assert_eq!((a.len(), b.len()), (400, 112));
        assert_eq!(split(&d, 400, 7).unwrap(), (a.clone(), b.clone()));
        assert_ne!(split(&d, 400, 8).unwrap().0, a);
        let mut all: Vec<u64> = a.samples().iter().chain(b.samples()).map(|s| s.x.index()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..512).collect::<Vec<_>>());
        assert!(split(&d, 0, 1).is_err());
        assert!(split(&d, 512, 1).is_err());
    }

    #[test]
    fn csv_export() {
        let csv = gen_simplified_ed().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x_bits,y_bits"));
        assert_eq!(lines.next(), Some("000000000,0"));
        assert_eq!(lines.last(), Some("111111111,1"));
    }

    #[test]
    fn decode_predicate() {
        let c = Correctness::TinyMnistDecode;
        assert!(c.is_correct(0b11, 0b01));
        assert!(c.is_correct(0b01, 0b01));
        assert!(!c.is_correct(0b10, 0b01));
        assert!(c.is_correct(0b00, 0b00));
        assert!(!c.is_correct(0b10, 0b00));
    }

    proptest! {
        #[test]
        fn lanes_match_scalar(o in any::<[u64; 2]>(), y in any::<[u64; 2]>()) {
            for c in [Correctness::ExactMatch, Correctness::TinyMnistDecode] {
                let got = c.lanes(&o, &y);
                for lane in 0..64 {
                    let pick = |v: &[u64; 2]| ((v[0] >> lane) & 1) | (((v[1] >> lane) & 1) << 1);
                    prop_assert_eq!((got >> lane) & 1 == 1, c.is_correct(pick(&o), pick(&y)));
                }
            }
        }
    }
}
