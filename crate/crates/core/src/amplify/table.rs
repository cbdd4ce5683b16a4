use rayon::prelude::*;

use crate::boolcirc::ModelCircuit;
use crate::datasets::{Correctness, Dataset};
use crate::{Error, Result};

/// Largest weight register swept exhaustively.
pub const MAX_WEIGHT_BITS: usize = 30;

/// Per-weight correct-sample counts `c_i` over a dataset of `N` samples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccuracyTable {
    weight_width: usize,
    counts: Vec<u32>,
    samples: usize,
}

impl AccuracyTable {
    pub fn from_counts(weight_width: usize, counts: Vec<u32>, samples: usize) -> Result<Self> {
        if counts.len() != 1usize << weight_width {
            return Err(Error::InvalidArgument(format!(
                "{} counts for a {weight_width}-bit weight register",
                counts.len()
            )));
        }
        if samples == 0 || counts.iter().any(|&c| c as usize > samples) {
            return Err(Error::InvalidArgument(format!("counts must lie in 0..={samples}")));
        }
        Ok(AccuracyTable { weight_width, counts, samples })
    }

    pub fn weight_width(&self) -> usize {
        self.weight_width
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// `N`.
    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn count(&self, w: usize) -> u32 {
        self.counts[w]
    }

    /// `J(w) = c_w / N`.
    pub fn accuracy(&self, w: usize) -> f64 {
        f64::from(self.counts[w]) / self.samples as f64
    }

    pub fn max_count(&self) -> u32 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// Smallest index attaining the maximum count.
    pub fn argmax(&self) -> usize {
        let best = self.max_count();
        self.counts.iter().position(|&c| c == best).unwrap_or(0)
    }

    pub fn mean_accuracy(&self) -> f64 {
        self.counts.iter().map(|&c| f64::from(c)).sum::<f64>() / (self.samples as f64 * self.len() as f64)
    }

    /// `Ĵ(w) = J(w) / Σ J`; all zeros when every count is zero.
    pub fn normalized(&self) -> Vec<f64> {
        let total: f64 = self.counts.iter().map(|&c| f64::from(c)).sum();
        if total == 0.0 {
            return vec![0.0; self.len()];
        }
        self.counts.iter().map(|&c| f64::from(c) / total).collect()
    }

    /// `hist[c]` = number of weights with count `c`, for `c` in `0..=N`.
    pub fn histogram(&self) -> Vec<u64> {
        let mut hist = vec![0u64; self.samples + 1];
        for &c in &self.counts {
            hist[c as usize] += 1;
        }
        hist
    }
}

/// Samples packed 64 per word: `inputs[chunk][j]` holds digit `j` of each sample.
pub(crate) struct Packed {
    inputs: Vec<Vec<u64>>,
    labels: Vec<Vec<u64>>,
    valid: Vec<u64>,
}

impl Packed {
    pub(crate) fn new(d: &Dataset) -> Self {
        let chunks = d.len().div_ceil(64);
        let mut inputs = vec![vec![0u64; d.input_width()]; chunks];
        let mut labels = vec![vec![0u64; d.label_width()]; chunks];
        let mut valid = vec![0u64; chunks];
        for (i, s) in d.samples().iter().enumerate() {
            let (c, lane) = (i / 64, i % 64);
            valid[c] |= 1 << lane;
            for (j, b) in s.x.bits().enumerate() {
                inputs[c][j] |= u64::from(b) << lane;
            }
            for (j, b) in s.y.bits().enumerate() {
                labels[c][j] |= u64::from(b) << lane;
            }
        }
        Packed { inputs, labels, valid }
    }

    /// Number of samples `model` gets right under weight `w`.
    pub(crate) fn count(
        &self,
        model: &ModelCircuit,
        correctness: Correctness,
        w: u64,
        weights: &mut Vec<u64>,
        wires: &mut Vec<u64>,
        outs: &mut Vec<u64>,
    ) -> u32 {
        weights.clear();
        weights.extend((0..model.weight_width()).map(|j| 0u64.wrapping_sub((w >> j) & 1)));
        let mut total = 0;
        for ((inputs, labels), valid) in self.inputs.iter().zip(&self.labels).zip(&self.valid) {
            model.eval_lanes(weights, inputs, wires);
            outs.clear();
            outs.extend(model.outputs().iter().map(|&o| wires[o]));
            total += (correctness.lanes(outs, labels) & valid).count_ones();
        }
        total
    }
}

pub(crate) fn check_shapes(model: &ModelCircuit, d: &Dataset) -> Result<()> {
    if model.input_width() != d.input_width() {
        return Err(Error::WidthMismatch { what: "dataset input", expected: model.input_width(), got: d.input_width() });
    }
    if model.output_width() != d.label_width() {
        return Err(Error::WidthMismatch { what: "dataset label", expected: model.output_width(), got: d.label_width() });
    }
    Ok(())
}

/// Exact `c_i` for every weight, by a bit-sliced sweep split across threads by
/// weight index.
pub fn accuracy_table(model: &ModelCircuit, d: &Dataset) -> Result<AccuracyTable> {
    check_shapes(model, d)?;
    let dw = model.weight_width();
    if dw > MAX_WEIGHT_BITS {
        return Err(Error::InvalidArgument(format!("{dw} weight bits exceeds the sweep limit {MAX_WEIGHT_BITS}")));
    }
    let packed = Packed::new(d);
    let correctness = d.correctness();
    let counts: Vec<u32> = (0..1u64 << dw)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new(), Vec::new()),
            |(weights, wires, outs), w| packed.count(model, correctness, w, weights, wires, outs),
        )
        .collect();
    AccuracyTable::from_counts(dw, counts, d.len())
}

/// `c_w` for one weight.
pub fn count_correct(model: &ModelCircuit, d: &Dataset, w: u64) -> Result<u32> {
    check_shapes(model, d)?;
    if w >> model.weight_width() != 0 {
        return Err(Error::InvalidArgument(format!("weight {w} exceeds {} bits", model.weight_width())));
    }
    let (mut a, mut b, mut c) = (Vec::new(), Vec::new(), Vec::new());
    Ok(Packed::new(d).count(model, d.correctness(), w, &mut a, &mut b, &mut c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolcirc::{edge_detection_model, simplified_ed_model, tiny_mnist_model, toy_model};
    use crate::datasets::{gen_edge_detection, gen_simplified_ed, gen_toy, Sample};
    use crate::BitVector;

    /// Scalar reference: evaluate every (w, x) pair one at a time.
    fn scalar_table(model: &ModelCircuit, d: &Dataset) -> Vec<u32> {
        (0..1u64 << model.weight_width())
            .map(|w| {
                d.samples()
                    .iter()
                    .filter(|s| d.correctness().is_correct(model.eval_index(w, s.x.index()), s.y.index()))
                    .count() as u32
            })
            .collect()
    }

    #[test]
    fn toy_table() {
        let t = accuracy_table(&toy_model(), &gen_toy()).unwrap();
        assert_eq!(t.counts(), &[2, 0]);
        assert_eq!((t.accuracy(0), t.accuracy(1)), (1.0, 0.0));
        assert_eq!(t.normalized(), vec![1.0, 0.0]);
    }

    #[test]
    fn bit_sliced_matches_scalar() {
        let ed = gen_edge_detection();
        let t = accuracy_table(&edge_detection_model(), &ed).unwrap();
        assert_eq!(t.counts(), scalar_table(&edge_detection_model(), &ed).as_slice());
        assert_eq!(t.max_count(), 512);
        let sed = gen_simplified_ed();
        let t = accuracy_table(&simplified_ed_model(), &sed).unwrap();
        assert_eq!(t.counts(), scalar_table(&simplified_ed_model(), &sed).as_slice());
        assert_eq!(t.max_count(), 512);
        assert_eq!(count_correct(&simplified_ed_model(), &sed, 7).unwrap(), t.count(7));
    }

    #[test]
    fn decode_predicate_in_sweep() {
        // five Tiny-MNIST-shaped samples checked at a handful of weights
        let label = |d| crate::datasets::tiny_mnist_label(d).unwrap();
        let samples = [(0b000000001, 1), (0b100000000, 2), (0b010000000, 7), (0b000010000, 1), (0b111111111, 2)]
            .map(|(x, d)| Sample { x: BitVector::from_index(x, 9).unwrap(), y: label(d) });
        let d = Dataset::new(samples.to_vec(), 3, Correctness::TinyMnistDecode).unwrap();
        let model = tiny_mnist_model();
        for w in [0u64, 1 << 9, 0b1000_0000_0010_0000_0001, 0xFFFFF, 0x3_0201] {
            let expect = d
                .samples()
                .iter()
                .filter(|s| d.correctness().is_correct(model.eval_index(w, s.x.index()), s.y.index()))
                .count() as u32;
            assert_eq!(count_correct(&model, &d, w).unwrap(), expect);
        }
    }

    #[test]
    fn duplicated_dataset_keeps_accuracy() {
        let d = gen_simplified_ed();
        let twice: Vec<Sample> = d.samples().iter().chain(d.samples()).copied().collect();
        let d2 = Dataset::new(twice, 2, Correctness::ExactMatch).unwrap();
        let (a, b) = (
            accuracy_table(&simplified_ed_model(), &d).unwrap(),
            accuracy_table(&simplified_ed_model(), &d2).unwrap(),
        );
        for w in 0..a.len() {
            assert_eq!(a.accuracy(w), b.accuracy(w));
        }
    }

    #[test]
    fn shape_errors() {
        assert!(accuracy_table(&toy_model(), &gen_simplified_ed()).is_err());
        assert!(accuracy_table(&simplified_ed_model(), &gen_edge_detection()).is_err());
        assert!(AccuracyTable::from_counts(1, vec![3, 0], 2).is_err());
        assert!(AccuracyTable::from_counts(2, vec![0, 0], 2).is_err());
    }
}
