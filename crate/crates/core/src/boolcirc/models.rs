//! The experiment models.
//!
//! Inputs are 3×3 binary images stored row-major (`x_{3i+j}` is row `i`, column
//! `j`). Output digit 0 is `O_0`, digit 1 is `O_1`.

use super::modules::conv_kernel;
use super::{CircuitBuilder, Lit, ModelCircuit};

/// `o = x ⊕ w` on one weight bit and one input bit.
pub fn toy_model() -> ModelCircuit {
    let mut b = CircuitBuilder::new(1, 1);
    let o = b.xor(&[b.input(0), b.weight(0)]);
    b.build(&[o]).expect("toy model")
}

/// Edge-detection model, d_w = 8, d_x = 9, two outputs.
///
/// ```text
/// O_0 = (OR_i AND_j (W_{0,j} ⊕ X_{i,j})) ⊕ W_{0,3}     rows
/// O_1 = (OR_i AND_j (W_{1,j} ⊕ X_{j,i})) ⊕ W_{1,3}     columns
/// ```
///
/// The kernel term is a plain XOR here, exactly as the model equations are written;
/// [`super::conv1x3`] uses the XNOR form. The two differ only by complementing the
/// three kernel weights. Weight layout: `[W_{0,0..3}, W_{1,0..3}]`.
pub fn edge_detection_model() -> ModelCircuit {
    let mut b = CircuitBuilder::new(8, 9);
    let o0 = scan(&mut b, 0, false);
    let o1 = scan(&mut b, 4, true);
    b.build(&[o0, o1]).expect("edge detection model")
}

fn scan(b: &mut CircuitBuilder, w_base: usize, columns: bool) -> Lit {
    let mut lines = Vec::with_capacity(3);
    for i in 0..3 {
        let terms: Vec<Lit> = (0..3)
            .map(|j| {
                let pixel = if columns { 3 * j + i } else { 3 * i + j };
                b.xor(&[b.weight(w_base + j), b.input(pixel)])
            })
            .collect();
        lines.push(b.and(&terms));
    }
    let any = b.or(&lines);
    b.xor(&[any, b.weight(w_base + 3)])
}

/// Tiny-MNIST weighted-mask model, d_w = 20, d_x = 9, two outputs.
///
/// `O_k = (OR_{i,j} W_{k,3i+j} ∧ X_{i,j}) ⊕ W_{k,9}`, weight digit `10k + t` holds
/// `W_{k,t}`. Predictions decode as `O_0 = 1` → digit 1, `O_0O_1 = 01` → digit 2,
/// `00` → digit 7.
pub fn tiny_mnist_model() -> ModelCircuit {
    let mut b = CircuitBuilder::new(20, 9);
    let mut outs = Vec::with_capacity(2);
    for k in 0..2 {
        let masked: Vec<Lit> = (0..9)
            .map(|p| b.and(&[b.weight(10 * k + p), b.input(p)]))
            .collect();
        let any = b.or(&masked);
        outs.push(b.xor(&[any, b.weight(10 * k + 9)]));
    }
    b.build(&outs).expect("tiny mnist model")
}

/// Horizontal-line detector with 4 weight bits, d_x = 9, one output.
///
/// `O_0 = (OR_i conv1x3(W_{0..3}, X_{i,·})) ⊕ W_3`: a single row scan using the
/// XNOR convolution kernel.
pub fn simplified_ed_model() -> ModelCircuit {
    let mut b = CircuitBuilder::new(4, 9);
    let kernel = [b.weight(0), b.weight(1), b.weight(2)];
    let rows: Vec<Lit> = (0..3)
        .map(|i| {
            let row = [b.input(3 * i), b.input(3 * i + 1), b.input(3 * i + 2)];
            conv_kernel(&mut b, kernel, row)
        })
        .collect();
    let any = b.or(&rows);
    let o = b.xor(&[any, b.weight(3)]);
    b.build(&[o]).expect("simplified edge detection model")
}
