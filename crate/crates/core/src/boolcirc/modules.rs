//! Layer building blocks: 1×3 convolution, max pooling, a 3-input fully connected
//! row, and ReLU. Each comes as a direct function and as a circuit.

use super::{CircuitBuilder, Lit, ModelCircuit};
use crate::{BitVector, Error, Result};

/// 1×3 binary convolution: `AND_j ¬(w_j ⊕ x_j)`, i.e. 1 iff `w == x`.
pub fn conv1x3(w: &BitVector, x: &BitVector) -> Result<bool> {
    w.expect_width("conv kernel", 3)?;
    x.expect_width("conv window", 3)?;
    Ok((0..3).all(|j| !(w.get(j) ^ x.get(j))))
}

/// Max pooling over bits: their OR.
pub fn maxpool(x: &BitVector) -> Result<bool> {
    // BitVector width is at least 1; empty pooling is rejected by maxpool_circuit
    Ok(x.count_ones() > 0)
}

/// `(w_1 ∧ x_1) + (w_2 ∧ x_2) + (w_3 ∧ x_3)` as a 2-bit count; digit 0 is the low bit.
pub fn fc_row(w: &BitVector, x: &BitVector) -> Result<BitVector> {
    w.expect_width("fc weights", 3)?;
    x.expect_width("fc input", 3)?;
    let hits = (0..3).filter(|&j| w.get(j) && x.get(j)).count() as u64;
    BitVector::from_index(hits, 2)
}

/// `X' = (X ⊕ X) ∨ (¬S ∧ X)`, bit by bit. The first term is identically zero.
#[allow(clippy::eq_op)]
pub fn relu(sign: bool, x: &BitVector) -> BitVector {
    let mut out = *x;
    for j in 0..x.width() {
        let xj = x.get(j);
        out.set(j, (xj ^ xj) | (!sign & xj));
    }
    out
}

/// Circuit form of [`conv1x3`]: weights `w0..w2`, inputs `x0..x2`.
pub fn conv1x3_circuit() -> ModelCircuit {
    let mut b = CircuitBuilder::new(3, 3);
    let w = [b.weight(0), b.weight(1), b.weight(2)];
    let x = [b.input(0), b.input(1), b.input(2)];
    let o = conv_kernel(&mut b, w, x);
    b.build(&[o]).expect("conv circuit")
}

pub(crate) fn conv_kernel(b: &mut CircuitBuilder, w: [Lit; 3], x: [Lit; 3]) -> Lit {
    let diffs: Vec<Lit> = (0..3).map(|j| !b.xor(&[w[j], x[j]])).collect();
    b.and(&diffs)
}

/// Circuit form of [`maxpool`] over `width` inputs.
pub fn maxpool_circuit(width: usize) -> Result<ModelCircuit> {
    if width == 0 {
        return Err(Error::InvalidArgument("max pooling over no inputs".into()));
    }
    let mut b = CircuitBuilder::new(0, width);
    let ins: Vec<Lit> = (0..width).map(|j| b.input(j)).collect();
    let o = b.or(&ins);
    b.build(&[o])
}

/// Circuit form of [`fc_row`]: one full adder over the three AND terms.
/// Outputs are `[sum, carry]`, matching the digit order of [`fc_row`].
pub fn fc_row_circuit() -> ModelCircuit {
    let mut b = CircuitBuilder::new(3, 3);
    let terms: Vec<Lit> = (0..3).map(|j| b.and(&[b.weight(j), b.input(j)])).collect();
    let (sum, carry) = b.add(&terms);
    b.build(&[sum, carry]).expect("fc circuit")
}

/// Circuit form of [`relu`]: input 0 is the sign bit, inputs `1..=width` the value.
pub fn relu_circuit(width: usize) -> Result<ModelCircuit> {
    if width == 0 {
        return Err(Error::InvalidArgument("ReLU over no value bits".into()));
    }
    let mut b = CircuitBuilder::new(0, width + 1);
    let sign = b.input(0);
    let mut outs = Vec::with_capacity(width);
    for j in 1..=width {
        let xj = b.input(j);
        let zero = b.xor(&[xj, xj]);
        let pass = b.and(&[!sign, xj]);
        outs.push(b.or(&[zero, pass]));
    }
    b.build(&outs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVector {
        BitVector::parse(s).unwrap()
    }

    #[test]
    fn conv_examples() {
        assert!(conv1x3(&bv("111"), &bv("111")).unwrap());
        assert!(!conv1x3(&bv("111"), &bv("101")).unwrap());
        assert!(conv1x3(&bv("010"), &bv("010")).unwrap());
        assert!(conv1x3(&bv("11"), &bv("111")).is_err());
        assert!(conv1x3(&bv("111"), &bv("1111")).is_err());
    }

    #[test]
    fn maxpool_examples() {
        assert!(maxpool(&bv("100")).unwrap());
        assert!(!maxpool(&bv("000")).unwrap());
        assert!(maxpool(&bv("111")).unwrap());
        assert!(maxpool_circuit(0).is_err());
    }

    #[test]
    fn fc_examples() {
        assert_eq!(fc_row(&bv("111"), &bv("111")).unwrap().index(), 3);
        for x in 0..8 {
            let x = BitVector::from_index(x, 3).unwrap();
            assert_eq!(fc_row(&bv("000"), &x).unwrap().index(), 0);
        }
        assert_eq!(fc_row(&bv("101"), &bv("111")).unwrap().index(), 2);
        assert!(fc_row(&bv("10"), &bv("111")).is_err());
    }

    #[test]
    fn relu_examples() {
        assert_eq!(relu(true, &bv("101")), bv("000"));
        assert_eq!(relu(false, &bv("101")), bv("101"));
        assert_eq!(relu(false, &bv("000")), bv("000"));
    }

    #[test]
    fn module_properties_exhaustive() {
        let conv = conv1x3_circuit();
        let fc = fc_row_circuit();
        for w in 0..8u64 {
            for x in 0..8u64 {
                let wb = BitVector::from_index(w, 3).unwrap();
                let xb = BitVector::from_index(x, 3).unwrap();
                assert_eq!(conv1x3(&wb, &xb).unwrap(), w == x);
                assert_eq!(conv.eval_index(w, x), u64::from(w == x));
                let count = u64::from((w & x).count_ones());
                assert_eq!(fc_row(&wb, &xb).unwrap().index(), count);
                assert_eq!(fc.eval_index(w, x), count);
            }
        }
        let pool = maxpool_circuit(3).unwrap();
        let act = relu_circuit(3).unwrap();
        for x in 0..8u64 {
            let xb = BitVector::from_index(x, 3).unwrap();
            assert_eq!(maxpool(&xb).unwrap(), x.count_ones() > 0);
            assert_eq!(pool.eval_index(0, x), u64::from(x != 0));
            for s in [false, true] {
                let masked = if s { 0 } else { x };
                assert_eq!(relu(s, &xb).index(), masked);
                assert_eq!(act.eval_index(0, u64::from(s) | (x << 1)), masked);
            }
        }
    }
}
