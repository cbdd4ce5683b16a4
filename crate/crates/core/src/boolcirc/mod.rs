//! Reversible Boolean model circuits.
//!
//! A [`ModelCircuit`] is a single-assignment DAG of Boolean gates over three kinds of
//! wires: weight bits `w0..`, input bits `x0..`, and internal wires produced by gates.
//! Evaluation is bit-sliced: every wire carries a `u64` whose 64 lanes are
//! independent evaluations, which is what makes exhaustive weight sweeps cheap.

mod compile;
mod models;
mod modules;
mod text;

use std::ops;

use crate::{BitVector, Error, Result};

pub use compile::{compile, GateList, RevGate};
pub use models::{edge_detection_model, simplified_ed_model, tiny_mnist_model, toy_model};
pub use modules::{
    conv1x3, conv1x3_circuit, fc_row, fc_row_circuit, maxpool, maxpool_circuit, relu,
    relu_circuit,
};
pub use text::{parse_circuit, write_circuit};

pub type WireId = usize;

/// A wire reference, optionally complemented.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Lit {
    pub wire: WireId,
    pub negated: bool,
}

impl Lit {
    pub fn pos(wire: WireId) -> Self {
        Self {
            wire,
            negated: false,
        }
    }
}

impl ops::Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit {
            wire: self.wire,
            negated: !self.negated,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Not,
    Xor,
    And,
    Or,
    Copy,
    /// Adder over two or three bits; outputs are `[sum, carry]`.
    Add,
}

impl Op {
    pub fn mnemonic(self) -> &'static str {
        match self {
            Op::Not => "NOT",
            Op::Xor => "XOR",
            Op::And => "AND",
            Op::Or => "OR",
            Op::Copy => "COPY",
            Op::Add => "ADD",
        }
    }

    fn output_count(self) -> usize {
        if self == Op::Add {
            2
        } else {
            1
        }
    }

    fn check_arity(self, n: usize) -> std::result::Result<(), String> {
        let ok = match self {
            Op::Not | Op::Copy => n == 1,
            Op::Xor | Op::And | Op::Or => n >= 1,
            Op::Add => n == 2 || n == 3,
        };
        if ok {
            Ok(())
        } else {
            Err(format!("{} does not take {n} inputs", self.mnemonic()))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub op: Op,
    pub inputs: Vec<Lit>,
    pub outputs: Vec<WireId>,
}

/// Where a wire's value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WireSource {
    Weight(usize),
    Input(usize),
    /// Output `slot` of gate `gate`.
    Gate { gate: usize, slot: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelCircuit {
    weight_width: usize,
    input_width: usize,
    names: Vec<String>,
    sources: Vec<WireSource>,
    gates: Vec<Gate>,
    outputs: Vec<WireId>,
}

impl ModelCircuit {
    pub fn weight_width(&self) -> usize {
        self.weight_width
    }

    pub fn input_width(&self) -> usize {
        self.input_width
    }

    /// Width of ŷ.
    pub fn output_width(&self) -> usize {
        self.outputs.len()
    }

    /// Internal wires that are not outputs (the classical analogue of the auxiliary
    /// register).
    pub fn aux_width(&self) -> usize {
        let internal = self.sources.len() - self.weight_width - self.input_width;
        internal
            - self
                .outputs
                .iter()
                .filter(|&&w| matches!(self.sources[w], WireSource::Gate { .. }))
                .count()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[WireId] {
        &self.outputs
    }

    pub fn wire_count(&self) -> usize {
        self.sources.len()
    }

    pub fn wire_name(&self, wire: WireId) -> &str {
        &self.names[wire]
    }

    pub fn source(&self, wire: WireId) -> WireSource {
        self.sources[wire]
    }

    /// Evaluates ŷ = f(w, x).
    pub fn eval(&self, w: &BitVector, x: &BitVector) -> Result<BitVector> {
        w.expect_width("weights", self.weight_width)?;
        x.expect_width("input", self.input_width)?;
        let y = self.eval_index(w.index(), x.index());
        BitVector::from_index(y, self.output_width())
    }

    /// Index form of [`ModelCircuit::eval`]; also covers circuits with no weight bits.
    pub fn eval_index(&self, w: u64, x: u64) -> u64 {
        let weights: Vec<u64> = (0..self.weight_width).map(|j| lane_of(w, j)).collect();
        let inputs: Vec<u64> = (0..self.input_width).map(|j| lane_of(x, j)).collect();
        let mut scratch = Vec::new();
        self.eval_lanes(&weights, &inputs, &mut scratch);
        self.outputs
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &o)| acc | ((scratch[o] & 1) << j))
    }

    /// Bit-sliced evaluation: lane `l` of every word is an independent evaluation.
    /// On return `wires[id]` holds every wire's lanes.
    pub fn eval_lanes(&self, weights: &[u64], inputs: &[u64], wires: &mut Vec<u64>) {
        debug_assert_eq!(weights.len(), self.weight_width);
        debug_assert_eq!(inputs.len(), self.input_width);
        wires.clear();
        wires.resize(self.sources.len(), 0);
        wires[..self.weight_width].copy_from_slice(weights);
        wires[self.weight_width..self.weight_width + self.input_width].copy_from_slice(inputs);
        for gate in &self.gates {
            let lit = |l: &Lit| {
                let v = wires[l.wire];
                if l.negated {
                    !v
                } else {
                    v
                }
            };
            match gate.op {
                Op::Not => wires[gate.outputs[0]] = !lit(&gate.inputs[0]),
                Op::Copy => wires[gate.outputs[0]] = lit(&gate.inputs[0]),
                Op::Xor => wires[gate.outputs[0]] = gate.inputs.iter().fold(0, |a, l| a ^ lit(l)),
                Op::And => wires[gate.outputs[0]] = gate.inputs.iter().fold(!0, |a, l| a & lit(l)),
                Op::Or => wires[gate.outputs[0]] = gate.inputs.iter().fold(0, |a, l| a | lit(l)),
                Op::Add => {
                    let v: Vec<u64> = gate.inputs.iter().map(lit).collect();
                    let (sum, carry) = if v.len() == 2 {
                        (v[0] ^ v[1], v[0] & v[1])
                    } else {
                        (
                            v[0] ^ v[1] ^ v[2],
                            (v[0] & v[1]) | (v[0] & v[2]) | (v[1] & v[2]),
                        )
                    };
                    wires[gate.outputs[0]] = sum;
                    wires[gate.outputs[1]] = carry;
                }
            }
        }
    }
}

#[inline]
fn lane_of(word: u64, bit: usize) -> u64 {
    if (word >> bit) & 1 == 1 {
        !0
    } else {
        0
    }
}

/// Incremental construction of a [`ModelCircuit`].
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    weight_width: usize,
    input_width: usize,
    names: Vec<String>,
    sources: Vec<WireSource>,
    gates: Vec<Gate>,
}

impl CircuitBuilder {
    pub fn new(weight_width: usize, input_width: usize) -> Self {
        let mut names = Vec::with_capacity(weight_width + input_width);
        let mut sources = Vec::with_capacity(weight_width + input_width);
        for j in 0..weight_width {
            names.push(format!("w{j}"));
            sources.push(WireSource::Weight(j));
        }
        for j in 0..input_width {
            names.push(format!("x{j}"));
            sources.push(WireSource::Input(j));
        }
        Self {
            weight_width,
            input_width,
            names,
            sources,
            gates: Vec::new(),
        }
    }

    pub fn weight(&self, j: usize) -> Lit {
        assert!(j < self.weight_width, "weight bit {j} out of range");
        Lit::pos(j)
    }

    pub fn input(&self, j: usize) -> Lit {
        assert!(j < self.input_width, "input bit {j} out of range");
        Lit::pos(self.weight_width + j)
    }

    pub fn not(&mut self, a: Lit) -> Lit {
        self.push(Op::Not, vec![a])[0]
    }

    pub fn copy(&mut self, a: Lit) -> Lit {
        self.push(Op::Copy, vec![a])[0]
    }

    pub fn xor(&mut self, ins: &[Lit]) -> Lit {
        self.push(Op::Xor, ins.to_vec())[0]
    }

    pub fn and(&mut self, ins: &[Lit]) -> Lit {
        self.push(Op::And, ins.to_vec())[0]
    }

    pub fn or(&mut self, ins: &[Lit]) -> Lit {
        self.push(Op::Or, ins.to_vec())[0]
    }

    /// Returns `(sum, carry)`.
    pub fn add(&mut self, ins: &[Lit]) -> (Lit, Lit) {
        let out = self.push(Op::Add, ins.to_vec());
        (out[0], out[1])
    }

    fn push(&mut self, op: Op, inputs: Vec<Lit>) -> Vec<Lit> {
        self.try_push(op, inputs, None)
            .unwrap_or_else(|e| panic!("invalid gate: {e}"))
    }

    pub(crate) fn try_push(
        &mut self,
        op: Op,
        inputs: Vec<Lit>,
        names: Option<Vec<String>>,
    ) -> std::result::Result<Vec<Lit>, String> {
        op.check_arity(inputs.len())?;
        if let Some(bad) = inputs.iter().find(|l| l.wire >= self.sources.len()) {
            return Err(format!("wire {} used before it is defined", bad.wire));
        }
        let gate = self.gates.len();
        let names = names.unwrap_or_else(|| {
            (0..op.output_count())
                .map(|s| format!("t{}", self.sources.len() + s))
                .collect()
        });
        if names.len() != op.output_count() {
            return Err(format!(
                "{} writes {} wire(s), {} named",
                op.mnemonic(),
                op.output_count(),
                names.len()
            ));
        }
        let mut outputs = Vec::with_capacity(names.len());
        for (slot, name) in names.into_iter().enumerate() {
            outputs.push(self.sources.len());
            self.sources.push(WireSource::Gate { gate, slot });
            self.names.push(name);
        }
        self.gates.push(Gate {
            op,
            inputs,
            outputs: outputs.clone(),
        });
        Ok(outputs.into_iter().map(Lit::pos).collect())
    }

    pub(crate) fn names(&self) -> &[String] {
        &self.names
    }

    /// Finishes the circuit. A complemented output literal gets a NOT gate.
    pub fn build(mut self, outputs: &[Lit]) -> Result<ModelCircuit> {
        if outputs.is_empty() {
            return Err(Error::InvalidArgument("circuit has no outputs".into()));
        }
        let mut wires = Vec::with_capacity(outputs.len());
        for &o in outputs {
            if o.wire >= self.sources.len() {
                return Err(Error::InvalidArgument(format!("output wire {} undefined", o.wire)));
            }
            wires.push(if o.negated {
                self.not(Lit::pos(o.wire)).wire
            } else {
                o.wire
            });
        }
        Ok(ModelCircuit {
            weight_width: self.weight_width,
            input_width: self.input_width,
            names: self.names,
            sources: self.sources,
            gates: self.gates,
            outputs: wires,
        })
    }
}
