//! Compilation of a [`ModelCircuit`] to a reversible `{X, CNOT, MCX}` gate list.
//!
//! Every wire value is XOR-accumulated into its destination qubit. AND and OR become a
//! single multi-controlled X whose controls are resolved, in order of preference, to
//!
//! 1. a primary qubit (weight or input) used directly, complemented with X when the
//!    literal is negated;
//! 2. a primary qubit that temporarily hosts an affine (XOR/NOT/COPY) expression of
//!    primary qubits, computed in place and restored after the MCX;
//! 3. a scratch qubit computed recursively and uncomputed right after the MCX.
//!
//! Scratch qubits are always returned to |0⟩ before they are handed out again, so the
//! list leaves every scratch qubit clean and only writes ŷ into the output qubits.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;

use super::{Lit, ModelCircuit, Op, WireSource};
use crate::{BitVector, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RevGate {
    X(usize),
    Cnot { control: usize, target: usize },
    /// Multi-controlled X; two controls is a Toffoli (CCX).
    Mcx { controls: Vec<usize>, target: usize },
}

impl RevGate {
    pub fn ccx(a: usize, b: usize, target: usize) -> Self {
        RevGate::Mcx {
            controls: vec![a, b],
            target,
        }
    }

    pub fn target(&self) -> usize {
        match self {
            RevGate::X(t) => *t,
            RevGate::Cnot { target, .. } | RevGate::Mcx { target, .. } => *target,
        }
    }

    pub fn remap(&self, map: &[usize]) -> RevGate {
        match self {
            RevGate::X(t) => RevGate::X(map[*t]),
            RevGate::Cnot { control, target } => RevGate::Cnot {
                control: map[*control],
                target: map[*target],
            },
            RevGate::Mcx { controls, target } => RevGate::Mcx {
                controls: controls.iter().map(|&c| map[c]).collect(),
                target: map[*target],
            },
        }
    }

    /// Applies the gate to a computational basis state.
    #[inline]
    pub fn apply_basis(&self, state: u128) -> u128 {
        match self {
            RevGate::X(t) => state ^ (1 << t),
            RevGate::Cnot { control, target } => state ^ (((state >> control) & 1) << target),
            RevGate::Mcx { controls, target } => {
                if controls.iter().all(|&c| (state >> c) & 1 == 1) {
                    state ^ (1 << target)
                } else {
                    state
                }
            }
        }
    }
}

impl fmt::Display for RevGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RevGate::X(t) => write!(f, "X({t})"),
            RevGate::Cnot { control, target } => write!(f, "CNOT({control},{target})"),
            RevGate::Mcx { controls, target } => {
                let name = if controls.len() == 2 { "CCX".to_string() } else { format!("C{}X", controls.len()) };
                write!(f, "{name}(")?;
                for c in controls {
                    write!(f, "{c},")?;
                }
                write!(f, "{target})")
            }
        }
    }
}

/// Reversible form of a model.
///
/// Qubit layout: weights `0..d_w`, inputs `d_w..d_w+d_x`, outputs next, then
/// `ancillas` scratch qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateList {
    pub weight_qubits: Range<usize>,
    pub input_qubits: Range<usize>,
    pub output_qubits: Range<usize>,
    /// Peak number of scratch qubits.
    pub ancillas: usize,
    pub gates: Vec<RevGate>,
    /// Spans of `gates` that uncompute a scratch qubit.
    pub uncompute: Vec<Range<usize>>,
}

impl GateList {
    pub fn n_qubits(&self) -> usize {
        self.output_qubits.end + self.ancillas
    }

    pub fn ancilla_qubits(&self) -> Range<usize> {
        self.output_qubits.end..self.n_qubits()
    }

    /// The formal inverse; every gate in the set is self-inverse.
    pub fn inverse(&self) -> Vec<RevGate> {
        self.gates.iter().rev().cloned().collect()
    }

    pub fn apply_basis(&self, state: u128) -> u128 {
        self.gates.iter().fold(state, |s, g| g.apply_basis(s))
    }

    /// Runs the list on |w⟩|x⟩|0…0⟩ and reads ŷ off the output qubits.
    pub fn eval_basis(&self, w: u64, x: u64) -> Result<u64> {
        if self.n_qubits() > 128 {
            return Err(Error::InvalidArgument(format!(
                "basis simulation supports 128 qubits, list uses {}",
                self.n_qubits()
            )));
        }
        let state = (u128::from(w) << self.weight_qubits.start) | (u128::from(x) << self.input_qubits.start);
        let out = self.apply_basis(state);
        let width = self.output_qubits.len();
        Ok(((out >> self.output_qubits.start) & ((1u128 << width) - 1)) as u64)
    }

    pub fn eval(&self, w: &BitVector, x: &BitVector) -> Result<BitVector> {
        w.expect_width("weights", self.weight_qubits.len())?;
        x.expect_width("input", self.input_qubits.len())?;
        BitVector::from_index(self.eval_basis(w.index(), x.index())?, self.output_qubits.len())
    }
}

/// Compiles `circuit` to a reversible gate list.
pub fn compile(circuit: &ModelCircuit) -> Result<GateList> {
    let dw = circuit.weight_width();
    let dx = circuit.input_width();
    let dy = circuit.output_width();
    let base = dw + dx + dy;
    let mut c = Compiler {
        circuit,
        gates: Vec::new(),
        uncompute: Vec::new(),
        free: BTreeSet::new(),
        next: base,
        base,
    };
    for (j, &wire) in circuit.outputs().iter().enumerate() {
        c.xor_into(Lit::pos(wire), dw + dx + j);
    }
    Ok(GateList {
        weight_qubits: 0..dw,
        input_qubits: dw..dw + dx,
        output_qubits: dw + dx..base,
        ancillas: c.next - base,
        gates: c.gates,
        uncompute: c.uncompute,
    })
}

/// XOR of a set of primary qubits plus a constant.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Affine {
    support: BTreeSet<usize>,
    constant: bool,
}

enum Control {
    Direct { qubit: usize, flip: bool },
    Host { qubit: usize, others: Vec<usize>, flip: bool },
    Scratch { qubit: usize, compute: Range<usize> },
}

struct Compiler<'a> {
    circuit: &'a ModelCircuit,
    gates: Vec<RevGate>,
    uncompute: Vec<Range<usize>>,
    free: BTreeSet<usize>,
    next: usize,
    base: usize,
}

impl Compiler<'_> {
    fn primary_qubit(&self, wire: usize) -> Option<usize> {
        match self.circuit.source(wire) {
            WireSource::Weight(j) => Some(j),
            WireSource::Input(j) => Some(self.circuit.weight_width() + j),
            WireSource::Gate { .. } => None,
        }
    }

    fn alloc(&mut self) -> usize {
        if let Some(q) = self.free.pop_first() {
            q
        } else {
            self.next += 1;
            self.next - 1
        }
    }

    fn release(&mut self, q: usize) {
        debug_assert!(q >= self.base);
        self.free.insert(q);
    }

    fn affine(&self, lit: Lit) -> Option<Affine> {
        let mut a = match self.circuit.source(lit.wire) {
            WireSource::Weight(_) | WireSource::Input(_) => Affine {
                support: BTreeSet::from([self.primary_qubit(lit.wire).unwrap()]),
                constant: false,
            },
            WireSource::Gate { gate, slot } => {
                let g = &self.circuit.gates()[gate];
                match (g.op, slot) {
                    (Op::Not, _) => {
                        let mut a = self.affine(g.inputs[0])?;
                        a.constant = !a.constant;
                        a
                    }
                    (Op::Copy, _) => self.affine(g.inputs[0])?,
                    (Op::Xor, _) | (Op::Add, 0) => {
                        let mut acc = Affine {
                            support: BTreeSet::new(),
                            constant: false,
                        };
                        for &l in &g.inputs {
                            let a = self.affine(l)?;
                            acc.support = acc.support.symmetric_difference(&a.support).copied().collect();
                            acc.constant ^= a.constant;
                        }
                        acc
                    }
                    _ => return None,
                }
            }
        };
        a.constant ^= lit.negated;
        Some(a)
    }

    /// Emits gates that leave `target ^= value(lit)` and every other qubit unchanged.
    fn xor_into(&mut self, lit: Lit, target: usize) {
        match self.circuit.source(lit.wire) {
            WireSource::Weight(_) | WireSource::Input(_) => {
                let control = self.primary_qubit(lit.wire).unwrap();
                self.gates.push(RevGate::Cnot { control, target });
            }
            WireSource::Gate { gate, slot } => {
                let g = &self.circuit.gates()[gate];
                let inputs = g.inputs.clone();
                match (g.op, slot) {
                    (Op::Not, _) => {
                        self.xor_into(inputs[0], target);
                        self.gates.push(RevGate::X(target));
                    }
                    (Op::Copy, _) => self.xor_into(inputs[0], target),
                    (Op::Xor, _) | (Op::Add, 0) => {
                        for l in inputs {
                            self.xor_into(l, target);
                        }
                    }
                    (Op::And, _) => self.mcx_into(&inputs, target, false),
                    (Op::Or, _) => {
                        let negated: Vec<Lit> = inputs.iter().map(|&l| !l).collect();
                        self.mcx_into(&negated, target, true);
                    }
                    (Op::Add, _) => {
                        // carry: majority, and for three bits maj(a,b,c) = ab ⊕ ac ⊕ bc
                        if inputs.len() == 2 {
                            self.mcx_into(&inputs, target, false);
                        } else {
                            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                                self.mcx_into(&[inputs[i], inputs[j]], target, false);
                            }
                        }
                    }
                }
            }
        }
        if lit.negated {
            self.gates.push(RevGate::X(target));
        }
    }

    /// `target ^= AND(lits)`, complemented afterwards when `complement` is set.
    fn mcx_into(&mut self, lits: &[Lit], target: usize, complement: bool) {
        let mut direct: Vec<(usize, bool)> = Vec::new();
        let mut hosts: BTreeSet<usize> = BTreeSet::new();
        let mut reads: BTreeSet<usize> = BTreeSet::new();
        let mut plan: Vec<Option<Control>> = Vec::with_capacity(lits.len());
        let mut pending = Vec::new();

        // primary qubits first
        for (i, &l) in lits.iter().enumerate() {
            plan.push(None);
            let Some(q) = self.primary_qubit(l.wire) else {
                continue;
            };
            match direct.iter().find(|(d, _)| *d == q) {
                Some(&(_, flip)) if flip == l.negated => {
                    plan[i] = Some(Control::Direct { qubit: q, flip: false });
                }
                Some(_) => {}
                None => {
                    direct.push((q, l.negated));
                    plan[i] = Some(Control::Direct { qubit: q, flip: l.negated });
                }
            }
        }
        // affine expressions hosted in place
        for (i, &l) in lits.iter().enumerate() {
            if plan[i].is_some() {
                continue;
            }
            let Some(a) = self.affine(l) else {
                pending.push(i);
                continue;
            };
            let host = a.support.iter().copied().find(|&h| {
                !direct.iter().any(|(d, _)| *d == h)
                    && !hosts.contains(&h)
                    && !reads.contains(&h)
                    && a.support.iter().all(|s| *s == h || !hosts.contains(s))
            });
            match host {
                Some(h) => {
                    hosts.insert(h);
                    let others: Vec<usize> = a.support.iter().copied().filter(|&s| s != h).collect();
                    reads.extend(others.iter().copied());
                    plan[i] = Some(Control::Host {
                        qubit: h,
                        others,
                        flip: a.constant,
                    });
                }
                None => pending.push(i),
            }
        }
        // everything else goes through scratch qubits, computed before any primary
        // qubit is disturbed
        for i in pending {
            let q = self.alloc();
            let start = self.gates.len();
            self.xor_into(lits[i], q);
            plan[i] = Some(Control::Scratch {
                qubit: q,
                compute: start..self.gates.len(),
            });
        }
        let plan: Vec<Control> = plan.into_iter().map(|c| c.expect("control planned")).collect();

        let mut host_gates = Vec::new();
        let mut flip_gates = Vec::new();
        for c in &plan {
            match c {
                Control::Host { qubit, others, flip } => {
                    host_gates.extend(others.iter().map(|&o| RevGate::Cnot { control: o, target: *qubit }));
                    if *flip {
                        host_gates.push(RevGate::X(*qubit));
                    }
                }
                Control::Direct { qubit, flip: true } => flip_gates.push(RevGate::X(*qubit)),
                _ => {}
            }
        }
        self.gates.extend(host_gates.iter().cloned());
        self.gates.extend(flip_gates.iter().cloned());

        let mut controls: Vec<usize> = Vec::with_capacity(plan.len());
        for c in &plan {
            let q = match c {
                Control::Direct { qubit, .. } | Control::Host { qubit, .. } | Control::Scratch { qubit, .. } => *qubit,
            };
            if !controls.contains(&q) {
                controls.push(q);
            }
        }
        if controls.len() == 1 {
            self.gates.push(RevGate::Cnot {
                control: controls[0],
                target,
            });
        } else {
            self.gates.push(RevGate::Mcx { controls, target });
        }
        if complement {
            self.gates.push(RevGate::X(target));
        }

        // the X flips commute with each other; host preparation unwinds in reverse
        self.gates.extend(flip_gates);
        self.gates.extend(host_gates.into_iter().rev());

        for c in plan.iter().rev() {
            if let Control::Scratch { qubit, compute } = c {
                let start = self.gates.len();
                let undo: Vec<RevGate> = self.gates[compute.clone()].iter().rev().cloned().collect();
                self.gates.extend(undo);
                self.uncompute.push(start..self.gates.len());
                self.release(*qubit);
            }
        }
    }
}
