use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::Range;

use num_complex::Complex64;
use rand::Rng;

use crate::boolcirc::RevGate;
use crate::fmt::sig12;
use crate::{BitVector, Error, Result};

/// Default ceiling on simulated qubits (2^26 amplitudes, 1 GiB).
pub const DEFAULT_QUBIT_CAP: usize = 26;

/// A pure state of `n` qubits; qubit `q` is bit `q` of the basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    amps: Vec<Complex64>,
    n_qubits: usize,
    registers: BTreeMap<String, Range<usize>>,
}

impl QuantumState {
    /// |0…0⟩ on `n_qubits` qubits, refused above `cap`.
    pub fn zero(n_qubits: usize, cap: usize) -> Result<Self> {
        if n_qubits > cap {
            return Err(Error::QubitCap { needed: n_qubits, cap });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(QuantumState { amps, n_qubits, registers: BTreeMap::new() })
    }

    /// Replaces every amplitude; `amps` must have `2^n` entries.
    pub fn set_amplitudes(&mut self, amps: Vec<Complex64>) -> Result<()> {
        if amps.len() != self.amps.len() {
            return Err(Error::InvalidArgument(format!(
                "{} amplitudes for a {}-qubit state",
                amps.len(),
                self.n_qubits
            )));
        }
        self.amps = amps;
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Names qubits `range` as a register.
    pub fn add_register(&mut self, name: &str, range: Range<usize>) -> Result<()> {
        if range.end > self.n_qubits || range.is_empty() {
            return Err(Error::InvalidArgument(format!("register `{name}` at {range:?} does not fit")));
        }
        self.registers.insert(name.to_string(), range);
        Ok(())
    }

    pub fn register(&self, name: &str) -> Result<Range<usize>> {
        self.registers
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    pub fn registers(&self) -> impl Iterator<Item = (&str, &Range<usize>)> {
        self.registers.iter().map(|(k, v)| (k.as_str(), v))
    }

    fn check_qubit(&self, q: usize) {
        assert!(q < self.n_qubits, "qubit {q} out of range for {} qubits", self.n_qubits);
    }

    /// Swaps amplitude pairs differing in `target` wherever every control is 1.
    fn controlled_flip(&mut self, controls: &[usize], target: usize) {
        self.check_qubit(target);
        let mask = controls.iter().fold(0usize, |m, &c| {
            self.check_qubit(c);
            m | (1 << c)
        });
        let bit = 1usize << target;
        assert!(mask & bit == 0, "target {target} is also a control");
        for i in 0..self.amps.len() {
            if i & bit == 0 && i & mask == mask {
                self.amps.swap(i, i | bit);
            }
        }
    }

    pub fn x(&mut self, q: usize) {
        self.controlled_flip(&[], q);
    }

    pub fn cnot(&mut self, control: usize, target: usize) {
        self.controlled_flip(&[control], target);
    }

    pub fn mcx(&mut self, controls: &[usize], target: usize) {
        self.controlled_flip(controls, target);
    }

    pub fn apply(&mut self, gate: &RevGate) {
        match gate {
            RevGate::X(t) => self.x(*t),
            RevGate::Cnot { control, target } => self.cnot(*control, *target),
            RevGate::Mcx { controls, target } => self.mcx(controls, *target),
        }
    }

    pub fn h(&mut self, q: usize) {
        self.check_qubit(q);
        let bit = 1usize << q;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a, b) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = (a + b) * s;
                self.amps[i | bit] = (a - b) * s;
            }
        }
    }

    /// Multi-controlled Z: negates basis states whose `controls` bits read `pattern`
    /// (`pattern[j]` is the required value of `controls[j]`).
    pub fn mcz(&mut self, controls: &[usize], pattern: &[bool]) {
        assert_eq!(controls.len(), pattern.len());
        let (mut mask, mut value) = (0usize, 0usize);
        for (&c, &p) in controls.iter().zip(pattern) {
            self.check_qubit(c);
            mask |= 1 << c;
            value |= usize::from(p) << c;
        }
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == value {
                *a = -*a;
            }
        }
    }

    /// Negates every basis state whose index satisfies `marked`.
    pub fn phase_flip_where(&mut self, marked: impl Fn(usize) -> bool) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if marked(i) {
                *a = -*a;
            }
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QuantumState) -> Result<Complex64> {
        if self.amps.len() != other.amps.len() {
            return Err(Error::InvalidArgument("states differ in dimension".into()));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Born probabilities of each value of register `name`.
    pub fn marginal(&self, name: &str) -> Result<Vec<f64>> {
        let r = self.register(name)?;
        let mask = (1usize << r.len()) - 1;
        let mut p = vec![0.0; 1 << r.len()];
        for (i, a) in self.amps.iter().enumerate() {
            p[(i >> r.start) & mask] += a.norm_sqr();
        }
        Ok(p)
    }

    /// `basis_index,re,im` for every amplitude.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("basis_index,re,im\n");
        for (i, a) in self.amps.iter().enumerate() {
            let _ = writeln!(s, "{i},{},{}", sig12(a.re), sig12(a.im));
        }
        s
    }
}

/// Samples one value of register `name` with Born probabilities. The state is left
/// as is; callers treat it as consumed.
pub fn measure_register<R: Rng + ?Sized>(state: &QuantumState, name: &str, rng: &mut R) -> Result<BitVector> {
    let p = state.marginal(name)?;
    let width = state.register(name)?.len();
    let mut u = rng.random::<f64>() * p.iter().sum::<f64>();
    let mut pick = p.len() - 1;
    for (v, &pv) in p.iter().enumerate() {
        if u < pv {
            pick = v;
            break;
        }
        u -= pv;
    }
    while p[pick] == 0.0 && pick > 0 {
        pick -= 1;
    }
    BitVector::from_index(pick as u64, width)
}
