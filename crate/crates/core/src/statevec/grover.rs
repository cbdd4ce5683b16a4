use std::ops::Range;

use num_complex::Complex64;

use super::QuantumState;
use crate::amplify::WeightDistribution;
use crate::boolcirc::GateList;
use crate::datasets::{tiny_mnist_class, Correctness, Dataset};
use crate::{Error, Result};

/// Qubits of one dataset copy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CopyLayout {
    pub x: Range<usize>,
    pub y: Range<usize>,
    /// Set on auxiliary samples; absent when there are none.
    pub flag: Option<usize>,
    pub o: Range<usize>,
}

/// Qubit map for `k` copies of a dataset driven by one compiled model.
///
/// Order: weights, then per copy `x, y, flag, o`, then the scratch qubits, which all
/// copies share because the compiled list returns them to |0⟩.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub weights: Range<usize>,
    pub copies: Vec<CopyLayout>,
    pub ancillas: Range<usize>,
}

impl Layout {
    pub fn new(list: &GateList, d: &Dataset, k: u32, n_aux: usize) -> Result<Self> {
        if list.input_qubits.len() != d.input_width() || list.output_qubits.len() != d.label_width() {
            return Err(Error::InvalidArgument("compiled model does not fit the dataset".into()));
        }
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        let code_bits = d.input_width() + d.label_width();
        if code_bits < usize::BITS as usize && n_aux > 1 << code_bits {
            return Err(Error::InvalidArgument(format!(
                "{n_aux} auxiliary samples exceed the {} distinct (x, y) codes",
                1u64 << code_bits
            )));
        }
        let weights = 0..list.weight_qubits.len();
        let mut next = weights.end;
        let mut take = |n: usize| {
            let r = next..next + n;
            next += n;
            r
        };
        let copies = (0..k)
            .map(|_| CopyLayout {
                x: take(d.input_width()),
                y: take(d.label_width()),
                flag: (n_aux > 0).then(|| take(1).start),
                o: take(d.label_width()),
            })
            .collect();
        let ancillas = take(list.ancillas);
        Ok(Layout { weights, copies, ancillas })
    }

    pub fn n_qubits(&self) -> usize {
        self.ancillas.end
    }

    /// Compiled-list qubit → state qubit, for copy `c`.
    fn remap(&self, list: &GateList, c: usize) -> Vec<usize> {
        let copy = &self.copies[c];
        let mut map = vec![0; list.n_qubits()];
        for (j, q) in list.weight_qubits.clone().enumerate() {
            map[q] = self.weights.start + j;
        }
        for (j, q) in list.input_qubits.clone().enumerate() {
            map[q] = copy.x.start + j;
        }
        for (j, q) in list.output_qubits.clone().enumerate() {
            map[q] = copy.o.start + j;
        }
        for (j, q) in list.ancilla_qubits().enumerate() {
            map[q] = self.ancillas.start + j;
        }
        map
    }
}

fn field(i: usize, r: &Range<usize>) -> usize {
    (i >> r.start) & ((1 << r.len()) - 1)
}

/// |Ψ0⟩: uniform weights, each copy in the uniform superposition of its samples
/// (plus flagged auxiliary samples), and the model applied to every copy.
///
/// Auxiliary sample `j` carries `flag = 1` and `(x, y)` read from the bits of `j`.
pub fn prepare_initial(list: &GateList, d: &Dataset, k: u32, n_aux: usize, cap: usize) -> Result<(QuantumState, Layout)> {
    let layout = Layout::new(list, d, k, n_aux)?;
    let mut state = QuantumState::zero(layout.n_qubits(), cap)?;

    let dx = d.input_width();
    let mut codes: Vec<(u64, u64, bool)> = d.samples().iter().map(|s| (s.x.index(), s.y.index(), false)).collect();
    codes.extend((0..n_aux as u64).map(|j| (j & ((1 << dx) - 1), j >> dx, true)));
    let amp = (codes.len() as f64).powf(-0.5 * k as f64);

    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << layout.n_qubits()];
    let mut digits = vec![0usize; k as usize];
    'tuples: loop {
        let mut index = 0usize;
        for (copy, &j) in layout.copies.iter().zip(&digits) {
            let (x, y, flagged) = codes[j];
            index |= (x as usize) << copy.x.start | (y as usize) << copy.y.start;
            if let (Some(f), true) = (copy.flag, flagged) {
                index |= 1 << f;
            }
        }
        amps[index] = Complex64::new(amp, 0.0);
        for digit in digits.iter_mut() {
            *digit += 1;
            if *digit < codes.len() {
                continue 'tuples;
            }
            *digit = 0;
        }
        break;
    }
    state.set_amplitudes(amps)?;
    for q in layout.weights.clone() {
        state.h(q);
    }
    for c in 0..layout.copies.len() {
        let map = layout.remap(list, c);
        for g in &list.gates {
            state.apply(&g.remap(&map));
        }
    }

    state.add_register("w", layout.weights.clone())?;
    for (c, copy) in layout.copies.iter().enumerate() {
        state.add_register(&format!("x{c}"), copy.x.clone())?;
        state.add_register(&format!("y{c}"), copy.y.clone())?;
        state.add_register(&format!("o{c}"), copy.o.clone())?;
        if let Some(f) = copy.flag {
            state.add_register(&format!("flag{c}"), f..f + 1)?;
        }
    }
    if !layout.ancillas.is_empty() {
        state.add_register("anc", layout.ancillas.clone())?;
    }
    Ok((state, layout))
}

/// Negates every basis state where all copies are real samples predicted correctly.
///
/// Exact match XORs `y` into `o` with CNOTs, applies a Z controlled on every `o`
/// qubit and flag being 0, and undoes the CNOTs. Decoded matches are marked with a
/// diagonal phase over the same qubits.
pub fn apply_oracle(state: &mut QuantumState, layout: &Layout, correctness: Correctness) {
    match correctness {
        Correctness::ExactMatch => {
            let cnots: Vec<(usize, usize)> = layout
                .copies
                .iter()
                .flat_map(|c| c.y.clone().zip(c.o.clone()))
                .collect();
            for &(y, o) in &cnots {
                state.cnot(y, o);
            }
            let controls: Vec<usize> = layout
                .copies
                .iter()
                .flat_map(|c| c.o.clone().chain(c.flag))
                .collect();
            state.mcz(&controls, &vec![false; controls.len()]);
            for &(y, o) in cnots.iter().rev() {
                state.cnot(y, o);
            }
        }
        Correctness::TinyMnistDecode => state.phase_flip_where(|i| {
            layout.copies.iter().all(|c| {
                c.flag.is_none_or(|f| (i >> f) & 1 == 0)
                    && tiny_mnist_class(field(i, &c.o) as u64) == tiny_mnist_class(field(i, &c.y) as u64)
            })
        }),
    }
}

/// `ψ ← 2⟨Ψ0|ψ⟩Ψ0 − ψ`.
pub fn apply_diffusion(state: &mut QuantumState, psi0: &QuantumState) -> Result<()> {
    let overlap = psi0.inner(state)? * 2.0;
    let amps: Vec<Complex64> = psi0
        .amplitudes()
        .iter()
        .zip(state.amplitudes())
        .map(|(p, a)| overlap * p - a)
        .collect();
    state.set_amplitudes(amps)
}

/// Applies `g` Grover iterations to |Ψ0⟩ and returns the weight-register marginal.
pub fn grover_run(list: &GateList, d: &Dataset, k: u32, n_aux: usize, g: u64, cap: usize) -> Result<WeightDistribution> {
    let (psi0, layout) = prepare_initial(list, d, k, n_aux, cap)?;
    let mut state = psi0.clone();
    for _ in 0..g {
        apply_oracle(&mut state, &layout, d.correctness());
        apply_diffusion(&mut state, &psi0)?;
    }
    WeightDistribution::from_masses(state.marginal("w")?)
}
