//! Pauli strings, real-weighted Pauli sums and the spin observables built
//! from them.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::qubit_mask;
use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

pub const MAX_PAULI_QUBITS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }
}

/// An `n`-qubit Pauli string, two bits per qubit (`x`, `z`), bit `q` for qubit `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString { n, x: 0, z: 0 }
    }

    pub fn from_letters(letters: &[Pauli]) -> Result<Self> {
        let n = letters.len();
        if n > MAX_PAULI_QUBITS {
            return Err(Error::RegisterTooLarge { n, max: MAX_PAULI_QUBITS });
        }
        let mut p = PauliString::identity(n);
        for (q, &letter) in letters.iter().enumerate() {
            p = p.with(q, letter);
        }
        Ok(p)
    }

    /// Single-letter string `letter` on `qubit`, identity elsewhere.
    pub fn single(n: usize, qubit: usize, letter: Pauli) -> Result<Self> {
        if qubit >= n {
            return Err(Error::QubitOutOfRange { qubit, n });
        }
        Ok(PauliString::identity(n).with(qubit, letter))
    }

    fn with(mut self, qubit: usize, letter: Pauli) -> Self {
        let (x, z) = letter.bits();
        let bit = 1u64 << qubit;
        self.x = if x { self.x | bit } else { self.x & !bit };
        self.z = if z { self.z | bit } else { self.z & !bit };
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        let bit = 1u64 << qubit;
        match (self.x & bit != 0, self.z & bit != 0) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn letters(&self) -> Vec<Pauli> {
        (0..self.n).map(|q| self.get(q)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Qubits carrying a non-identity letter.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&q| (self.x | self.z) >> q & 1 == 1)
    }

    /// `(x, z, y_count)` with masks moved to basis-index bit positions.
    fn index_masks(&self) -> (usize, usize, u32) {
        let mut x = 0;
        let mut z = 0;
        for q in 0..self.n {
            if self.x >> q & 1 == 1 {
                x |= qubit_mask(self.n, q);
            }
            if self.z >> q & 1 == 1 {
                z |= qubit_mask(self.n, q);
            }
        }
        (x, z, (self.x & self.z).count_ones())
    }

    /// `P |i> = phase(i) |i ^ flip>`; returns `flip` and a closure for the phase.
    pub(crate) fn action(&self) -> (usize, impl Fn(usize) -> Complex64 + use<>) {
        let (x, z, ny) = self.index_masks();
        let base = match ny % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        (x, move |i: usize| if (i & z).count_ones().is_multiple_of(2) { base } else { -base })
    }

    /// Mask of the support in basis-index bit positions.
    pub(crate) fn support_index_mask(&self) -> usize {
        self.support().fold(0, |acc, q| acc | qubit_mask(self.n, q))
    }

    /// Qubit-wise commuting: on every qubit the letters agree or one is `I`.
    pub fn qubitwise_commutes(&self, other: &PauliString) -> bool {
        (0..self.n.min(other.n)).all(|q| {
            let (a, b) = (self.get(q), other.get(q));
            a == Pauli::I || b == Pauli::I || a == b
        })
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n;
        let mut m = DMatrix::zeros(dim, dim);
        let (flip, phase) = self.action();
        for i in 0..dim {
            m[(i ^ flip, i)] = phase(i);
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", self.get(q).letter())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters: Option<Vec<Pauli>> = s.chars().map(Pauli::from_letter).collect();
        let letters = letters.ok_or_else(|| Error::InvalidLabel(alloc::format!("not a Pauli string: {s:?}")))?;
        PauliString::from_letters(&letters)
    }
}

/// States that can report Pauli-string expectation values.
pub trait PauliExpectation {
    fn n_qubits(&self) -> usize;
    fn pauli_expectation(&self, p: &PauliString) -> f64;
}

/// Real-weighted sum of Pauli strings on `n` qubits.
///
/// Terms keep the order in which their strings first appeared; duplicates
/// are merged and weights below `1e-15` dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableSum {
    n: usize,
    terms: Vec<(f64, PauliString)>,
}

const DROP_BELOW: f64 = 1e-15;

impl ObservableSum {
    pub fn zero(n: usize) -> Self {
        ObservableSum { n, terms: Vec::new() }
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (f64, PauliString)>) -> Result<Self> {
        let mut acc: Vec<(f64, PauliString)> = Vec::new();
        let mut index: BTreeMap<PauliString, usize> = BTreeMap::new();
        for (c, p) in terms {
            if p.n_qubits() != n {
                return Err(Error::DimensionMismatch { expected: n, found: p.n_qubits() });
            }
            match index.get(&p) {
                Some(&k) => acc[k].0 += c,
                None => {
                    index.insert(p, acc.len());
                    acc.push((c, p));
                }
            }
        }
        acc.retain(|(c, _)| c.abs() >= DROP_BELOW);
        Ok(ObservableSum { n, terms: acc })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let terms = self.terms.iter().map(|&(c, p)| (c * factor, p));
        ObservableSum::from_terms(self.n, terms).expect("same register")
    }

    pub fn plus(&self, other: &ObservableSum) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        ObservableSum::from_terms(self.n, self.terms.iter().chain(other.terms.iter()).copied())
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n;
        let mut m = DMatrix::zeros(dim, dim);
        for (c, p) in &self.terms {
            let (flip, phase) = p.action();
            for i in 0..dim {
                m[(i ^ flip, i)] += phase(i) * *c;
            }
        }
        m
    }

    /// `sum_k c_k <P_k>`.
    pub fn expectation<S: PauliExpectation + ?Sized>(&self, state: &S) -> Result<f64> {
        if state.n_qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: state.n_qubits() });
        }
        Ok(self.terms.iter().map(|(c, p)| c * state.pauli_expectation(p)).sum())
    }
}

/// `S_z = sum_i Z_i / 2`.
pub fn total_sz(n: usize) -> Result<ObservableSum> {
    let terms = (0..n).map(|q| PauliString::single(n, q, Pauli::Z).map(|p| (0.5, p))).collect::<Result<Vec<_>>>()?;
    ObservableSum::from_terms(n, terms)
}

/// Squared total spin of the qubits in `subset`:
/// `3|subset|/4 + 1/2 sum_{i<j} (X_i X_j + Y_i Y_j + Z_i Z_j)`.
pub fn subset_s2(n: usize, subset: &[usize]) -> Result<ObservableSum> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut qubits: Vec<usize> = subset.to_vec();
    qubits.sort_unstable();
    qubits.dedup();
    if let Some(&q) = qubits.iter().find(|&&q| q >= n) {
        return Err(Error::QubitOutOfRange { qubit: q, n });
    }
    let mut terms = vec![(0.75 * qubits.len() as f64, PauliString::identity(n))];
    for (a, &i) in qubits.iter().enumerate() {
        for &j in &qubits[a + 1..] {
            for letter in [Pauli::X, Pauli::Y, Pauli::Z] {
                let p = PauliString::identity(n).with(i, letter).with(j, letter);
                terms.push((0.5, p));
            }
        }
    }
    ObservableSum::from_terms(n, terms)
}

pub fn total_s2(n: usize) -> Result<ObservableSum> {
    let all: Vec<usize> = (0..n).collect();
    subset_s2(n, &all)
}

/// One local measurement basis and the terms it estimates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementSetting {
    /// Per-qubit basis; `I` where no term constrains the qubit (read out in Z).
    pub bases: Vec<Pauli>,
    /// Indices into the observable's terms.
    pub terms: Vec<usize>,
}

impl MeasurementSetting {
    fn accepts(&self, p: &PauliString) -> bool {
        p.support().all(|q| self.bases[q] == Pauli::I || self.bases[q] == p.get(q))
    }

    fn absorb(&mut self, p: &PauliString) {
        for q in p.support().collect::<Vec<_>>() {
            self.bases[q] = p.get(q);
        }
    }

    /// Basis label with `Z` for unconstrained qubits, e.g. `"XXZ"`.
    pub fn basis_change(&self) -> Circuit {
        basis_change(&self.bases)
    }

    pub fn label(&self) -> String {
        self.bases.iter().map(|&b| if b == Pauli::I { 'Z' } else { b.letter() }).collect()
    }
}

/// Gates rotating each qubit's `bases` eigenbasis onto the computational
/// basis: `H` for `X`, `Rx(pi/2)` for `Y`, nothing for `Z` and `I`.
pub fn basis_change(bases: &[Pauli]) -> Circuit {
    let mut c = Circuit::new(bases.len());
    for (q, b) in bases.iter().enumerate() {
        match b {
            Pauli::X => c.push(Gate::h(q)).expect("qubit in range"),
            Pauli::Y => c.push(Gate::rx(q, core::f64::consts::FRAC_PI_2)).expect("qubit in range"),
            Pauli::I | Pauli::Z => {}
        }
    }
    c
}

/// Greedy first-fit partition of the terms into qubit-wise commuting groups.
/// Identity terms go to the first group.
pub fn grouping(obs: &ObservableSum) -> Vec<MeasurementSetting> {
    let mut groups: Vec<MeasurementSetting> = Vec::new();
    let mut identities = Vec::new();
    for (k, (_, p)) in obs.terms.iter().enumerate() {
        if p.is_identity() {
            identities.push(k);
            continue;
        }
        match groups.iter_mut().find(|g| g.accepts(p)) {
            Some(g) => {
                g.absorb(p);
                g.terms.push(k);
            }
            None => {
                let mut g = MeasurementSetting { bases: vec![Pauli::I; obs.n], terms: vec![k] };
                g.absorb(p);
                groups.push(g);
            }
        }
    }
    if !identities.is_empty() {
        if groups.is_empty() {
            groups.push(MeasurementSetting { bases: vec![Pauli::I; obs.n], terms: Vec::new() });
        }
        let first = &mut groups[0];
        first.terms.extend(identities);
        first.terms.sort_unstable();
    }
    groups
}

/// Expectation of `p` from outcome probabilities measured in a basis
/// compatible with `p`: the mean parity of the outcome bits on its support.
pub fn parity_expectation(p: &PauliString, probabilities: &[f64]) -> f64 {
    let mask = p.support_index_mask();
    probabilities
        .iter()
        .enumerate()
        .map(|(b, &pr)| if (b & mask).count_ones().is_multiple_of(2) { pr } else { -pr })
        .sum()
}

/// Estimates `obs` from per-setting outcome distributions (same order as
/// `grouping(obs)`).
pub fn estimate_from_distributions(
    obs: &ObservableSum,
    settings: &[MeasurementSetting],
    distributions: &[Vec<f64>],
) -> Result<f64> {
    if settings.len() != distributions.len() {
        return Err(Error::DimensionMismatch { expected: settings.len(), found: distributions.len() });
    }
    let mut total = 0.0;
    for (setting, dist) in settings.iter().zip(distributions) {
        for &k in &setting.terms {
            let (c, p) = &obs.terms[k];
            total += c * parity_expectation(p, dist);
        }
    }
    Ok(total)
}
