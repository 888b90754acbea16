//! Dense state-vector and density-matrix simulation with a depolarizing
//! gate-noise model, classical readout error and seeded shot sampling.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[allow(unused_imports)]
use num_traits::Float;

use crate::basis::{bitstring, qubit_mask};
use crate::circuit::{Circuit, decompose_native};
use crate::error::{Error, Result};
use crate::pauli::{PauliExpectation, PauliString};

pub const MAX_STATEVECTOR_QUBITS: usize = 12;
pub const MAX_DENSITY_QUBITS: usize = 6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn zero_state(n: usize) -> Result<Self> {
        check_size(n, MAX_STATEVECTOR_QUBITS)?;
        let mut amplitudes = vec![ZERO; 1 << n];
        amplitudes[0] = ONE;
        Ok(StateVector { n, amplitudes })
    }

    /// Normalized copy of `amplitudes`; the length must be a power of two.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(Error::DimensionMismatch { expected: len.next_power_of_two(), found: len });
        }
        let n = len.trailing_zeros() as usize;
        check_size(n, MAX_STATEVECTOR_QUBITS)?;
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Numerical("state vector has zero or non-finite norm".into()));
        }
        Ok(StateVector { n, amplitudes: amplitudes.into_iter().map(|a| a / norm).collect() })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::from_amplitudes(amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `|<self|other>|^2`.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        check_dims(self.n, other.n)?;
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum::<Complex64>().norm_sqr())
    }

    /// Born probabilities after running `basis_change` on a copy of the state.
    pub fn probabilities(&self, basis_change: &Circuit) -> Result<Vec<f64>> {
        check_dims(self.n, basis_change.n_qubits())?;
        let mut s = self.amplitudes.clone();
        basis_change.apply_to(&mut s);
        Ok(s.iter().map(|a| a.norm_sqr()).collect())
    }
}

impl PauliExpectation for StateVector {
    fn n_qubits(&self) -> usize {
        self.n
    }

    fn pauli_expectation(&self, p: &PauliString) -> f64 {
        let (flip, phase) = p.action();
        self.amplitudes.iter().enumerate().map(|(i, a)| (self.amplitudes[i ^ flip].conj() * phase(i) * a).re).sum()
    }
}

/// Row-major `2^n x 2^n` density matrix.
///
/// Stored as a `2n`-qubit vector: row bits are qubits `0..n`, column bits
/// qubits `n..2n`, so `U rho U^dag` is `U` on the first half and `conj(U)` on
/// the second.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn zero_state(n: usize) -> Result<Self> {
        check_size(n, MAX_DENSITY_QUBITS)?;
        let mut data = vec![ZERO; 1 << (2 * n)];
        data[0] = ONE;
        Ok(DensityMatrix { n, data })
    }

    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        check_size(psi.n, MAX_DENSITY_QUBITS)?;
        let dim = 1 << psi.n;
        let mut data = vec![ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[r * dim + c] = psi.amplitudes[r] * psi.amplitudes[c].conj();
            }
        }
        Ok(DensityMatrix { n: psi.n, data })
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_size(n, MAX_DENSITY_QUBITS)?;
        let dim = 1 << n;
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Ok(DensityMatrix { n, data })
    }

    /// Wraps a matrix without checking positivity or trace.
    pub fn from_matrix(m: &DMatrix<Complex64>) -> Result<Self> {
        let dim = m.nrows();
        if !m.is_square() || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch { expected: dim.next_power_of_two(), found: dim });
        }
        let n = dim.trailing_zeros() as usize;
        check_size(n, MAX_DENSITY_QUBITS)?;
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(m[(r, c)]);
            }
        }
        Ok(DensityMatrix { n, data })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim(), self.dim(), &self.data)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let m = self.to_matrix();
        let herm = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest entry of `rho - rho^dag`.
    pub fn hermiticity_defect(&self) -> f64 {
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..dim {
            for c in 0..dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// `U rho U^dag` for every gate of `circuit`, without noise.
    pub fn evolve(&mut self, circuit: &Circuit) -> Result<()> {
        check_dims(self.n, circuit.n_qubits())?;
        for g in circuit.gates() {
            g.apply(&mut self.data, 2 * self.n, 0, false);
            g.apply(&mut self.data, 2 * self.n, self.n, true);
        }
        Ok(())
    }

    /// `rho -> (1 - p) rho + p Tr_S(rho) (x) I / 2^|S|` on the qubits `S`.
    pub fn depolarize(&mut self, qubits: &[usize], p: f64) -> Result<()> {
        if let Some(&q) = qubits.iter().find(|&&q| q >= self.n) {
            return Err(Error::QubitOutOfRange { qubit: q, n: self.n });
        }
        if p == 0.0 {
            return Ok(());
        }
        let dim = self.dim();
        let mask = qubits.iter().fold(0, |m, &q| m | qubit_mask(self.n, q));
        let subsets: Vec<usize> = (0..=mask).filter(|s| s & !mask == 0).collect();
        let weight = p / subsets.len() as f64;
        let old = self.data.clone();
        for v in self.data.iter_mut() {
            *v *= 1.0 - p;
        }
        for r in 0..dim {
            for c in 0..dim {
                if r & mask != c & mask {
                    continue;
                }
                let (rb, cb) = (r & !mask, c & !mask);
                let traced: Complex64 = subsets.iter().map(|s| old[(rb | s) * dim + (cb | s)]).sum();
                self.data[r * dim + c] += traced * weight;
            }
        }
        Ok(())
    }

    /// Diagonal of `V rho V^dag` for the basis change `V`.
    pub fn probabilities(&self, basis_change: &Circuit) -> Result<Vec<f64>> {
        let mut rotated = self.clone();
        rotated.evolve(basis_change)?;
        Ok((0..self.dim()).map(|i| rotated.get(i, i).re.max(0.0)).collect())
    }
}

impl PauliExpectation for DensityMatrix {
    fn n_qubits(&self) -> usize {
        self.n
    }

    /// `Re Tr(rho P)`.
    fn pauli_expectation(&self, p: &PauliString) -> f64 {
        let (flip, phase) = p.action();
        (0..self.dim()).map(|i| (phase(i) * self.get(i, i ^ flip)).re).sum()
    }
}

/// `<psi| rho |psi>`.
pub fn fidelity(rho: &DensityMatrix, psi: &StateVector) -> Result<f64> {
    check_dims(rho.n, psi.n)?;
    let dim = rho.dim();
    let mut acc = ZERO;
    for r in 0..dim {
        let row: Complex64 = (0..dim).map(|c| rho.get(r, c) * psi.amplitudes[c]).sum();
        acc += psi.amplitudes[r].conj() * row;
    }
    Ok(acc.re)
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

/// Column-stochastic readout confusion matrix, `m[measured][prepared]`.
pub type Confusion = [[f64; 2]; 2];

pub const PERFECT_READOUT: Confusion = [[1.0, 0.0], [0.0, 1.0]];

/// Symmetric bit-flip readout error.
pub fn flip_confusion(p: f64) -> Confusion {
    [[1.0 - p, p], [p, 1.0 - p]]
}

/// Depolarizing noise after every native gate plus readout confusion.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseModel {
    pub p1: f64,
    pub p2: f64,
    /// Empty (perfect), one matrix for every qubit, or one per qubit.
    pub readout: Vec<Confusion>,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel { p1: 0.001, p2: 0.01, readout: vec![flip_confusion(0.02)] }
    }
}

impl NoiseModel {
    pub fn ideal() -> Self {
        NoiseModel { p1: 0.0, p2: 0.0, readout: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p1", self.p1), ("p2", self.p2)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidNoise(alloc::format!("{name} = {p} is not a probability")));
            }
        }
        for (q, m) in self.readout.iter().enumerate() {
            for col in 0..2 {
                let (a, b) = (m[0][col], m[1][col]);
                if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || (a + b - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidNoise(alloc::format!(
                        "readout matrix {q} column {col} is not a distribution"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Confusion matrix for `qubit` on an `n`-qubit register.
    pub fn readout_for(&self, qubit: usize, n: usize) -> Result<Confusion> {
        match self.readout.len() {
            0 => Ok(PERFECT_READOUT),
            1 => Ok(self.readout[0]),
            len if len == n => Ok(self.readout[qubit]),
            len => Err(Error::InvalidNoise(alloc::format!("{len} readout matrices for a {n}-qubit register"))),
        }
    }

    pub fn readout_matrices(&self, n: usize) -> Result<Vec<Confusion>> {
        (0..n).map(|q| self.readout_for(q, n)).collect()
    }

    pub fn with_p2(&self, p2: f64) -> Self {
        NoiseModel { p2, ..self.clone() }
    }
}

pub fn run_statevector(circuit: &Circuit) -> Result<StateVector> {
    let mut s = StateVector::zero_state(circuit.n_qubits())?;
    circuit.apply_to(&mut s.amplitudes);
    Ok(s)
}

/// Noisy evolution of `|0...0><0...0|`. Non-native gates are lowered first so
/// noise is charged per native gate: `p1` after single-qubit gates, `p2` on
/// both qubits after each CNOT. Readout error is left to sampling.
pub fn run_density(circuit: &Circuit, noise: &NoiseModel) -> Result<DensityMatrix> {
    noise.validate()?;
    let mut rho = DensityMatrix::zero_state(circuit.n_qubits())?;
    let lowered;
    let native = if circuit.is_native() {
        circuit
    } else {
        lowered = decompose_native(circuit)?;
        &lowered
    };
    let n = rho.n;
    for g in native.gates() {
        g.apply(&mut rho.data, 2 * n, 0, false);
        g.apply(&mut rho.data, 2 * n, n, true);
        if g.is_cnot() {
            rho.depolarize(&g.qubits(), noise.p2)?;
        } else {
            rho.depolarize(g.targets(), noise.p1)?;
        }
    }
    Ok(rho)
}

/// Pushes a distribution through independent per-qubit confusion matrices.
pub fn apply_readout(probabilities: &[f64], confusion: &[Confusion]) -> Result<Vec<f64>> {
    let n = confusion.len();
    if probabilities.len() != 1 << n {
        return Err(Error::DimensionMismatch { expected: 1 << n, found: probabilities.len() });
    }
    let mut p = probabilities.to_vec();
    for (q, m) in confusion.iter().enumerate() {
        if *m == PERFECT_READOUT {
            continue;
        }
        let bit = qubit_mask(n, q);
        for i in 0..p.len() {
            if i & bit != 0 {
                continue;
            }
            let (p0, p1) = (p[i], p[i | bit]);
            p[i] = m[0][0] * p0 + m[0][1] * p1;
            p[i | bit] = m[1][0] * p0 + m[1][1] * p1;
        }
    }
    Ok(p)
}

/// Either exact probabilities or a finite number of samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shots {
    Exact,
    Finite(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotResult {
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
    pub seed: u64,
}

impl ShotResult {
    /// Relative frequencies indexed by basis index.
    pub fn frequencies(&self, n: usize) -> Result<Vec<f64>> {
        let mut f = vec![0.0; 1 << n];
        for (bits, &count) in &self.counts {
            if bits.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: bits.len() });
            }
            f[crate::basis::parse_bitstring(bits)?] += count as f64 / self.shots as f64;
        }
        Ok(f)
    }
}

/// Draws `shots` outcomes from `probabilities` (renormalized) with a ChaCha8
/// stream keyed by `seed`.
pub fn sample_distribution(probabilities: &[f64], n: usize, shots: u64, seed: u64) -> Result<ShotResult> {
    if shots == 0 {
        return Err(Error::Numerical("at least one shot is required".into()));
    }
    let mut cdf = Vec::with_capacity(probabilities.len());
    let mut acc = 0.0;
    for &p in probabilities {
        acc += p.max(0.0);
        cdf.push(acc);
    }
    if !(acc > 0.0) {
        return Err(Error::Numerical("distribution has no weight".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = vec![0u64; probabilities.len()];
    for _ in 0..shots {
        let u: f64 = rng.random::<f64>() * acc;
        let k = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        tally[k] += 1;
    }
    let counts = tally.into_iter().enumerate().filter(|&(_, c)| c > 0).map(|(i, c)| (bitstring(i, n), c)).collect();
    Ok(ShotResult { counts, shots, seed })
}

/// States whose measurement statistics can be computed.
pub trait Measurable {
    fn n_qubits(&self) -> usize;
    fn probabilities(&self, basis_change: &Circuit) -> Result<Vec<f64>>;
}

impl Measurable for StateVector {
    fn n_qubits(&self) -> usize {
        self.n
    }
    fn probabilities(&self, basis_change: &Circuit) -> Result<Vec<f64>> {
        StateVector::probabilities(self, basis_change)
    }
}

impl Measurable for DensityMatrix {
    fn n_qubits(&self) -> usize {
        self.n
    }
    fn probabilities(&self, basis_change: &Circuit) -> Result<Vec<f64>> {
        DensityMatrix::probabilities(self, basis_change)
    }
}

/// Outcome distribution seen by the detector: Born probabilities after the
/// basis change, then readout confusion.
pub fn measured_distribution<S: Measurable + ?Sized>(
    state: &S,
    basis_change: &Circuit,
    noise: &NoiseModel,
) -> Result<Vec<f64>> {
    let n = state.n_qubits();
    let p = state.probabilities(basis_change)?;
    apply_readout(&p, &noise.readout_matrices(n)?)
}

pub fn sample<S: Measurable + ?Sized>(
    state: &S,
    basis_change: &Circuit,
    shots: u64,
    noise: &NoiseModel,
    seed: u64,
) -> Result<ShotResult> {
    let p = measured_distribution(state, basis_change, noise)?;
    sample_distribution(&p, state.n_qubits(), shots, seed)
}

/// Exact distribution, or the empirical one from `shots` samples.
pub fn observed_distribution<S: Measurable + ?Sized>(
    state: &S,
    basis_change: &Circuit,
    shots: Shots,
    noise: &NoiseModel,
    seed: u64,
) -> Result<Vec<f64>> {
    match shots {
        Shots::Exact => measured_distribution(state, basis_change, noise),
        Shots::Finite(k) => sample(state, basis_change, k, noise, seed)?.frequencies(state.n_qubits()),
    }
}

fn check_size(n: usize, max: usize) -> Result<()> {
    if n > max {
        return Err(Error::RegisterTooLarge { n, max });
    }
    Ok(())
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}
