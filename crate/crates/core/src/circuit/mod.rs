//! Gate-level circuits: representation, controlled versions, dense unitaries
//! and gate accounting. Lowering and peephole passes live in the submodules.

mod decompose;
pub mod kernel;
mod passes;

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use kernel::{ControlMask, Mat2};

pub use decompose::decompose_native;
pub use passes::{fold_cnots, simplify};

/// Largest register `unitary_of` will build.
pub const MAX_UNITARY_QUBITS: usize = 12;

const UNITARY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    /// Fires when the control is `|1>`.
    OnOne,
    /// Fires when the control is `|0>`.
    OnZero,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    Swap,
    /// Row-major `2^k x 2^k` unitary on the gate's `k` targets.
    Unitary(DMatrix<Complex64>),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::Swap => 2,
            GateKind::Unitary(m) => m.nrows().trailing_zeros() as usize,
            _ => 1,
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            GateKind::Rx(a) | GateKind::Ry(a) | GateKind::Rz(a) => Some(a),
            _ => None,
        }
    }

    /// Lower-case mnemonic used in serialized circuits.
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Rx(_) => "rx",
            GateKind::Ry(_) => "ry",
            GateKind::Rz(_) => "rz",
            GateKind::Swap => "swap",
            GateKind::Unitary(_) => "unitary",
        }
    }

    /// 2x2 matrix of a single-qubit kind.
    pub fn matrix_1q(&self) -> Option<Mat2> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        Some(match self {
            GateKind::X => [[z, one], [one, z]],
            GateKind::Y => [[z, c(0.0, -1.0)], [c(0.0, 1.0), z]],
            GateKind::Z => [[one, z], [z, -one]],
            GateKind::H => {
                let h = c(FRAC_1_SQRT_2, 0.0);
                [[h, h], [h, -h]]
            }
            GateKind::S => [[one, z], [z, c(0.0, 1.0)]],
            GateKind::Sdg => [[one, z], [z, c(0.0, -1.0)]],
            GateKind::T => [[one, z], [z, Complex64::from_polar(1.0, core::f64::consts::FRAC_PI_4)]],
            GateKind::Tdg => [[one, z], [z, Complex64::from_polar(1.0, -core::f64::consts::FRAC_PI_4)]],
            GateKind::Rx(a) => {
                let (s, co) = (a / 2.0).sin_cos();
                [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
            }
            GateKind::Ry(a) => {
                let (s, co) = (a / 2.0).sin_cos();
                [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
            }
            GateKind::Rz(a) => [[Complex64::from_polar(1.0, -a / 2.0), z], [z, Complex64::from_polar(1.0, a / 2.0)]],
            GateKind::Unitary(m) if m.nrows() == 2 => [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]],
            _ => return None,
        })
    }
}

/// A gate on `targets`, optionally conditioned on `controls`.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    kind: GateKind,
    targets: Vec<usize>,
    controls: Vec<(usize, Polarity)>,
}

impl Gate {
    /// Checks arity, distinct qubits and, for custom matrices, unitarity.
    pub fn new(kind: GateKind, targets: Vec<usize>, controls: Vec<(usize, Polarity)>) -> Result<Self> {
        if let GateKind::Unitary(m) = &kind {
            check_unitary(m)?;
        }
        if targets.len() != kind.arity() {
            return Err(Error::InvalidGate(alloc::format!(
                "{} acts on {} qubits, got {}",
                kind.name(),
                kind.arity(),
                targets.len()
            )));
        }
        let gate = Gate { kind, targets, controls };
        let qubits = gate.qubits();
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(Error::ControlCollision(*q));
            }
        }
        Ok(gate)
    }

    fn plain(kind: GateKind, q: usize) -> Self {
        Gate { kind, targets: vec![q], controls: Vec::new() }
    }

    pub fn x(q: usize) -> Self {
        Self::plain(GateKind::X, q)
    }
    pub fn y(q: usize) -> Self {
        Self::plain(GateKind::Y, q)
    }
    pub fn z(q: usize) -> Self {
        Self::plain(GateKind::Z, q)
    }
    pub fn h(q: usize) -> Self {
        Self::plain(GateKind::H, q)
    }
    pub fn rx(q: usize, angle: f64) -> Self {
        Self::plain(GateKind::Rx(angle), q)
    }
    pub fn ry(q: usize, angle: f64) -> Self {
        Self::plain(GateKind::Ry(angle), q)
    }
    pub fn rz(q: usize, angle: f64) -> Self {
        Self::plain(GateKind::Rz(angle), q)
    }

    /// Panics if `control == target`.
    pub fn cnot(control: usize, target: usize) -> Self {
        assert_ne!(control, target, "CNOT control equals target");
        Gate { kind: GateKind::X, targets: vec![target], controls: vec![(control, Polarity::OnOne)] }
    }

    pub fn swap(a: usize, b: usize) -> Result<Self> {
        Gate::new(GateKind::Swap, vec![a, b], Vec::new())
    }

    pub fn unitary(targets: Vec<usize>, matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() || !matrix.nrows().is_power_of_two() || matrix.nrows() < 2 {
            return Err(Error::InvalidGate("custom matrix must be 2^k x 2^k".into()));
        }
        Gate::new(GateKind::Unitary(matrix), targets, Vec::new())
    }

    /// Adds one more control.
    pub fn controlled(mut self, control: usize, polarity: Polarity) -> Result<Self> {
        if self.qubits().contains(&control) {
            return Err(Error::ControlCollision(control));
        }
        self.controls.push((control, polarity));
        Ok(self)
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn controls(&self) -> &[(usize, Polarity)] {
        &self.controls
    }

    /// Controls followed by targets.
    pub fn qubits(&self) -> Vec<usize> {
        self.controls.iter().map(|&(q, _)| q).chain(self.targets.iter().copied()).collect()
    }

    pub fn is_cnot(&self) -> bool {
        self.kind == GateKind::X && self.controls.len() == 1 && self.controls[0].1 == Polarity::OnOne
    }

    /// Uncontrolled member of `{X, Y, Z, H, Rx, Ry, Rz}`.
    pub fn is_native_single(&self) -> bool {
        self.controls.is_empty()
            && matches!(
                self.kind,
                GateKind::X
                    | GateKind::Y
                    | GateKind::Z
                    | GateKind::H
                    | GateKind::Rx(_)
                    | GateKind::Ry(_)
                    | GateKind::Rz(_)
            )
    }

    pub fn is_native(&self) -> bool {
        self.is_cnot() || self.is_native_single()
    }

    /// Applies the gate to an amplitude vector of an `n`-qubit register whose
    /// qubit `q` sits at index bit position of qubit `q + offset`; `conjugate`
    /// applies the complex-conjugate matrix.
    pub(crate) fn apply(&self, state: &mut [Complex64], n: usize, offset: usize, conjugate: bool) {
        let ctrl =
            ControlMask::from_controls(n, self.controls.iter().map(|&(q, p)| (q + offset, p == Polarity::OnOne)));
        match &self.kind {
            GateKind::Swap => kernel::apply_swap(state, n, self.targets[0] + offset, self.targets[1] + offset, ctrl),
            GateKind::Unitary(m) if m.nrows() > 2 => {
                let dim = m.nrows();
                let mut flat = Vec::with_capacity(dim * dim);
                for r in 0..dim {
                    for c in 0..dim {
                        flat.push(if conjugate { m[(r, c)].conj() } else { m[(r, c)] });
                    }
                }
                let qubits: Vec<usize> = self.targets.iter().map(|q| q + offset).collect();
                kernel::apply_matrix(state, n, &qubits, ctrl, &flat);
            }
            kind => {
                let mut m = kind.matrix_1q().expect("single-qubit kind");
                if conjugate {
                    for row in m.iter_mut() {
                        for v in row.iter_mut() {
                            *v = v.conj();
                        }
                    }
                }
                kernel::apply_1q(state, n, self.targets[0] + offset, ctrl, &m);
            }
        }
    }
}

fn check_unitary(m: &DMatrix<Complex64>) -> Result<()> {
    let dim = m.nrows();
    if !m.is_square() {
        return Err(Error::InvalidGate("custom matrix is not square".into()));
    }
    let defect =
        (m.adjoint() * m - DMatrix::<Complex64>::identity(dim, dim)).iter().map(|v| v.norm()).fold(0.0, f64::max);
    if defect > UNITARY_TOL {
        return Err(Error::InvalidGate(alloc::format!("custom matrix is not unitary (defect {defect:e})")));
    }
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Circuit { n, gates: Vec::new() }
    }

    pub fn from_gates(n: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut c = Circuit::new(n);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if let Some(&q) = gate.qubits().iter().find(|&&q| q >= self.n) {
            return Err(Error::QubitOutOfRange { qubit: q, n: self.n });
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Appends `other`, widening the register if needed.
    pub fn append(&mut self, other: &Circuit) {
        self.n = self.n.max(other.n);
        self.gates.extend(other.gates.iter().cloned());
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Same gates on a register of `n` qubits.
    pub fn widened(&self, n: usize) -> Result<Self> {
        Circuit::from_gates(n, self.gates.iter().cloned())
    }

    pub fn is_native(&self) -> bool {
        self.gates.iter().all(Gate::is_native)
    }

    /// Runs every gate on an amplitude vector over `n_qubits` qubits.
    pub fn apply_to(&self, state: &mut [Complex64]) {
        for g in &self.gates {
            g.apply(state, self.n, 0, false);
        }
    }
}

/// Conditions every gate of `circuit` on `control`. The result acts on
/// `max(n, control + 1)` qubits.
pub fn control_wrap(circuit: &Circuit, control: usize, polarity: Polarity) -> Result<Circuit> {
    let n = circuit.n.max(control + 1);
    let mut out = Circuit::new(n);
    for g in &circuit.gates {
        out.push(g.clone().controlled(control, polarity)?)?;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub cnot: usize,
    pub single_qubit: usize,
    /// Gates outside the native set.
    pub other: usize,
    pub depth: usize,
}

/// Native gate counts and depth (longest chain of gates sharing a qubit).
pub fn counts(circuit: &Circuit) -> GateCounts {
    let mut out = GateCounts::default();
    let mut level = vec![0usize; circuit.n];
    for g in &circuit.gates {
        if g.is_cnot() {
            out.cnot += 1;
        } else if g.is_native_single() {
            out.single_qubit += 1;
        } else {
            out.other += 1;
        }
        let qubits = g.qubits();
        let l = qubits.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
        for q in qubits {
            level[q] = l;
        }
        out.depth = out.depth.max(l);
    }
    out
}

/// Like [`counts`], but single-qubit gates are counted as arbitrary
/// single-qubit unitaries: a run of consecutive uncontrolled single-qubit
/// gates on one wire counts once.
pub fn counts_fused(circuit: &Circuit) -> GateCounts {
    let mut out = counts(circuit);
    out.single_qubit = 0;
    let mut in_run = vec![false; circuit.n];
    for g in &circuit.gates {
        if g.is_native_single() {
            let q = g.targets[0];
            if !in_run[q] {
                out.single_qubit += 1;
                in_run[q] = true;
            }
        } else {
            for q in g.qubits() {
                in_run[q] = false;
            }
        }
    }
    out
}

/// Dense unitary, column `j` being the image of basis state `j`.
pub fn unitary_of(circuit: &Circuit) -> Result<DMatrix<Complex64>> {
    let n = circuit.n;
    if n > MAX_UNITARY_QUBITS {
        return Err(Error::RegisterTooLarge { n, max: MAX_UNITARY_QUBITS });
    }
    let dim = 1usize << n;
    let mut u = DMatrix::zeros(dim, dim);
    let mut col = vec![Complex64::new(0.0, 0.0); dim];
    for j in 0..dim {
        col.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        col[j] = Complex64::new(1.0, 0.0);
        circuit.apply_to(&mut col);
        u.set_column(j, &nalgebra::DVector::from_column_slice(&col));
    }
    Ok(u)
}

/// `|Tr(A^dagger B)| / dim`: 1 exactly when `A` and `B` agree up to global phase.
pub fn phase_insensitive_overlap(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let dim = a.nrows() as f64;
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm() / dim
}
