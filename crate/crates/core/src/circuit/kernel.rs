//! In-place gate application on dense amplitude vectors.
//!
//! A vector of length `2^n` is indexed with qubit 0 as the most significant
//! bit. Controls are given as a mask/value pair over those index bits.

use num_complex::Complex64;

use crate::basis::qubit_mask;

pub type Mat2 = [[Complex64; 2]; 2];

/// Index-space control condition: a basis index `i` passes when
/// `i & mask == value`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ControlMask {
    pub mask: usize,
    pub value: usize,
}

impl ControlMask {
    pub fn from_controls(n: usize, controls: impl IntoIterator<Item = (usize, bool)>) -> Self {
        let mut c = ControlMask::default();
        for (q, on_one) in controls {
            let bit = qubit_mask(n, q);
            c.mask |= bit;
            if on_one {
                c.value |= bit;
            }
        }
        c
    }

    #[inline]
    fn passes(&self, i: usize) -> bool {
        i & self.mask == self.value
    }
}

pub fn apply_1q(state: &mut [Complex64], n: usize, target: usize, ctrl: ControlMask, m: &Mat2) {
    let t = qubit_mask(n, target);
    for i in 0..state.len() {
        if i & t != 0 || !ctrl.passes(i) {
            continue;
        }
        let j = i | t;
        let (a, b) = (state[i], state[j]);
        state[i] = m[0][0] * a + m[0][1] * b;
        state[j] = m[1][0] * a + m[1][1] * b;
    }
}

pub fn apply_swap(state: &mut [Complex64], n: usize, a: usize, b: usize, ctrl: ControlMask) {
    let (ma, mb) = (qubit_mask(n, a), qubit_mask(n, b));
    for i in 0..state.len() {
        if i & ma != 0 && i & mb == 0 && ctrl.passes(i) {
            state.swap(i, i ^ ma ^ mb);
        }
    }
}

/// Applies a `2^k x 2^k` row-major matrix to `qubits` (first listed is the
/// most significant local bit).
pub fn apply_matrix(state: &mut [Complex64], n: usize, qubits: &[usize], ctrl: ControlMask, matrix: &[Complex64]) {
    let k = qubits.len();
    let dim = 1usize << k;
    debug_assert_eq!(matrix.len(), dim * dim);
    let masks: alloc::vec::Vec<usize> = qubits.iter().map(|&q| qubit_mask(n, q)).collect();
    let all: usize = masks.iter().fold(0, |a, m| a | m);
    let offset = |local: usize| -> usize {
        masks.iter().enumerate().filter(|(pos, _)| local >> (k - 1 - pos) & 1 == 1).fold(0, |acc, (_, m)| acc | m)
    };
    let offsets: alloc::vec::Vec<usize> = (0..dim).map(offset).collect();
    let mut buf = alloc::vec![Complex64::new(0.0, 0.0); dim];
    for base in 0..state.len() {
        if base & all != 0 || !ctrl.passes(base) {
            continue;
        }
        for (slot, off) in buf.iter_mut().zip(&offsets) {
            *slot = state[base | off];
        }
        for (r, off) in offsets.iter().enumerate() {
            let row = &matrix[r * dim..(r + 1) * dim];
            state[base | off] = row.iter().zip(&buf).map(|(a, b)| a * b).sum();
        }
    }
}
