//! Classical amplitudes of coupled total-spin eigenstates.
//!
//! These are the reference states every circuit construction is checked
//! against.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::basis::{bitstring, parse_bitstring, qubit_mask};
use crate::cg::CouplingTable;
use crate::error::{Error, Result};
use crate::halfint::{HalfInt, check_projection};
use crate::tree::CouplingTree;

/// Real amplitudes of the simultaneous eigenstate of every node's squared
/// spin and of the total projection `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledState {
    tree: CouplingTree,
    m: HalfInt,
    amplitudes: Vec<f64>,
}

impl LabeledState {
    pub fn tree(&self) -> &CouplingTree {
        &self.tree
    }

    pub fn m(&self) -> HalfInt {
        self.m
    }

    pub fn n_qubits(&self) -> usize {
        self.tree.n_qubits()
    }

    /// Dense amplitudes indexed by basis index.
    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, ket: &str) -> Result<f64> {
        if ket.len() != self.n_qubits() {
            return Err(Error::DimensionMismatch { expected: self.n_qubits(), found: ket.len() });
        }
        Ok(self.amplitudes[parse_bitstring(ket)?])
    }

    /// Nonzero amplitudes as `(ket, amplitude)`, in basis order.
    pub fn nonzero(&self) -> impl Iterator<Item = (String, f64)> + '_ {
        let n = self.n_qubits();
        self.amplitudes.iter().enumerate().filter(|(_, a)| a.abs() > 1e-14).map(move |(i, &a)| (bitstring(i, n), a))
    }
}

/// Bottom-up Clebsch-Gordan expansion of `|tree; m>`.
pub fn eigenstate_amplitudes(tree: &CouplingTree, m: HalfInt) -> Result<LabeledState> {
    tree.validate()?;
    check_projection(tree.spin(), m)?;
    let n = tree.n_qubits();
    let mut amplitudes = vec![0.0; 1 << n];
    for (index, amp) in expand(tree, m, n)? {
        amplitudes[index] += amp;
    }
    let norm = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Numerical(alloc::format!("expanded state has norm {norm}")));
    }
    for a in amplitudes.iter_mut() {
        *a /= norm;
    }
    Ok(LabeledState { tree: tree.clone(), m, amplitudes })
}

/// Sparse expansion over the full register; each subtree only sets the bits
/// of its own qubits, so products are bitwise ORs.
fn expand(tree: &CouplingTree, m: HalfInt, n: usize) -> Result<Vec<(usize, f64)>> {
    match tree {
        CouplingTree::Leaf(q) => Ok(if m.twice() > 0 { vec![(0, 1.0)] } else { vec![(qubit_mask(n, *q), 1.0)] }),
        CouplingTree::Node { left, right, l } => {
            let (l1, l2) = (left.spin(), right.spin());
            let table = CouplingTable::new(l1, l2)?;
            let mut out = Vec::new();
            for m1 in l1.projections() {
                let m2 = m - m1;
                if m2.abs() > l2 {
                    continue;
                }
                let c = table.coefficient(m1, m2, *l, m);
                if c.abs() < 1e-15 {
                    continue;
                }
                let a = expand(left, m1, n)?;
                let b = expand(right, m2, n)?;
                for &(ia, va) in &a {
                    for &(ib, vb) in &b {
                        out.push((ia | ib, c * va * vb));
                    }
                }
            }
            Ok(out)
        }
    }
}
