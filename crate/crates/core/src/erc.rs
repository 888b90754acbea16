//! Exact recursive construction of circuits that prepare coupled total-spin
//! eigenstates from `|0...0>`, and the gate-count recursion model.
//!
//! Spins are coupled one at a time: the `n`-th qubit is added to the state of
//! the first `n - 1` qubits. Writing that state as
//!
//! ```text
//! |l1, l; m> = psi_up |l1, m - 1/2> |0> + psi_down |l1, m + 1/2> |1>
//! ```
//!
//! the new qubit is rotated by `Ry(theta)` with `cos(theta/2) = psi_up`, then
//! the two branch circuits for the smaller register run conditioned on it.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

#[allow(unused_imports)]
use num_traits::Float;

use crate::cg::mixing_angle;
use crate::circuit::{Circuit, Gate, Polarity, control_wrap};
use crate::eigenstate::eigenstate_amplitudes;
use crate::error::{Error, Result};
use crate::halfint::{HalfInt, SpinLabel, check_projection};
use crate::tree::{CouplingTree, TreeShape};

/// Intermediate spins `l^(2), ..., l^(n)` of a chain tree and the final
/// projection. `l^(1) = 1/2` is implicit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainLabels {
    spins: Vec<HalfInt>,
    m: HalfInt,
}

impl ChainLabels {
    pub fn new(spins: Vec<HalfInt>, m: HalfInt) -> Result<Self> {
        let mut prev = HalfInt::HALF;
        for &l in &spins {
            if l.twice() < 0 {
                return Err(Error::NegativeSpin(l));
            }
            if (l - prev).abs() != HalfInt::HALF {
                return Err(Error::Triangle { l1: prev, l2: HalfInt::HALF, l });
            }
            prev = l;
        }
        check_projection(prev, m)?;
        Ok(ChainLabels { spins, m })
    }

    /// Labels of a tree shaped exactly like `TreeShape::chain(n)`.
    pub fn from_tree(tree: &CouplingTree, m: HalfInt) -> Result<Self> {
        if tree.shape() != TreeShape::chain(tree.n_qubits())? {
            return Err(Error::InvalidTree("not a chain tree".into()));
        }
        ChainLabels::new(tree.labels(), m)
    }

    pub fn n_qubits(&self) -> usize {
        self.spins.len() + 1
    }

    pub fn spins(&self) -> &[HalfInt] {
        &self.spins
    }

    pub fn m(&self) -> HalfInt {
        self.m
    }

    /// Total spin `l^(n)`.
    pub fn l(&self) -> HalfInt {
        self.spins.last().copied().unwrap_or(HalfInt::HALF)
    }

    pub fn tree(&self) -> CouplingTree {
        CouplingTree::chain(&self.spins).expect("validated labels")
    }

    fn prefix(&self, m: HalfInt) -> ChainLabels {
        ChainLabels { spins: self.spins[..self.spins.len() - 1].to_vec(), m }
    }
}

/// The one- and two-qubit circuits the recursion starts from.
pub fn erc_base(label: SpinLabel) -> Result<Circuit> {
    let SpinLabel { l, m } = SpinLabel::new(label.l, label.m)?;
    let gates = match (l.twice(), m.twice()) {
        (1, 1) => return Ok(Circuit::new(1)),
        (1, -1) => return Circuit::from_gates(1, [Gate::x(0)]),
        (2, 2) => vec![],
        (2, -2) => vec![Gate::x(0), Gate::x(1)],
        (2, 0) => vec![Gate::h(0), Gate::x(1), Gate::cnot(0, 1)],
        // Ry(-pi/2)|0> = HX|0>
        (0, 0) => vec![Gate::ry(0, -FRAC_PI_2), Gate::x(1), Gate::cnot(0, 1)],
        _ => {
            return Err(Error::InvalidLabel(alloc::format!("no one- or two-qubit base circuit for l = {l}")));
        }
    };
    Circuit::from_gates(2, gates)
}

/// Chain construction with zero-weight branches omitted.
pub fn erc_chain(labels: &ChainLabels) -> Result<Circuit> {
    build_chain(labels, true)
}

/// Chain construction keeping both branches at every step; a branch whose
/// projection is out of range is replaced by the nearest valid one (its
/// weight is zero either way).
pub fn erc_chain_unpruned(labels: &ChainLabels) -> Result<Circuit> {
    build_chain(labels, false)
}

fn build_chain(labels: &ChainLabels, prune: bool) -> Result<Circuit> {
    let n = labels.n_qubits();
    let (l, m) = (labels.l(), labels.m);
    if n <= 2 {
        return erc_base(SpinLabel::new(l, m)?);
    }
    let l1 = labels.spins[labels.spins.len() - 2];
    let new = n - 1;
    let half = HalfInt::HALF;
    let (m_up, m_down) = (m - half, m + half);
    let up_ok = m_up.abs() <= l1;
    let down_ok = m_down.abs() <= l1;
    let mut out = Circuit::new(n);
    if prune && !down_ok {
        out.append(&build_chain(&labels.prefix(m_up), prune)?.widened(n)?);
        return Ok(out);
    }
    if prune && !up_ok {
        out.push(Gate::x(new))?;
        out.append(&build_chain(&labels.prefix(m_down), prune)?.widened(n)?);
        return Ok(out);
    }
    let clamp = |mm: HalfInt| {
        if mm > l1 {
            l1
        } else if mm < -l1 {
            -l1
        } else {
            mm
        }
    };
    out.push(Gate::ry(new, mixing_angle(l1, l, m)?))?;
    let down = build_chain(&labels.prefix(clamp(m_down)), prune)?;
    out.append(&control_wrap(&down, new, Polarity::OnOne)?);
    let up = build_chain(&labels.prefix(clamp(m_up)), prune)?;
    out.append(&control_wrap(&up, new, Polarity::OnZero)?);
    Ok(out)
}

/// Circuit preparing `|tree; m>`. Chain trees use the recursive
/// construction; any other tree uses amplitude synthesis.
pub fn tree_circuit(tree: &CouplingTree, m: HalfInt) -> Result<Circuit> {
    tree.validate()?;
    check_projection(tree.spin(), m)?;
    if let Ok(labels) = ChainLabels::from_tree(tree, m) {
        return erc_chain(&labels);
    }
    let state = eigenstate_amplitudes(tree, m)?;
    real_state_circuit(state.amplitudes(), tree.n_qubits())
}

const SYNTH_ZERO: f64 = 1e-12;

/// Prepares a real normalized state by a cascade of uniformly controlled
/// `Ry` rotations, one level per qubit. Zero-weight prefixes are skipped and
/// a level whose angles all agree collapses to a single rotation.
pub fn real_state_circuit(amplitudes: &[f64], n: usize) -> Result<Circuit> {
    if amplitudes.len() != 1 << n {
        return Err(Error::DimensionMismatch { expected: 1 << n, found: amplitudes.len() });
    }
    let norm: f64 = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::Numerical(alloc::format!("target state has norm {norm}")));
    }
    let mut out = Circuit::new(n);
    for k in 0..n {
        let shift = n - k;
        // Squared weight of every prefix of length k + 1.
        let mut weight = vec![0.0; 1 << (k + 1)];
        for (i, a) in amplitudes.iter().enumerate() {
            weight[i >> (shift - 1)] += a * a;
        }
        let mut rotations: Vec<(usize, f64)> = Vec::new();
        for p in 0..1usize << k {
            let (w0, w1) = (weight[p << 1], weight[(p << 1) | 1]);
            if w0 + w1 < SYNTH_ZERO * SYNTH_ZERO {
                continue;
            }
            let theta = if k + 1 == n {
                2.0 * amplitudes[(p << 1) | 1].atan2(amplitudes[p << 1])
            } else {
                2.0 * w1.sqrt().atan2(w0.sqrt())
            };
            rotations.push((p, theta));
        }
        let uniform = rotations.windows(2).all(|w| (w[0].1 - w[1].1).abs() < SYNTH_ZERO);
        if uniform {
            if let Some(&(_, theta)) = rotations.first().filter(|r| r.1.abs() > SYNTH_ZERO) {
                out.push(Gate::ry(k, theta))?;
            }
            continue;
        }
        for (p, theta) in rotations {
            if theta.abs() <= SYNTH_ZERO {
                continue;
            }
            let mut g = Gate::ry(k, theta);
            for j in 0..k {
                let on = if (p >> (k - 1 - j)) & 1 == 1 { Polarity::OnOne } else { Polarity::OnZero };
                g = g.controlled(j, on)?;
            }
            out.push(g)?;
        }
    }
    Ok(out)
}

/// CNOT and single-qubit counts predicted by the construction's recursion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CostModel {
    pub n: usize,
    pub c: u64,
    pub s: u64,
}

/// Iterates `c' = 16c + 4s`, `s' = 12c + 4s` from `(c, s) = (1, 2)` at `n = 2`.
pub fn cost_recursion(n: usize) -> Result<CostModel> {
    if n < 2 {
        return Err(Error::InvalidLabel(alloc::format!("cost model starts at n = 2, got {n}")));
    }
    let overflow = || Error::Overflow("cost recursion");
    let (mut c, mut s) = (1u64, 2u64);
    for _ in 2..n {
        let nc = c.checked_mul(16).and_then(|a| s.checked_mul(4).and_then(|b| a.checked_add(b)));
        let ns = c.checked_mul(12).and_then(|a| s.checked_mul(4).and_then(|b| a.checked_add(b)));
        (c, s) = (nc.ok_or_else(overflow)?, ns.ok_or_else(overflow)?);
    }
    Ok(CostModel { n, c, s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{counts, counts_fused, decompose_native, simplify};
    use crate::tree::{TreeShape, enumerate_states};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn h(twice: i32) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    fn run(c: &Circuit) -> Vec<Complex64> {
        let mut s = vec![Complex64::new(0.0, 0.0); 1 << c.n_qubits()];
        s[0] = Complex64::new(1.0, 0.0);
        c.apply_to(&mut s);
        s
    }

    fn fidelity(c: &Circuit, target: &[f64]) -> f64 {
        run(c).iter().zip(target).map(|(a, &t)| a * t).sum::<Complex64>().norm_sqr()
    }

    #[test]
    fn base_states() {
        let x = erc_base(SpinLabel::new(h(1), h(-1)).unwrap()).unwrap();
        assert_eq!(x.gates(), [Gate::x(0)]);
        assert!(erc_base(SpinLabel::new(h(2), h(2)).unwrap()).unwrap().is_empty());
        let singlet = run(&erc_base(SpinLabel::new(h(0), h(0)).unwrap()).unwrap());
        let r = core::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(singlet[1].re, r, epsilon = 1e-15);
        assert_abs_diff_eq!(singlet[2].re, -r, epsilon = 1e-15);
        assert!(erc_base(SpinLabel::new(h(3), h(1)).unwrap()).is_err());
    }

    #[test]
    fn one_cnot_for_two_qubits() {
        let c = erc_base(SpinLabel::new(h(2), h(0)).unwrap()).unwrap();
        assert_eq!(counts(&c).cnot, 1);
    }

    #[test]
    fn three_qubit_examples() {
        let dicke = erc_chain(&ChainLabels::new(vec![h(2), h(3)], h(-1)).unwrap()).unwrap();
        let r = 1.0 / 3f64.sqrt();
        let mut target = vec![0.0; 8];
        for i in [3, 5, 6] {
            target[i] = r;
        }
        assert_abs_diff_eq!(fidelity(&dicke, &target), 1.0, epsilon = 1e-12);

        let c = erc_chain(&ChainLabels::new(vec![h(0), h(1)], h(-1)).unwrap()).unwrap();
        let mut target = vec![0.0; 8];
        target[3] = core::f64::consts::FRAC_1_SQRT_2;
        target[5] = -core::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(fidelity(&c, &target), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn chain_labels_validation() {
        assert!(ChainLabels::new(vec![h(2), h(5)], h(1)).is_err());
        assert!(ChainLabels::new(vec![h(0), h(1)], h(3)).is_err());
        assert!(ChainLabels::new(vec![h(2)], h(1)).is_err());
        assert_eq!(ChainLabels::new(vec![], h(-1)).unwrap().n_qubits(), 1);
    }

    #[test]
    fn every_chain_state_up_to_five() {
        for n in 1..=5 {
            for (tree, m) in enumerate_states(&TreeShape::chain(n).unwrap()).unwrap() {
                let labels = ChainLabels::from_tree(&tree, m).unwrap();
                let target = eigenstate_amplitudes(&tree, m).unwrap();
                let c = erc_chain(&labels).unwrap();
                assert!(fidelity(&c, target.amplitudes()) >= 1.0 - 1e-10, "{labels:?}");
            }
        }
    }

    #[test]
    fn pruning_keeps_the_state() {
        for n in 3..=4 {
            for (tree, m) in enumerate_states(&TreeShape::chain(n).unwrap()).unwrap() {
                let labels = ChainLabels::from_tree(&tree, m).unwrap();
                let pruned = run(&erc_chain(&labels).unwrap());
                let full = run(&erc_chain_unpruned(&labels).unwrap());
                let overlap: Complex64 = pruned.iter().zip(&full).map(|(a, b)| a.conj() * b).sum();
                assert_abs_diff_eq!(overlap.norm(), 1.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn bowtie_states() {
        for (tree, m) in enumerate_states(&TreeShape::bowtie()).unwrap() {
            let target = eigenstate_amplitudes(&tree, m).unwrap();
            let c = tree_circuit(&tree, m).unwrap();
            assert!(fidelity(&c, target.amplitudes()) >= 1.0 - 1e-10);
        }
    }

    #[test]
    fn single_leaf_up_is_empty() {
        assert!(tree_circuit(&CouplingTree::Leaf(0), h(1)).unwrap().is_empty());
    }

    #[test]
    fn synthesis_handles_signs() {
        let a = [0.5, -0.5, -0.5, 0.5];
        let c = real_state_circuit(&a, 2).unwrap();
        assert_abs_diff_eq!(fidelity(&c, &a), 1.0, epsilon = 1e-12);
        let b = [0.0, 0.0, -1.0, 0.0];
        let c = real_state_circuit(&b, 2).unwrap();
        assert_abs_diff_eq!(fidelity(&c, &b), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn recursion_values() {
        assert_eq!(cost_recursion(2).unwrap(), CostModel { n: 2, c: 1, s: 2 });
        assert_eq!(cost_recursion(3).unwrap(), CostModel { n: 3, c: 24, s: 20 });
        assert_eq!(cost_recursion(4).unwrap(), CostModel { n: 4, c: 464, s: 368 });
        assert!(cost_recursion(1).is_err());
        assert_eq!(cost_recursion(40), Err(Error::Overflow("cost recursion")));
    }

    #[test]
    fn compiled_within_model() {
        for n in 2..=5 {
            let model = cost_recursion(n).unwrap();
            for (tree, m) in enumerate_states(&TreeShape::chain(n).unwrap()).unwrap() {
                let c = erc_chain(&ChainLabels::from_tree(&tree, m).unwrap()).unwrap();
                let k = counts_fused(&decompose_native(&simplify(&c)).unwrap());
                assert!(k.cnot as u64 <= model.c && k.single_qubit as u64 <= model.s, "n={n} {k:?}");
            }
        }
    }
}
