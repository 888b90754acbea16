//! Peephole simplification and CNOT folding.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{Circuit, Gate, GateKind};

const DROP_ANGLE: f64 = 1e-12;

/// Cancels adjacent inverse pairs, merges adjacent rotations about the same
/// axis and drops near-zero rotations, until nothing changes. "Adjacent"
/// means no other gate touches any of the pair's qubits in between.
pub fn simplify(circuit: &Circuit) -> Circuit {
    let mut current = circuit.gates().to_vec();
    loop {
        let next = simplify_pass(circuit.n_qubits(), &current);
        if next.len() == current.len() && next == current {
            break;
        }
        current = next;
    }
    Circuit::from_gates(circuit.n_qubits(), current).expect("gates already validated")
}

fn simplify_pass(n: usize, gates: &[Gate]) -> Vec<Gate> {
    let mut out: Vec<Option<Gate>> = Vec::with_capacity(gates.len());
    // Live gate indices per qubit, most recent last.
    let mut wires: Vec<Vec<usize>> = vec![Vec::new(); n];
    for g in gates {
        let g = match canonical(g) {
            Some(g) => g,
            None => continue,
        };
        let qubits = g.qubits();
        let top = wires[qubits[0]].last().copied();
        let adjacent = top.filter(|&j| {
            let prev = out[j].as_ref().expect("live");
            same_wires(prev, &g) && qubits.iter().all(|&q| wires[q].last() == Some(&j))
        });
        if let Some(j) = adjacent {
            let prev = out[j].as_ref().expect("live");
            if cancels(prev, &g) {
                remove(&mut out, &mut wires, j);
                continue;
            }
            if let Some(merged) = merge(prev, &g) {
                match canonical(&merged) {
                    Some(m) => out[j] = Some(m),
                    None => remove(&mut out, &mut wires, j),
                }
                continue;
            }
        }
        for &q in &qubits {
            wires[q].push(out.len());
        }
        out.push(Some(g));
    }
    out.into_iter().flatten().collect()
}

fn remove(out: &mut [Option<Gate>], wires: &mut [Vec<usize>], j: usize) {
    let g = out[j].take().expect("live");
    for q in g.qubits() {
        wires[q].pop();
    }
}

fn same_wires(a: &Gate, b: &Gate) -> bool {
    a.targets == b.targets && a.controls == b.controls
}

fn cancels(a: &Gate, b: &Gate) -> bool {
    use GateKind::*;
    matches!(
        (&a.kind, &b.kind),
        (X, X) | (Y, Y) | (Z, Z) | (H, H) | (Swap, Swap) | (S, Sdg) | (Sdg, S) | (T, Tdg) | (Tdg, T)
    )
}

fn merge(a: &Gate, b: &Gate) -> Option<Gate> {
    use GateKind::*;
    let kind = match (&a.kind, &b.kind) {
        (Rx(x), Rx(y)) => Rx(x + y),
        (Ry(x), Ry(y)) => Ry(x + y),
        (Rz(x), Rz(y)) => Rz(x + y),
        _ => return None,
    };
    Some(Gate { kind, targets: a.targets.clone(), controls: a.controls.clone() })
}

/// Angle reduced to `(-2pi, 2pi]`; `None` for a rotation that is the identity.
fn canonical(g: &Gate) -> Option<Gate> {
    let Some(angle) = g.kind.angle() else {
        return Some(g.clone());
    };
    let a = canonical_angle(angle);
    if a.abs() < DROP_ANGLE {
        return None;
    }
    let kind = match g.kind {
        GateKind::Rx(_) => GateKind::Rx(a),
        GateKind::Ry(_) => GateKind::Ry(a),
        _ => GateKind::Rz(a),
    };
    Some(Gate { kind, targets: g.targets.clone(), controls: g.controls.clone() })
}

/// Rotations have period `4pi`; values already in `(-2pi, 2pi]` are returned untouched.
pub(crate) fn canonical_angle(a: f64) -> f64 {
    if a > -2.0 * PI && a <= 2.0 * PI {
        return a;
    }
    let r = num_traits::Euclid::rem_euclid(&a, &(4.0 * PI));
    if r > 2.0 * PI { r - 4.0 * PI } else { r }
}

/// Replaces every CNOT by `2k + 1` copies of itself.
pub fn fold_cnots(circuit: &Circuit, k: usize) -> Circuit {
    let mut gates = Vec::with_capacity(circuit.len());
    for g in circuit.gates() {
        let copies = if g.is_cnot() { 2 * k + 1 } else { 1 };
        gates.extend(core::iter::repeat_n(g.clone(), copies));
    }
    Circuit::from_gates(circuit.n_qubits(), gates).expect("gates already validated")
}
