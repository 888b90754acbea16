//! Lowering to `{X, Y, Z, H, Rx, Ry, Rz, CNOT}`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::kernel::Mat2;
use super::{Circuit, Gate, GateKind, Polarity};
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

const ZERO_ANGLE: f64 = 1e-12;
const ZERO_AMP: f64 = 1e-14;

/// Rewrites every gate over the native set; the unitary is preserved up to a
/// global phase.
pub fn decompose_native(circuit: &Circuit) -> Result<Circuit> {
    let mut out = Vec::new();
    for g in circuit.gates() {
        lower(g, &mut out)?;
    }
    Circuit::from_gates(circuit.n_qubits(), out)
}

fn lower(g: &Gate, out: &mut Vec<Gate>) -> Result<()> {
    if g.is_native() {
        out.push(g.clone());
        return Ok(());
    }
    let on_zero: Vec<usize> = g.controls().iter().filter(|c| c.1 == Polarity::OnZero).map(|c| c.0).collect();
    if !on_zero.is_empty() {
        let positive = Gate {
            kind: g.kind().clone(),
            targets: g.targets().to_vec(),
            controls: g.controls().iter().map(|&(q, _)| (q, Polarity::OnOne)).collect(),
        };
        out.extend(on_zero.iter().map(|&q| Gate::x(q)));
        lower(&positive, out)?;
        out.extend(on_zero.iter().map(|&q| Gate::x(q)));
        return Ok(());
    }
    let controls: Vec<usize> = g.controls().iter().map(|c| c.0).collect();
    match g.kind() {
        GateKind::Swap => {
            let (a, b) = (g.targets()[0], g.targets()[1]);
            let outer = with_controls(Gate::cnot(a, b), &controls)?;
            lower(&outer, out)?;
            lower(&with_controls(Gate::cnot(b, a), &controls)?, out)?;
            lower(&outer, out)
        }
        GateKind::Unitary(m) if m.nrows() > 2 => {
            if m.nrows() > 4 {
                return Err(Error::UnsupportedDecomposition(alloc::format!(
                    "custom unitary on {} qubits",
                    g.targets().len()
                )));
            }
            for step in two_level_steps(m, g.targets()[0], g.targets()[1])? {
                lower(&with_controls(step, &controls)?, out)?;
            }
            Ok(())
        }
        kind => {
            let t = g.targets()[0];
            let u = kind.matrix_1q().expect("single-qubit kind");
            match controls.as_slice() {
                [] => {
                    single(&u, t, out);
                    Ok(())
                }
                &[c] => {
                    controlled_single(kind, &u, c, t, out);
                    Ok(())
                }
                &[c1, c2] if *kind == GateKind::X => {
                    toffoli(c1, c2, t, out);
                    Ok(())
                }
                _ => multi_controlled(&u, &controls, t, out),
            }
        }
    }
}

fn with_controls(mut g: Gate, controls: &[usize]) -> Result<Gate> {
    for &c in controls {
        g = g.controlled(c, Polarity::OnOne)?;
    }
    Ok(g)
}

/// `U = e^{i alpha} Rz(beta) Ry(gamma) Rz(delta)`.
pub(crate) struct Zyz {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

pub(crate) fn zyz(u: &Mat2) -> Zyz {
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    let alpha = det.arg() / 2.0;
    let ph = Complex64::from_polar(1.0, -alpha);
    let (v00, v10, v11) = (u[0][0] * ph, u[1][0] * ph, u[1][1] * ph);
    let gamma = 2.0 * v10.norm().atan2(v00.norm());
    let sum = 2.0 * v11.arg();
    let diff = 2.0 * v10.arg();
    let (beta, delta) = if v11.norm() <= ZERO_AMP {
        (diff, 0.0)
    } else if v10.norm() <= ZERO_AMP {
        (sum, 0.0)
    } else {
        ((sum + diff) / 2.0, (sum - diff) / 2.0)
    };
    Zyz { alpha, beta, gamma, delta }
}

fn push_rot(out: &mut Vec<Gate>, g: Gate) {
    if g.kind().angle().is_none_or(|a| a.abs() > ZERO_ANGLE) {
        out.push(g);
    }
}

fn single(u: &Mat2, t: usize, out: &mut Vec<Gate>) {
    let d = zyz(u);
    push_rot(out, Gate::rz(t, d.delta));
    push_rot(out, Gate::ry(t, d.gamma));
    push_rot(out, Gate::rz(t, d.beta));
}

fn controlled_single(kind: &GateKind, u: &Mat2, c: usize, t: usize, out: &mut Vec<Gate>) {
    match *kind {
        GateKind::X => out.push(Gate::cnot(c, t)),
        GateKind::Y => {
            out.push(Gate::rz(t, -FRAC_PI_2));
            out.push(Gate::cnot(c, t));
            out.push(Gate::rz(t, FRAC_PI_2));
        }
        GateKind::Z => {
            out.push(Gate::h(t));
            out.push(Gate::cnot(c, t));
            out.push(Gate::h(t));
        }
        GateKind::Rz(a) => {
            push_rot(out, Gate::rz(t, a / 2.0));
            out.push(Gate::cnot(c, t));
            push_rot(out, Gate::rz(t, -a / 2.0));
            out.push(Gate::cnot(c, t));
        }
        _ => {
            // U = e^{ia} A X B X C with A B C = I.
            let d = zyz(u);
            push_rot(out, Gate::rz(t, (d.delta - d.beta) / 2.0));
            out.push(Gate::cnot(c, t));
            push_rot(out, Gate::rz(t, -(d.delta + d.beta) / 2.0));
            push_rot(out, Gate::ry(t, -d.gamma / 2.0));
            out.push(Gate::cnot(c, t));
            push_rot(out, Gate::ry(t, d.gamma / 2.0));
            push_rot(out, Gate::rz(t, d.beta));
            push_rot(out, Gate::rz(c, d.alpha));
        }
    }
}

/// Six-CNOT Toffoli network.
fn toffoli(c1: usize, c2: usize, t: usize, out: &mut Vec<Gate>) {
    let tg = |q| Gate::rz(q, FRAC_PI_4);
    let tdg = |q| Gate::rz(q, -FRAC_PI_4);
    out.extend([
        Gate::h(t),
        Gate::cnot(c2, t),
        tdg(t),
        Gate::cnot(c1, t),
        tg(t),
        Gate::cnot(c2, t),
        tdg(t),
        Gate::cnot(c1, t),
        tg(c2),
        tg(t),
        Gate::h(t),
        Gate::cnot(c1, c2),
        tg(c1),
        tdg(c2),
        Gate::cnot(c1, c2),
    ]);
}

/// Principal square root of a 2x2 unitary.
fn sqrt_2x2(u: &Mat2) -> Mat2 {
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    let tr = u[0][0] + u[1][1];
    let s = det.sqrt();
    let (s, t) = [s, -s]
        .into_iter()
        .map(|s| (s, (tr + 2.0 * s).sqrt()))
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .expect("two candidates");
    [[(u[0][0] + s) / t, u[0][1] / t], [u[1][0] / t, (u[1][1] + s) / t]]
}

fn adjoint(u: &Mat2) -> Mat2 {
    [[u[0][0].conj(), u[1][0].conj()], [u[0][1].conj(), u[1][1].conj()]]
}

fn matrix_gate(u: &Mat2, t: usize) -> Gate {
    let m = DMatrix::from_row_slice(2, 2, &[u[0][0], u[0][1], u[1][0], u[1][1]]);
    Gate { kind: GateKind::Unitary(m), targets: vec![t], controls: Vec::new() }
}

/// `C^k(U)` via `V^2 = U`: `C_last(V) C^{k-1}X C_last(V^dag) C^{k-1}X C^{k-1}(V)`.
fn multi_controlled(u: &Mat2, controls: &[usize], t: usize, out: &mut Vec<Gate>) -> Result<()> {
    let (&last, rest) = controls.split_last().expect("at least two controls");
    let v = sqrt_2x2(u);
    let flip = with_controls(Gate::x(last), rest)?;
    lower(&matrix_gate(&v, t).controlled(last, Polarity::OnOne)?, out)?;
    lower(&flip, out)?;
    lower(&matrix_gate(&adjoint(&v), t).controlled(last, Polarity::OnOne)?, out)?;
    lower(&flip, out)?;
    lower(&with_controls(matrix_gate(&v, t), rest)?, out)
}

/// Two-level (Givens) factorization of a 4x4 unitary on `(qa, qb)`, returned
/// as controlled single-qubit gates and CNOTs in time order.
fn two_level_steps(u: &DMatrix<Complex64>, qa: usize, qb: usize) -> Result<Vec<Gate>> {
    let dim = 4;
    let mut m = u.clone();
    // Each entry: (i, j, W) with W acting on span{|i>, |j>}; W_k ... W_1 U = I.
    let mut ops: Vec<(usize, usize, Mat2)> = Vec::new();
    let mut apply = |m: &mut DMatrix<Complex64>, i: usize, j: usize, w: Mat2| {
        for col in 0..dim {
            let (a, b) = (m[(i, col)], m[(j, col)]);
            m[(i, col)] = w[0][0] * a + w[0][1] * b;
            m[(j, col)] = w[1][0] * a + w[1][1] * b;
        }
        ops.push((i, j, w));
    };
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    for c in 0..dim - 1 {
        for r in c + 1..dim {
            let (a, b) = (m[(c, c)], m[(r, c)]);
            if b.norm() <= ZERO_AMP {
                continue;
            }
            let nrm = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let w = [[a.conj() / nrm, b.conj() / nrm], [-b / nrm, a / nrm]];
            apply(&mut m, c, r, w);
        }
        let d = m[(c, c)];
        if (d - one).norm() > ZERO_AMP {
            apply(&mut m, c, c + 1, [[d.conj(), zero], [zero, d]]);
        }
    }
    let d = m[(dim - 1, dim - 1)];
    if (d - one).norm() > ZERO_AMP {
        apply(&mut m, dim - 2, dim - 1, [[one, zero], [zero, d.conj()]]);
    }
    if (m - DMatrix::<Complex64>::identity(dim, dim)).iter().any(|v| v.norm() > 1e-9) {
        return Err(Error::Numerical("two-level factorization did not reach the identity".into()));
    }
    // U = W_1^dag ... W_k^dag: apply W_k^dag first.
    let mut gates = Vec::new();
    for &(i, j, w) in ops.iter().rev() {
        two_level_gate(i, j, &adjoint(&w), qa, qb, &mut gates)?;
    }
    Ok(gates)
}

/// Emits `W` on span{|i>, |j>} of the local two-qubit space (`qa` is the high bit).
fn two_level_gate(i: usize, j: usize, w: &Mat2, qa: usize, qb: usize, out: &mut Vec<Gate>) -> Result<()> {
    let qubit_of = |bit: usize| if bit == 2 { qa } else { qb };
    match i ^ j {
        3 => {
            // CNOT(qa -> qb) maps |1x> to |1(1-x)>, leaving i, j one bit apart.
            let cx = |s: usize| if s & 2 != 0 { s ^ 1 } else { s };
            out.push(Gate::cnot(qa, qb));
            two_level_gate(cx(i), cx(j), w, qa, qb, out)?;
            out.push(Gate::cnot(qa, qb));
            Ok(())
        }
        diff => {
            let (t, c) = (qubit_of(diff), qubit_of(3 ^ diff));
            let polarity = if i & (3 ^ diff) != 0 { Polarity::OnOne } else { Polarity::OnZero };
            // Orient W so its first basis vector has target bit 0.
            let oriented = if i & diff == 0 { *w } else { [[w[1][1], w[1][0]], [w[0][1], w[0][0]]] };
            out.push(matrix_gate(&oriented, t).controlled(c, polarity)?);
            Ok(())
        }
    }
}
