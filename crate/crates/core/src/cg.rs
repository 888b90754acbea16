//! Clebsch-Gordan coefficients in the Condon-Shortley convention.
//!
//! The general table is generated from the stretched states: each top state
//! `|J, J>` is obtained by Gram-Schmidt against the higher multiplets in the
//! `M = J` sector (phase fixed by `<l1 l1; l2 J-l1 | J J> > 0`) and the rest
//! of the multiplet follows by repeated application of `J- = J1- + J2-`.
//! Coupling to a spin one-half has closed forms, used as a fast path.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::halfint::{HalfInt, check_projection, check_spin};

/// True if `l` can result from coupling `l1` and `l2`.
pub fn triangle(l1: HalfInt, l2: HalfInt, l: HalfInt) -> bool {
    (l1 - l2).abs() <= l && l <= l1 + l2 && (l1 + l2).same_parity(l)
}

/// `<l1 m1; l2 m2 | l m>`.
///
/// Zero when `m != m1 + m2` or the triangle rule fails; errors on negative
/// spins and on projections that do not belong to their spin.
pub fn cg_coefficient(l1: HalfInt, m1: HalfInt, l2: HalfInt, m2: HalfInt, l: HalfInt, m: HalfInt) -> Result<f64> {
    for (a, b) in [(l1, m1), (l2, m2), (l, m)] {
        check_spin(a)?;
        check_projection(a, b)?;
    }
    if m1 + m2 != m || !triangle(l1, l2, l) {
        return Ok(0.0);
    }
    if l2 == HalfInt::HALF {
        return Ok(spin_half_coefficient(l1, m2, l, m));
    }
    Ok(CouplingTable::new(l1, l2)?.coefficient(m1, m2, l, m))
}

/// Closed form of `<l1, m - ms; 1/2, ms | l, m>` for `l = l1 ± 1/2`.
/// Inputs are assumed to be valid and coupled.
fn spin_half_coefficient(l1: HalfInt, ms: HalfInt, l: HalfInt, m: HalfInt) -> f64 {
    let l1v = l1.value();
    let mv = m.value();
    let denom = 2.0 * l1v + 1.0;
    let up = ms.twice() > 0;
    if l > l1 {
        if up { ((l1v + mv + 0.5) / denom).sqrt() } else { ((l1v - mv + 0.5) / denom).sqrt() }
    } else if up {
        -((l1v - mv + 0.5) / denom).sqrt()
    } else {
        ((l1v + mv + 0.5) / denom).sqrt()
    }
}

/// All coefficients `<l1 m1; l2 m2 | J M>` for fixed `l1`, `l2`.
#[derive(Clone, Debug)]
pub struct CouplingTable {
    l1: HalfInt,
    l2: HalfInt,
    /// `(2J, 2M)` to coefficients indexed by `m1 = -l1 + k`.
    states: BTreeMap<(i32, i32), Vec<f64>>,
}

impl CouplingTable {
    pub fn new(l1: HalfInt, l2: HalfInt) -> Result<Self> {
        check_spin(l1)?;
        check_spin(l2)?;
        let dim1 = (l1.twice() + 1) as usize;
        let mut states: BTreeMap<(i32, i32), Vec<f64>> = BTreeMap::new();
        let j_max = l1 + l2;
        let j_min = (l1 - l2).abs();
        let mut j = j_max;
        while j >= j_min {
            let mut top = Self::top_state(l1, l2, j, dim1, &states)?;
            normalize(&mut top);
            states.insert((j.twice(), j.twice()), top.clone());
            let mut m = j;
            let mut current = top;
            while m > -j {
                current = Self::lower(l1, l2, m, &current);
                normalize(&mut current);
                m = m - HalfInt::ONE;
                states.insert((j.twice(), m.twice()), current.clone());
            }
            j = j - HalfInt::ONE;
        }
        Ok(CouplingTable { l1, l2, states })
    }

    fn m1_at(l1: HalfInt, k: usize) -> HalfInt {
        HalfInt::from_twice(-l1.twice() + 2 * k as i32)
    }

    fn top_state(
        l1: HalfInt,
        l2: HalfInt,
        j: HalfInt,
        dim1: usize,
        known: &BTreeMap<(i32, i32), Vec<f64>>,
    ) -> Result<Vec<f64>> {
        let higher: Vec<&Vec<f64>> = known.iter().filter(|((_, mm), _)| *mm == j.twice()).map(|(_, v)| v).collect();
        // Candidates in the M = J sector, starting from m1 = l1 which also
        // carries the Condon-Shortley phase.
        for k in (0..dim1).rev() {
            let m1 = Self::m1_at(l1, k);
            let m2 = j - m1;
            if m2.abs() > l2 {
                continue;
            }
            let mut v = vec![0.0; dim1];
            v[k] = 1.0;
            for h in &higher {
                let overlap: f64 = v.iter().zip(h.iter()).map(|(a, b)| a * b).sum();
                for (x, y) in v.iter_mut().zip(h.iter()) {
                    *x -= overlap * y;
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-8 {
                continue;
            }
            let sign = if v[dim1 - 1] < 0.0 { -1.0 } else { 1.0 };
            for x in v.iter_mut() {
                *x *= sign / norm;
            }
            return Ok(v);
        }
        Err(Error::Numerical(alloc::format!("no top state for J = {j} in {l1} x {l2}")))
    }

    /// Applies `J- = J1- + J2-` to a state of projection `m`.
    fn lower(l1: HalfInt, l2: HalfInt, m: HalfInt, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for (k, &c) in v.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let m1 = Self::m1_at(l1, k);
            let m2 = m - m1;
            if k > 0 {
                out[k - 1] += c * ladder(l1, m1);
            }
            if m2 > -l2 {
                out[k] += c * ladder(l2, m2);
            }
        }
        out
    }

    /// `<l1 m1; l2 m2 | l m>` from the table.
    pub fn coefficient(&self, m1: HalfInt, m2: HalfInt, l: HalfInt, m: HalfInt) -> f64 {
        if m1 + m2 != m || m1.abs() > self.l1 || m2.abs() > self.l2 {
            return 0.0;
        }
        let k = ((m1.twice() + self.l1.twice()) / 2) as usize;
        self.states.get(&(l.twice(), m.twice())).map_or(0.0, |v| v[k])
    }

    pub fn l1(&self) -> HalfInt {
        self.l1
    }

    pub fn l2(&self) -> HalfInt {
        self.l2
    }
}

/// `sqrt(l(l+1) - m(m-1))`, the lowering matrix element.
pub fn ladder(l: HalfInt, m: HalfInt) -> f64 {
    let (l, m) = (l.value(), m.value());
    (l * (l + 1.0) - m * (m - 1.0)).max(0.0).sqrt()
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

/// Angle `theta` in `[0, 2pi)` with `cos(theta/2) = <l1, m-1/2; 1/2, 1/2 | l m>`
/// and `sin(theta/2) = <l1, m+1/2; 1/2, -1/2 | l m>`.
pub fn mixing_angle(l1: HalfInt, l: HalfInt, m: HalfInt) -> Result<f64> {
    check_spin(l1)?;
    if l != l1 + HalfInt::HALF && l != l1 - HalfInt::HALF {
        return Err(Error::Triangle { l1, l2: HalfInt::HALF, l });
    }
    check_spin(l)?;
    check_projection(l, m)?;
    let (psi_up, psi_down) = spin_half_amplitudes(l1, l, m);
    let mut theta = 2.0 * psi_down.atan2(psi_up);
    if theta < 0.0 {
        theta += 2.0 * PI;
    }
    if theta >= 2.0 * PI {
        theta -= 2.0 * PI;
    }
    Ok(theta)
}

/// `(psi_{+1/2}, psi_{-1/2})`: weights of the new spin pointing up or down
/// when `l1` and one-half couple to `(l, m)`.
pub(crate) fn spin_half_amplitudes(l1: HalfInt, l: HalfInt, m: HalfInt) -> (f64, f64) {
    let half = HalfInt::HALF;
    let weight = |ms: HalfInt| {
        if (m - ms).abs() > l1 { 0.0 } else { spin_half_coefficient(l1, ms, l, m) }
    };
    (weight(half), weight(-half))
}
