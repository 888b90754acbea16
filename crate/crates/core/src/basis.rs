//! Computational-basis conventions shared by every module.
//!
//! Qubit 0 is the leftmost character of a ket and the most significant bit of
//! a basis index, so `|011>` on three qubits is index 3. `|0>` carries spin
//! projection `+1/2`.

use alloc::string::String;

use crate::error::{Error, Result};

/// Bit of the basis index that stores `qubit`.
#[inline]
pub const fn qubit_mask(n: usize, qubit: usize) -> usize {
    1 << (n - 1 - qubit)
}

#[inline]
pub const fn qubit_bit(n: usize, index: usize, qubit: usize) -> usize {
    (index >> (n - 1 - qubit)) & 1
}

/// `index` as an `n`-character ket label, qubit 0 first.
pub fn bitstring(index: usize, n: usize) -> String {
    (0..n).map(|q| if qubit_bit(n, index, q) == 1 { '1' } else { '0' }).collect()
}

pub fn parse_bitstring(s: &str) -> Result<usize> {
    s.chars().try_fold(0usize, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(Error::InvalidLabel(alloc::format!("not a bitstring: {s:?}"))),
    })
}
