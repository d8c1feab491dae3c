//! Exact linear algebra over Z, Q and F_p.

mod elimination;
pub mod field;
mod matrix;
mod smith;

use num_integer::Roots;
use thiserror::Error;

pub use elimination::elementary_divisors;
pub use matrix::IntegerMatrix;
pub use smith::{cokernel_invariants, smith_normal_form, AbelianGroupInvariants, SmithForm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("index ({row}, {col}) out of range for {rows}x{cols} matrix")]
    IndexOutOfBounds { row: usize, col: usize, rows: usize, cols: usize },
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch { op: &'static str, left: (usize, usize), right: (usize, usize) },
    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRows { row: usize, expected: usize, found: usize },
    #[error("characteristic {0} is neither 0 nor prime")]
    NotAFieldCharacteristic(u64),
}

/// Characteristic of a prime field, or 0 for Q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Characteristic(u64);

impl Characteristic {
    pub const RATIONAL: Characteristic = Characteristic(0);

    pub fn new(c: u64) -> Result<Self, LinalgError> {
        if c == 0 || is_prime(c) {
            Ok(Characteristic(c))
        } else {
            Err(LinalgError::NotAFieldCharacteristic(c))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn is_rational(self) -> bool {
        self.0 == 0
    }
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..=n.sqrt()).all(|d| n % d != 0)
}

/// Rank of `m` over the field of characteristic `char` (0 means Q).
pub fn rank_over_field(m: &IntegerMatrix, char: u64) -> Result<usize, LinalgError> {
    let c = Characteristic::new(char)?;
    Ok(rank_in(m, c))
}

pub(crate) fn rank_in(m: &IntegerMatrix, c: Characteristic) -> usize {
    if c.is_rational() {
        elimination::rank_rational(m)
    } else {
        elimination::rank_mod_prime(m, c.get())
    }
}
