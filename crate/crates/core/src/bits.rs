//! Fixed-width bit vectors.
//!
//! Bit 0 is the least significant bit everywhere in this crate: `bits()[0]`
//! is the LSB of the value, and bus wires are listed LSB first.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};
use std::fmt;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum BitsError {
    #[error("width must be at least 1")]
    ZeroWidth,
    #[error("value {value} does not fit in {width} unsigned bits")]
    Unrepresentable { value: String, width: usize },
    #[error("value {value} does not fit in {width} two's-complement bits")]
    UnrepresentableSigned { value: String, width: usize },
}

/// A fixed-width vector of bits, LSB at index 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    bits: Vec<bool>,
}

impl BitVec {
    pub fn zeros(width: usize) -> Self {
        BitVec { bits: vec![false; width] }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitVec { bits }
    }

    pub fn width(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, v: bool) {
        self.bits[i] = v;
    }

    /// Encodes an unsigned value. Fails if `value >= 2^width`.
    pub fn from_biguint(value: &BigUint, width: usize) -> Result<Self, BitsError> {
        if width == 0 {
            return Err(BitsError::ZeroWidth);
        }
        if value.bits() as usize > width {
            return Err(BitsError::Unrepresentable { value: value.to_string(), width });
        }
        let mut bits = vec![false; width];
        for (i, bit) in bits.iter_mut().enumerate() {
            *bit = value.bit(i as u64);
        }
        Ok(BitVec { bits })
    }

    pub fn to_biguint(&self) -> BigUint {
        let mut v = BigUint::zero();
        for (i, &b) in self.bits.iter().enumerate() {
            if b {
                v.set_bit(i as u64, true);
            }
        }
        v
    }

    /// Encodes a signed value in two's complement.
    /// Fails unless `-2^(width-1) <= value < 2^(width-1)`.
    pub fn from_bigint(value: &BigInt, width: usize) -> Result<Self, BitsError> {
        if width == 0 {
            return Err(BitsError::ZeroWidth);
        }
        let half = BigInt::one() << (width - 1);
        if value >= &half || value < &(-half.clone()) {
            return Err(BitsError::UnrepresentableSigned { value: value.to_string(), width });
        }
        let unsigned = if value.sign() == Sign::Minus {
            (value + (BigInt::one() << width)).magnitude().clone()
        } else {
            value.magnitude().clone()
        };
        Self::from_biguint(&unsigned, width)
    }

    /// Two's-complement interpretation of the bits.
    pub fn to_bigint(&self) -> BigInt {
        let unsigned = BigInt::from(self.to_biguint());
        let w = self.width();
        if self.bits[w - 1] {
            unsigned - (BigInt::one() << w)
        } else {
            unsigned
        }
    }

    pub fn from_u128(value: u128, width: usize) -> Result<Self, BitsError> {
        Self::from_biguint(&BigUint::from(value), width)
    }

    pub fn to_u128(&self) -> Result<u128, BitsError> {
        let v = self.to_biguint();
        if v.bits() > 128 {
            return Err(BitsError::Unrepresentable { value: v.to_string(), width: 128 });
        }
        let mut out = 0u128;
        for (i, &b) in self.bits.iter().enumerate().take(128) {
            if b {
                out |= 1 << i;
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // MSB-first, the way people read binary numbers.
        write!(f, "{}'b", self.width())?;
        for &b in self.bits.iter().rev() {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_biguint())
    }
}
