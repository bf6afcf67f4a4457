//! Fixed-width points of the circle ℝ/ℤ.
//!
//! An [`Angle`] is a fraction in `[0, 1)` stored in `L` little-endian 64-bit
//! limbs, so that addition modulo one is plain wrapping addition. The inner
//! loops of the orbit and exponential-sum code step polynomial phases with
//! these instead of big integers.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::One;

use crate::fixed::FixedReal;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Angle {
    limbs: Vec<u64>,
}

/// Number of limbs used to hold a fraction with `bits` fractional bits.
pub fn limbs_for(bits: u32) -> usize {
    (bits as usize).div_ceil(64).max(1)
}

const TWO_POW_64: f64 = 18446744073709551616.0;

impl Angle {
    pub fn zero(limbs: usize) -> Self {
        Angle {
            limbs: vec![0; limbs],
        }
    }

    /// Center of `x` reduced modulo one. Exact: the value has `bits` fractional
    /// bits and the width is at least that.
    pub fn from_fixed(x: &FixedReal, limbs: usize) -> Self {
        let width = 64 * limbs as u32;
        let bits = x.bits();
        if width >= bits {
            Self::from_scaled(&(x.mantissa() << (width - bits)), limbs)
        } else {
            Self::from_scaled(
                &crate::fixed::round_shift(x.mantissa(), bits - width).0,
                limbs,
            )
        }
    }

    /// `v · 2^-(64·limbs)` reduced modulo one.
    pub fn from_scaled(v: &BigInt, limbs: usize) -> Self {
        let modulus = BigInt::one() << (64 * limbs);
        let mag: BigUint = v.mod_floor(&modulus).to_biguint().unwrap_or_default();
        let mut digits = mag.to_u64_digits();
        digits.resize(limbs, 0);
        Angle { limbs: digits }
    }

    pub fn width(&self) -> usize {
        self.limbs.len()
    }

    #[inline]
    pub fn add_assign(&mut self, other: &Angle) {
        debug_assert_eq!(self.limbs.len(), other.limbs.len());
        let mut carry = false;
        for (a, b) in self.limbs.iter_mut().zip(&other.limbs) {
            let (s1, c1) = a.overflowing_add(*b);
            let (s2, c2) = s1.overflowing_add(carry as u64);
            *a = s2;
            carry = c1 || c2;
        }
    }

    #[inline]
    pub fn sub(&self, other: &Angle) -> Angle {
        let mut out = self.clone();
        let mut borrow = false;
        for (a, b) in out.limbs.iter_mut().zip(&other.limbs) {
            let (d1, b1) = a.overflowing_sub(*b);
            let (d2, b2) = d1.overflowing_sub(borrow as u64);
            *a = d2;
            borrow = b1 || b2;
        }
        out
    }

    fn top_two(&self) -> (u64, u64) {
        let n = self.limbs.len();
        let hi = self.limbs[n - 1];
        let lo = if n >= 2 { self.limbs[n - 2] } else { 0 };
        (hi, lo)
    }

    /// The value in `[0, 1)`.
    #[inline]
    pub fn to_unit_f64(&self) -> f64 {
        let (hi, lo) = self.top_two();
        (hi as f64 + lo as f64 / TWO_POW_64) / TWO_POW_64
    }

    /// The representative in `[-1/2, 1/2)`.
    #[inline]
    pub fn to_signed_f64(&self) -> f64 {
        let (hi, lo) = self.top_two();
        if hi >> 63 == 1 {
            // 1 - x, computed on the top 128 bits
            let nlo = (!lo).wrapping_add(1);
            let nhi = (!hi).wrapping_add((lo == 0) as u64);
            -((nhi as f64 + nlo as f64 / TWO_POW_64) / TWO_POW_64)
        } else {
            (hi as f64 + lo as f64 / TWO_POW_64) / TWO_POW_64
        }
    }

    /// `‖x‖_𝕋`; an angle of exactly one half has norm one half.
    #[inline]
    pub fn norm_f64(&self) -> f64 {
        self.to_signed_f64().abs()
    }

    /// The value as an unsigned integer scaled by `2^(64·width)`.
    pub fn to_biguint(&self) -> BigUint {
        let mut bytes = Vec::with_capacity(self.limbs.len() * 8);
        for l in &self.limbs {
            bytes.extend_from_slice(&l.to_le_bytes());
        }
        BigUint::from_bytes_le(&bytes)
    }

    /// `‖x‖_𝕋` scaled by `2^(64·width)`, exactly.
    pub fn norm_scaled(&self) -> BigUint {
        let v = self.to_biguint();
        let full = BigUint::one() << (64 * self.limbs.len());
        let w = &full - &v;
        v.min(w)
    }
}
