//! Signed fixed-point reals with a tracked error radius.
//!
//! A [`FixedReal`] stores a center `mant · 2^-bits` together with an error
//! radius `err · 2^-bits` such that the represented real lies in
//! `[center - radius, center + radius]`. Every arithmetic operation
//! propagates the radius, so callers can refuse to answer once it grows past
//! the tolerance they need. Values built from exact rationals remember the
//! rational, which is carried through ring operations and lets continued
//! fraction code see exact terminating expansions.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default number of fractional bits.
pub const DEFAULT_FRAC_BITS: u32 = 256;

/// Smallest precision accepted by the harness.
pub const MIN_FRAC_BITS: u32 = 64;

/// log2 of the absolute error tolerated on any value handed out as an answer
/// (torus coordinates, phases, residuals).
pub const TOLERANCE_LOG2: i32 = -50;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedReal {
    mant: BigInt,
    err: BigUint,
    bits: u32,
    exact: Option<BigRational>,
}

/// Nearest integer to `x / 2^k` (ties away from -inf), and whether it was inexact.
pub(crate) fn round_shift(x: &BigInt, k: u32) -> (BigInt, bool) {
    if k == 0 {
        return (x.clone(), false);
    }
    let inexact = !x.is_zero() && x.trailing_zeros().unwrap_or(0) < u64::from(k);
    let half = BigInt::one() << (k - 1);
    ((x + half) >> k, inexact)
}

/// Nearest integer to `n / d` for `d > 0`, and whether it was inexact.
fn div_round(n: &BigInt, d: &BigInt) -> (BigInt, bool) {
    debug_assert!(d.is_positive());
    let two_d = d << 1u32;
    let q = ((n << 1u32) + d).div_floor(&two_d);
    let inexact = !n.is_multiple_of(d);
    (q, inexact)
}

fn ceil_div(n: &BigUint, d: &BigUint) -> BigUint {
    let (q, r) = n.div_rem(d);
    if r.is_zero() {
        q
    } else {
        q + 1u32
    }
}

/// Converts `m · 2^-bits` to the nearest-ish `f64` without overflowing for
/// very long mantissas.
pub(crate) fn scaled_to_f64(m: &BigInt, bits: u32) -> f64 {
    if m.is_zero() {
        return 0.0;
    }
    let len = m.bits();
    let (top, shift) = if len > 64 {
        let s = len - 64;
        ((m >> s).to_f64().unwrap_or(0.0), s as i64)
    } else {
        (m.to_f64().unwrap_or(0.0), 0)
    };
    let mut exp = shift - i64::from(bits);
    let mut out = top;
    // powi on 2.0 is exact within range; split large exponents
    while exp < -1000 {
        out *= 2f64.powi(-1000);
        exp += 1000;
    }
    while exp > 1000 {
        out *= 2f64.powi(1000);
        exp -= 1000;
    }
    out * 2f64.powi(exp as i32)
}

impl FixedReal {
    pub fn zero(bits: u32) -> Self {
        Self::from_exact(BigRational::zero(), bits)
    }

    pub fn from_int(n: impl Into<BigInt>, bits: u32) -> Self {
        Self::from_exact(BigRational::from_integer(n.into()), bits)
    }

    /// `p / q`, remembered exactly.
    pub fn from_ratio(p: impl Into<BigInt>, q: impl Into<BigInt>, bits: u32) -> Result<Self> {
        let q = q.into();
        if q.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::from_exact(BigRational::new(p.into(), q), bits))
    }

    pub fn from_exact(r: BigRational, bits: u32) -> Self {
        let (mant, inexact) = div_round(&(r.numer() << bits), r.denom());
        FixedReal {
            mant,
            err: if inexact {
                BigUint::one()
            } else {
                BigUint::zero()
            },
            bits,
            exact: Some(r),
        }
    }

    /// The exact value of an `f64`.
    pub fn from_f64(x: f64, bits: u32) -> Result<Self> {
        let r = BigRational::from_float(x).ok_or(Error::Parse {
            what: "finite float",
            input: x.to_string(),
        })?;
        Ok(Self::from_exact(r, bits))
    }

    /// `(u + v·√d) / w`; the square root is refined to `2·bits` bits first.
    pub fn from_surd(
        u: impl Into<BigInt>,
        v: impl Into<BigInt>,
        w: impl Into<BigInt>,
        d: impl Into<BigInt>,
        bits: u32,
    ) -> Result<Self> {
        let (u, v, mut w, d) = (u.into(), v.into(), w.into(), d.into());
        if w.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if d.is_negative() {
            return Err(Error::Parse {
                what: "surd radicand",
                input: d.to_string(),
            });
        }
        let (mut u, mut v) = (u, v);
        if w.is_negative() {
            u = -u;
            v = -v;
            w = -w;
        }
        let root = d.sqrt();
        if &root * &root == d {
            return Ok(Self::from_exact(BigRational::new(u + v * root, w), bits));
        }
        let s = (d << (4 * bits)).sqrt();
        let numer = (u << (2 * bits)) + &v * s;
        let (mant, _) = div_round(&numer, &(&w << bits));
        // rounding contributes <= 1/2 ulp, the truncated root |v|/(w 2^bits) ulp
        let vmag = v.magnitude().clone();
        let wmag = w.magnitude().clone();
        let scaled_w = &wmag << bits;
        let err = if &vmag << 1u32 <= scaled_w {
            BigUint::one()
        } else {
            BigUint::one() + ceil_div(&vmag, &scaled_w)
        };
        Ok(FixedReal {
            mant,
            err,
            bits,
            exact: None,
        })
    }

    pub fn sqrt_of(d: impl Into<BigInt>, bits: u32) -> Result<Self> {
        Self::from_surd(0, 1, 1, d, bits)
    }

    /// A decimal string such as `-12.345` or `1.5e-3`; the error radius is half
    /// a unit in the last given digit.
    pub fn from_decimal(s: &str, bits: u32) -> Result<Self> {
        let bad = || Error::Parse {
            what: "decimal",
            input: s.to_string(),
        };
        let (mantissa, exponent) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
            None => (s, 0),
        };
        let (negative, body) = match mantissa.as_bytes().first() {
            Some(b'-') => (true, &mantissa[1..]),
            Some(b'+') => (false, &mantissa[1..]),
            _ => (false, mantissa),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part
            .bytes()
            .chain(frac_part.bytes())
            .all(|b| b.is_ascii_digit())
        {
            return Err(bad());
        }
        let digits: BigInt = format!("{int_part}{frac_part}")
            .parse()
            .map_err(|_| bad())?;
        let digits = if negative { -digits } else { digits };
        // value = digits · 10^scale
        let scale = exponent - frac_part.len() as i64;
        let ten = BigInt::from(10u32);
        let pow = |e: i64| num_traits::pow(ten.clone(), e.unsigned_abs() as usize);
        let value = if scale >= 0 {
            BigRational::from_integer(digits * pow(scale))
        } else {
            BigRational::new(digits, pow(scale))
        };
        let half_ulp = if scale >= 0 {
            BigRational::new(pow(scale), BigInt::from(2))
        } else {
            BigRational::new(BigInt::one(), pow(scale) * 2)
        };
        let (mant, inexact) = div_round(&(value.numer() << bits), value.denom());
        let radius = (half_ulp.numer() << bits).div_ceil(half_ulp.denom());
        let err = radius.magnitude() + BigUint::from(u32::from(inexact));
        Ok(FixedReal {
            mant,
            err,
            bits,
            exact: None,
        })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    /// Error radius in units of `2^-bits`.
    pub fn err_ulps(&self) -> &BigUint {
        &self.err
    }

    pub fn exact(&self) -> Option<&BigRational> {
        self.exact.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// The center as an exact rational (the remembered value when known).
    pub fn center(&self) -> BigRational {
        match &self.exact {
            Some(r) => r.clone(),
            None => BigRational::new(self.mant.clone(), BigInt::one() << self.bits),
        }
    }

    pub fn to_f64(&self) -> f64 {
        scaled_to_f64(&self.mant, self.bits)
    }

    pub fn err_bound(&self) -> f64 {
        scaled_to_f64(&BigInt::from(self.err.clone()), self.bits)
    }

    /// True when the error radius is at most `2^tol_log2`.
    pub fn within(&self, tol_log2: i32) -> bool {
        let shift = i64::from(self.bits) + i64::from(tol_log2);
        if shift < 0 {
            self.err.is_zero()
        } else {
            self.err <= BigUint::one() << (shift as u64)
        }
    }

    /// Fails with `PrecisionExhausted` unless the radius is within [`TOLERANCE_LOG2`].
    pub fn certify(self, what: &str) -> Result<Self> {
        if self.within(TOLERANCE_LOG2) {
            Ok(self)
        } else {
            Err(Error::precision(format!(
                "{what}: error radius {:.3e} exceeds 2^{TOLERANCE_LOG2} at {} fractional bits",
                self.err_bound(),
                self.bits
            )))
        }
    }

    /// Re-expresses the value with a different number of fractional bits.
    pub fn with_bits(&self, bits: u32) -> Self {
        if let Some(r) = &self.exact {
            return Self::from_exact(r.clone(), bits);
        }
        match bits.cmp(&self.bits) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let k = bits - self.bits;
                FixedReal {
                    mant: &self.mant << k,
                    err: &self.err << k,
                    bits,
                    exact: None,
                }
            }
            Ordering::Less => {
                let k = self.bits - bits;
                let (mant, inexact) = round_shift(&self.mant, k);
                let err = ceil_div(&self.err, &(BigUint::one() << k)) + u32::from(inexact);
                FixedReal {
                    mant,
                    err,
                    bits,
                    exact: None,
                }
            }
        }
    }

    fn aligned<'a>(&'a self, other: &'a Self) -> (Self, Self) {
        let bits = self.bits.max(other.bits);
        (self.with_bits(bits), other.with_bits(bits))
    }

    fn combine_exact(
        a: &Self,
        b: &Self,
        bits: u32,
        f: impl Fn(&BigRational, &BigRational) -> BigRational,
    ) -> Option<Self> {
        match (&a.exact, &b.exact) {
            (Some(x), Some(y)) => Some(Self::from_exact(f(x, y), bits)),
            _ => None,
        }
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        let bits = self.bits.max(other.bits);
        if let Some(r) = Self::combine_exact(self, other, bits, |x, y| x + y) {
            return r;
        }
        let (a, b) = self.aligned(other);
        FixedReal {
            mant: a.mant + b.mant,
            err: a.err + b.err,
            bits,
            exact: None,
        }
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    pub fn neg_ref(&self) -> Self {
        FixedReal {
            mant: -&self.mant,
            err: self.err.clone(),
            bits: self.bits,
            exact: self.exact.as_ref().map(|r| -r),
        }
    }

    pub fn abs(&self) -> Self {
        if self.mant.is_negative() {
            self.neg_ref()
        } else {
            let mut out = self.clone();
            if let Some(r) = &mut out.exact {
                *r = r.abs();
            }
            out
        }
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        let bits = self.bits.max(other.bits);
        if let Some(r) = Self::combine_exact(self, other, bits, |x, y| x * y) {
            return r;
        }
        let (a, b) = self.aligned(other);
        let (mant, inexact) = round_shift(&(&a.mant * &b.mant), bits);
        let spread = a.mant.magnitude() * &b.err + b.mant.magnitude() * &a.err + &a.err * &b.err;
        let err = ceil_div(&spread, &(BigUint::one() << bits)) + u32::from(inexact);
        FixedReal {
            mant,
            err,
            bits,
            exact: None,
        }
    }

    /// Multiplication by an exact integer (no rounding).
    pub fn mul_int(&self, k: &BigInt) -> Self {
        if let Some(r) = &self.exact {
            return Self::from_exact(r * BigRational::from_integer(k.clone()), self.bits);
        }
        FixedReal {
            mant: &self.mant * k,
            err: &self.err * k.magnitude(),
            bits: self.bits,
            exact: None,
        }
    }

    pub fn div_ref(&self, other: &Self) -> Result<Self> {
        let bits = self.bits.max(other.bits);
        if other.exact.as_ref().is_some_and(|r| r.is_zero()) {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = Self::combine_exact(self, other, bits, |x, y| x / y) {
            return Ok(r);
        }
        let (a, b) = self.aligned(other);
        let bmag = b.mant.magnitude();
        if bmag <= &b.err {
            return Err(Error::DivisionByZero);
        }
        let (mut mant, inexact) = div_round(&(&a.mant << bits), &BigInt::from(bmag.clone()));
        if b.mant.is_negative() {
            mant = -mant;
        }
        // |a/b - A/B| <= (|B| Ea + |A| Eb) / (|B| (|B| - Eb)), in ulps after << bits
        let numer = (bmag * &a.err + a.mant.magnitude() * &b.err) << bits;
        let denom = bmag * (bmag - &b.err);
        let err = ceil_div(&numer, &denom) + u32::from(inexact);
        Ok(FixedReal {
            mant,
            err,
            bits,
            exact: None,
        })
    }

    /// Floor of the center.
    pub fn floor_center(&self) -> BigInt {
        match &self.exact {
            Some(r) => r.floor().to_integer(),
            None => &self.mant >> self.bits,
        }
    }

    /// Nearest integer to the center; exact halves go to the even neighbour.
    pub fn round_half_even(&self) -> BigInt {
        let c = self.center();
        let fl = c.floor();
        let diff = &c - &fl;
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let fl = fl.to_integer();
        match diff.cmp(&half) {
            Ordering::Less => fl,
            Ordering::Greater => fl + 1,
            Ordering::Equal => {
                if fl.is_even() {
                    fl
                } else {
                    fl + 1
                }
            }
        }
    }

    /// The representative of the value modulo one in `[0, 1)`.
    pub fn frac(&self) -> Self {
        if let Some(r) = &self.exact {
            return Self::from_exact(r - r.floor(), self.bits);
        }
        let one = BigInt::one() << self.bits;
        FixedReal {
            mant: self.mant.mod_floor(&one),
            err: self.err.clone(),
            bits: self.bits,
            exact: None,
        }
    }

    /// Distance to the nearest integer, `‖x‖_𝕋`.
    pub fn circle_norm(&self) -> Self {
        let f = self.frac();
        let one = FixedReal::from_int(1, self.bits);
        let g = one.sub_ref(&f);
        if f.cmp_center(&g) == Ordering::Greater {
            g
        } else {
            f
        }
    }

    pub fn cmp_center(&self, other: &Self) -> Ordering {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a.cmp(b),
            _ => {
                let (a, b) = self.aligned(other);
                a.mant.cmp(&b.mant)
            }
        }
    }

    pub fn is_zero_center(&self) -> bool {
        self.mant.is_zero() && self.exact.as_ref().is_none_or(|r| r.is_zero())
    }

    /// True when zero lies inside the error interval.
    pub fn may_be_zero(&self) -> bool {
        match &self.exact {
            Some(r) => r.is_zero(),
            None => self.mant.magnitude() <= &self.err,
        }
    }

    pub fn sign(&self) -> Sign {
        match &self.exact {
            Some(r) => r.numer().sign(),
            None => self.mant.sign(),
        }
    }
}

impl fmt::Display for FixedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(r) => write!(f, "{r}"),
            None => write!(f, "{:.17e}±{:.1e}", self.to_f64(), self.err_bound()),
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $imp:ident) => {
        impl $tr<&FixedReal> for &FixedReal {
            type Output = FixedReal;
            fn $method(self, rhs: &FixedReal) -> FixedReal {
                self.$imp(rhs)
            }
        }
        impl $tr<FixedReal> for FixedReal {
            type Output = FixedReal;
            fn $method(self, rhs: FixedReal) -> FixedReal {
                (&self).$imp(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl Neg for &FixedReal {
    type Output = FixedReal;
    fn neg(self) -> FixedReal {
        self.neg_ref()
    }
}

impl Neg for FixedReal {
    type Output = FixedReal;
    fn neg(self) -> FixedReal {
        self.neg_ref()
    }
}
