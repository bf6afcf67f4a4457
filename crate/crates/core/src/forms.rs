//! Ternary quadratic forms, their (shifted) values, and rational equivalence
//! to the standard isotropic form `Q(α, β, γ) = β² − 4αγ`.
//!
//! Vectors are rows and matrices act on the right: the form attached to a
//! Gram matrix `G` is `Q(v) = v·G·vᵀ`, and `v ↦ Q(v·M)` has Gram matrix
//! `M·G·Mᵀ`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fixed::FixedReal;
use crate::matrix::{self, Mat3};
use crate::scalar::OrderedRing;

/// A nondegenerate indefinite ternary quadratic form, stored by its Gram matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct TernaryForm<R> {
    gram: Mat3<R>,
}

impl<R: OrderedRing> TernaryForm<R> {
    /// Validates symmetry, nondegeneracy and indefiniteness.
    pub fn new(gram: Mat3<R>) -> Result<Self> {
        if !matrix::is_symmetric(&gram) {
            return Err(Error::InvalidForm("Gram matrix is not symmetric".into()));
        }
        let [d1, d2, d3] = matrix::leading_minors(&gram);
        if d3.is_zero() {
            return Err(Error::InvalidForm("form is degenerate (det = 0)".into()));
        }
        // Sylvester: definite iff the leading minors are all positive or alternate from negative
        let positive = d1.is_positive() && d2.is_positive() && d3.is_positive();
        let negative = d1.is_negative() && d2.is_positive() && d3.is_negative();
        if positive || negative {
            return Err(Error::InvalidForm(
                "form is definite, not indefinite".into(),
            ));
        }
        Ok(TernaryForm { gram })
    }

    /// `Q(v₁, v₂, v₃) = v₂² − 4v₁v₃`.
    pub fn standard() -> Self {
        let two = R::one() + R::one();
        let m2 = R::zero() - two;
        let z = R::zero;
        TernaryForm {
            gram: [[z(), z(), m2.clone()], [z(), R::one(), z()], [m2, z(), z()]],
        }
    }

    pub fn gram(&self) -> &Mat3<R> {
        &self.gram
    }

    pub fn eval(&self, v: &[R; 3]) -> R {
        matrix::bilinear(v, &self.gram, v)
    }

    pub fn bilinear(&self, u: &[R; 3], v: &[R; 3]) -> R {
        matrix::bilinear(u, &self.gram, v)
    }

    /// True iff `m·Q'(v) = Q(v·M)` for every `v`, where `Q'` is `self` and
    /// `Q` the standard form, i.e. `m·G' = M·G·Mᵀ` exactly.
    pub fn is_equivalent_to_standard(&self, m: &R, mat: &Mat3<R>) -> bool {
        if m.is_zero() {
            return false;
        }
        let std_gram = Self::standard().gram;
        let pulled = matrix::mul(&matrix::mul(mat, &std_gram), &matrix::transpose(mat));
        matrix::scale(&self.gram, m) == pulled
    }
}

impl<R: OrderedRing + FromPrimitive> TernaryForm<R> {
    pub fn eval_int(&self, v: &[i64; 3]) -> R {
        let r = v.map(|x| R::from_i64(x).expect("i64 embeds in the scalar ring"));
        self.eval(&r)
    }

    /// Lexicographically least primitive `v` with `0 < max|vᵢ| ≤ bound`, first
    /// nonzero coordinate positive, and `Q(v) = 0`. `None` does not prove
    /// anisotropy.
    pub fn find_isotropic_vector(&self, bound: u64) -> Option<[i64; 3]> {
        let b = bound as i64;
        for v1 in 0..=b {
            let v2_lo = if v1 == 0 { 0 } else { -b };
            for v2 in v2_lo..=b {
                let v3_lo = if v1 == 0 && v2 == 0 { 1 } else { -b };
                for v3 in v3_lo..=b {
                    let g = v1.gcd(&v2).gcd(&v3);
                    if g != 1 {
                        continue;
                    }
                    let v = [v1, v2, v3];
                    if self.eval_int(&v).is_zero() {
                        return Some(v);
                    }
                }
            }
        }
        None
    }
}

/// Forms with exact rational Gram entries.
pub type RationalForm = TernaryForm<BigRational>;

/// The standard form `β² − 4αγ` over the rationals.
pub fn standard_form() -> RationalForm {
    TernaryForm::standard()
}

/// Checks `m·Q'(v) = Q(v·M)` for an integer scale and integer matrix.
pub fn verify_equivalence(qp: &RationalForm, m: &BigInt, mat: &Mat3<BigInt>) -> bool {
    let lift = |x: &BigInt| BigRational::from_integer(x.clone());
    qp.is_equivalent_to_standard(&lift(m), &matrix::map(mat, lift))
}

impl RationalForm {
    /// `v·G·vᵀ` at the precision of `v`, refusing when the tracked error
    /// exceeds the output tolerance.
    pub fn evaluate(&self, v: &[FixedReal; 3]) -> Result<FixedReal> {
        let bits = v.iter().map(FixedReal::bits).max().unwrap_or(0);
        let g = |i: usize, j: usize| FixedReal::from_exact(self.gram[i][j].clone(), bits);
        let two = BigInt::from(2);
        let mut acc = FixedReal::zero(bits);
        for i in 0..3 {
            if !self.gram[i][i].is_zero() {
                acc = &acc + &(&g(i, i) * &(&v[i] * &v[i]));
            }
            for j in i + 1..3 {
                if !self.gram[i][j].is_zero() {
                    acc = &acc + &(&g(i, j) * &(&v[i] * &v[j])).mul_int(&two);
                }
            }
        }
        acc.certify("form evaluation")
    }

    /// `Q_ξ(v) = Q(v + ξ)` for an integer vector `v`.
    pub fn evaluate_shifted(&self, xi: &ShiftVector, v: &[BigInt; 3]) -> Result<FixedReal> {
        let bits = xi.bits();
        let shifted: [FixedReal; 3] =
            std::array::from_fn(|i| &FixedReal::from_int(v[i].clone(), bits) + &xi.components()[i]);
        self.evaluate(&shifted)
    }
}

/// Parses the six-entry form literal `"a11 a22 a33 a12 a13 a23"` (Gram
/// entries, each an integer or `p/q`).
impl FromStr for RationalForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            what: "form literal (a11 a22 a33 a12 a13 a23)",
            input: s.to_string(),
        };
        let entries: Vec<BigRational> = s
            .split_whitespace()
            .map(|t| t.parse::<BigRational>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let [a11, a22, a33, a12, a13, a23]: [BigRational; 6] =
            entries.try_into().map_err(|_| bad())?;
        TernaryForm::new([
            [a11, a12.clone(), a13.clone()],
            [a12, a22, a23.clone()],
            [a13, a23, a33],
        ])
    }
}

impl<R: fmt::Display> fmt::Display for TernaryForm<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = &self.gram;
        write!(
            f,
            "{} {} {} {} {} {}",
            g[0][0], g[1][1], g[2][2], g[0][1], g[0][2], g[1][2]
        )
    }
}

/// The shift `ξ = (α, β, γ)` of an inhomogeneous form.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftVector {
    comps: [FixedReal; 3],
}

impl ShiftVector {
    /// All three components are brought to the largest precision among them.
    pub fn new(alpha: FixedReal, beta: FixedReal, gamma: FixedReal) -> Self {
        let bits = alpha.bits().max(beta.bits()).max(gamma.bits());
        ShiftVector {
            comps: [
                alpha.with_bits(bits),
                beta.with_bits(bits),
                gamma.with_bits(bits),
            ],
        }
    }

    pub fn from_array(c: [FixedReal; 3]) -> Self {
        let [a, b, g] = c;
        Self::new(a, b, g)
    }

    pub fn zero(bits: u32) -> Self {
        Self::new(
            FixedReal::zero(bits),
            FixedReal::zero(bits),
            FixedReal::zero(bits),
        )
    }

    pub fn alpha(&self) -> &FixedReal {
        &self.comps[0]
    }

    pub fn beta(&self) -> &FixedReal {
        &self.comps[1]
    }

    pub fn gamma(&self) -> &FixedReal {
        &self.comps[2]
    }

    pub fn components(&self) -> &[FixedReal; 3] {
        &self.comps
    }

    pub fn bits(&self) -> u32 {
        self.comps[0].bits()
    }

    pub fn with_bits(&self, bits: u32) -> Self {
        ShiftVector {
            comps: self.comps.clone().map(|c| c.with_bits(bits)),
        }
    }
}
