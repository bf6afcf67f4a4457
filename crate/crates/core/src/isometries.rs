//! Integer isometries of the standard form: the image of `SL₂(ℤ)` under the
//! symmetric-square embedding `ι` and its one-parameter unipotent subgroup
//! `M_m = ι([[1, m], [0, 1]])`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fixed::FixedReal;
use crate::forms::ShiftVector;
use crate::matrix::{self, Mat3};
use crate::scalar::OrderedRing;

/// Scalars usable as exact matrix entries.
pub trait IntScalar: OrderedRing + Integer {}
impl<T: OrderedRing + Integer> IntScalar for T {}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sl2<I> {
    pub a: I,
    pub b: I,
    pub c: I,
    pub d: I,
}

impl<I: IntScalar> Sl2<I> {
    pub fn new(a: I, b: I, c: I, d: I) -> Result<Self> {
        if a.clone() * d.clone() - b.clone() * c.clone() != I::one() {
            return Err(Error::InvalidMatrix("determinant is not 1".into()));
        }
        Ok(Sl2 { a, b, c, d })
    }

    pub fn identity() -> Self {
        Sl2 {
            a: I::one(),
            b: I::zero(),
            c: I::zero(),
            d: I::one(),
        }
    }

    /// `[[1, m], [0, 1]]`.
    pub fn upper(m: I) -> Self {
        Sl2 {
            a: I::one(),
            b: m,
            c: I::zero(),
            d: I::one(),
        }
    }

    /// Some `[[a, b], [c, d]] ∈ SL₂(ℤ)` with the given first column; needs `gcd(a, c) = 1`.
    pub fn with_first_column(a: I, c: I) -> Result<Self> {
        let eg = a.extended_gcd(&c);
        let (g, x, y) = (eg.gcd, eg.x, eg.y);
        if g != I::one() {
            return Err(Error::validation("direction (a, c) is not coprime"));
        }
        // a·x + c·y = 1, so d = x, b = -y
        Self::new(a, I::zero() - y, c, x)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let m = |p: &I, q: &I, r: &I, s: &I| p.clone() * q.clone() + r.clone() * s.clone();
        Sl2 {
            a: m(&self.a, &o.a, &self.b, &o.c),
            b: m(&self.a, &o.b, &self.b, &o.d),
            c: m(&self.c, &o.a, &self.d, &o.c),
            d: m(&self.c, &o.b, &self.d, &o.d),
        }
    }

    pub fn inverse(&self) -> Self {
        Sl2 {
            a: self.d.clone(),
            b: I::zero() - self.b.clone(),
            c: I::zero() - self.c.clone(),
            d: self.a.clone(),
        }
    }
}

/// An integer matrix preserving the standard form under `v ↦ v·M`, of determinant 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SoqMatrix<I> {
    m: Mat3<I>,
}

fn standard_gram<I: IntScalar>() -> Mat3<I> {
    let m2 = I::zero() - I::one() - I::one();
    let z = I::zero;
    [[z(), z(), m2.clone()], [z(), I::one(), z()], [m2, z(), z()]]
}

impl<I: IntScalar> SoqMatrix<I> {
    pub fn new(m: Mat3<I>) -> Result<Self> {
        let g = standard_gram::<I>();
        if matrix::mul(&matrix::mul(&m, &g), &matrix::transpose(&m)) != g {
            return Err(Error::InvalidMatrix(
                "matrix does not preserve the standard form".into(),
            ));
        }
        if matrix::det(&m) != I::one() {
            return Err(Error::InvalidMatrix("determinant is not 1".into()));
        }
        Ok(SoqMatrix { m })
    }

    pub fn identity() -> Self {
        SoqMatrix {
            m: matrix::identity(),
        }
    }

    pub fn entries(&self) -> &Mat3<I> {
        &self.m
    }

    pub fn mul(&self, o: &Self) -> Self {
        SoqMatrix {
            m: matrix::mul(&self.m, &o.m),
        }
    }

    /// Exact inverse (the adjugate, as the determinant is 1).
    pub fn inverse(&self) -> Self {
        SoqMatrix {
            m: matrix::adjugate(&self.m),
        }
    }

    /// `v·M` for an exact row vector.
    pub fn act(&self, v: &[I; 3]) -> [I; 3] {
        matrix::row_mul(v, &self.m)
    }

    pub fn max_abs_entry(&self) -> I {
        self.m
            .iter()
            .flatten()
            .map(|x| x.abs())
            .fold(I::zero(), |a, b| if b > a { b } else { a })
    }
}

/// `ι([[a, b], [c, d]]) = [[a², 2ab, b²], [ac, ad+bc, bd], [c², 2cd, d²]]`.
pub fn iota<I: IntScalar>(g: &Sl2<I>) -> SoqMatrix<I> {
    let (a, b, c, d) = (&g.a, &g.b, &g.c, &g.d);
    let p = |x: &I, y: &I| x.clone() * y.clone();
    let two = I::one() + I::one();
    SoqMatrix {
        m: [
            [p(a, a), two.clone() * p(a, b), p(b, b)],
            [p(a, c), p(a, d) + p(b, c), p(b, d)],
            [p(c, c), two * p(c, d), p(d, d)],
        ],
    }
}

/// `M_m = [[1, 2m, m²], [0, 1, m], [0, 0, 1]]`.
pub fn unipotent<I: IntScalar>(m: I) -> SoqMatrix<I> {
    let z = I::zero;
    let two = I::one() + I::one();
    SoqMatrix {
        m: [
            [I::one(), two * m.clone(), m.clone() * m.clone()],
            [z(), I::one(), m],
            [z(), z(), I::one()],
        ],
    }
}

/// `M_{m1}·M_{m2} = M_{m1+m2}`.
pub fn group_law_check<I: IntScalar>(m1: I, m2: I) -> bool {
    unipotent(m1.clone()).mul(&unipotent(m2.clone())) == unipotent(m1 + m2)
}

/// `ξ·M`, with the error radius certified against the output tolerance.
pub fn apply<I: IntScalar + Into<BigInt>>(
    xi: &ShiftVector,
    mat: &SoqMatrix<I>,
) -> Result<ShiftVector> {
    let e = matrix::map(&mat.m, |x| -> BigInt { x.clone().into() });
    let comps = xi.components();
    let out: [Result<FixedReal>; 3] = std::array::from_fn(|j| {
        (0..3)
            .filter(|&i| !e[i][j].is_zero())
            .fold(FixedReal::zero(xi.bits()), |acc, i| {
                &acc + &comps[i].mul_int(&e[i][j])
            })
            .certify("isometry action")
    });
    let [a, b, c] = out;
    Ok(ShiftVector::new(a?, b?, c?))
}

impl<I: fmt::Display> fmt::Display for SoqMatrix<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, row) in self.m.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{} {} {}", row[0], row[1], row[2])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::standard_form;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn mat(rows: [[i64; 3]; 3]) -> SoqMatrix<BigInt> {
        SoqMatrix::new(matrix::map(&rows, |&x| BigInt::from(x))).unwrap()
    }

    #[test]
    fn iota_examples() {
        assert_eq!(iota(&Sl2::<BigInt>::identity()), SoqMatrix::identity());
        assert_eq!(
            iota(&Sl2::upper(BigInt::from(2))),
            mat([[1, 4, 4], [0, 1, 2], [0, 0, 1]])
        );
        let w = Sl2::new(0i64, -1, 1, 0).unwrap();
        assert_eq!(iota(&w).entries(), &[[0, 0, 1], [0, -1, 0], [1, 0, 0]]);
    }

    #[test]
    fn unipotent_examples() {
        assert_eq!(unipotent(BigInt::from(0)), SoqMatrix::identity());
        assert_eq!(
            unipotent(1i64).entries(),
            &[[1, 2, 1], [0, 1, 1], [0, 0, 1]]
        );
        assert_eq!(
            unipotent(-3i64).entries(),
            &[[1, -6, 9], [0, 1, -3], [0, 0, 1]]
        );
        // past 64-bit range for m², exact in big integers
        let big = BigInt::from(5_000_000_000i64);
        let m = unipotent(big.clone());
        assert_eq!(m.entries()[0][2], &big * &big);
        assert!(SoqMatrix::new(m.entries().clone()).is_ok());
    }

    #[test]
    fn group_law() {
        for k in -20..=20 {
            assert!(group_law_check(0i64, k));
        }
        assert!(group_law_check(BigInt::from(5), BigInt::from(7)));
        assert!(group_law_check(-4i64, 4));
        assert_eq!(unipotent(-4i64).mul(&unipotent(4)), SoqMatrix::identity());
    }

    #[test]
    fn rejects_non_isometries() {
        let bad = matrix::map(&[[1, 1, 0], [0, 1, 0], [0, 0, 1]], |&x: &i64| {
            BigInt::from(x)
        });
        assert!(SoqMatrix::new(bad).is_err());
        // -I preserves Q but has determinant -1
        let neg = matrix::map(&[[-1, 0, 0], [0, -1, 0], [0, 0, -1]], |&x: &i64| {
            BigInt::from(x)
        });
        assert!(SoqMatrix::new(neg).is_err());
        assert!(Sl2::new(2i64, 1, 1, 1).is_ok());
        assert!(Sl2::new(2i64, 1, 1, 2).is_err());
    }

    #[test]
    fn first_column_completion() {
        for (a, c) in [(1i64, 0i64), (0, 1), (3, 5), (-7, 4), (1, -1)] {
            let g = Sl2::with_first_column(a, c).unwrap();
            assert_eq!((g.a, g.c), (a, c));
        }
        assert!(Sl2::with_first_column(2i64, 4).is_err());
    }

    #[test]
    fn apply_examples() {
        let bits = 256;
        let s2 = FixedReal::sqrt_of(2, bits).unwrap();
        let xi = ShiftVector::new(
            s2.clone(),
            FixedReal::from_ratio(1, 3, bits).unwrap(),
            FixedReal::zero(bits),
        );
        assert_eq!(apply(&xi, &SoqMatrix::<BigInt>::identity()).unwrap(), xi);

        let m = 7i64;
        let out = apply(&xi, &unipotent(BigInt::from(m))).unwrap();
        assert_eq!(out.alpha(), xi.alpha());
        let want2 = 2.0 * std::f64::consts::SQRT_2 * m as f64 + 1.0 / 3.0;
        let want3 = std::f64::consts::SQRT_2 * (m * m) as f64 + m as f64 / 3.0;
        assert!((out.beta().to_f64() - want2).abs() < 1e-13);
        assert!((out.gamma().to_f64() - want3).abs() < 1e-13);

        let e1 = ShiftVector::new(
            FixedReal::from_int(1, bits),
            FixedReal::zero(bits),
            FixedReal::zero(bits),
        );
        let w = iota(
            &Sl2::new(
                BigInt::from(0),
                BigInt::from(-1),
                BigInt::from(1),
                BigInt::from(0),
            )
            .unwrap(),
        );
        let out = apply(&e1, &w).unwrap();
        assert_eq!(
            out.components().clone().map(|c| c.to_f64()),
            [0.0, 0.0, 1.0]
        );
    }

    #[test]
    fn apply_refuses_when_precision_runs_out() {
        let s2 = FixedReal::sqrt_of(2, 64).unwrap();
        let xi = ShiftVector::new(s2, FixedReal::zero(64), FixedReal::zero(64));
        assert!(matches!(
            apply(&xi, &unipotent(BigInt::from(1_000_000))),
            Err(Error::PrecisionExhausted(_))
        ));
    }

    fn sl2_strategy() -> impl Strategy<Value = Sl2<BigInt>> {
        // a random word in the generators stays unimodular
        proptest::collection::vec((0u8..2, -5i64..=5), 1..6).prop_map(|word| {
            word.into_iter().fold(Sl2::identity(), |g, (kind, k)| {
                let h = if kind == 0 {
                    Sl2::upper(BigInt::from(k))
                } else {
                    Sl2::new(
                        BigInt::from(1),
                        BigInt::from(0),
                        BigInt::from(k),
                        BigInt::from(1),
                    )
                    .unwrap()
                };
                g.mul(&h)
            })
        })
    }

    proptest! {
        #[test]
        fn iota_is_a_homomorphism(g in sl2_strategy(), h in sl2_strategy()) {
            prop_assert_eq!(iota(&g.mul(&h)), iota(&g).mul(&iota(&h)));
            prop_assert!(SoqMatrix::new(iota(&g).entries().clone()).is_ok());
            prop_assert_eq!(iota(&g.inverse()), iota(&g).inverse());
        }

        #[test]
        fn isometries_preserve_the_form(g in sl2_strategy(), v in proptest::array::uniform3(-50i64..=50)) {
            let m = iota(&g);
            let vb = v.map(BigInt::from);
            let q = |x: &[BigInt; 3]| standard_form().eval(&x.clone().map(BigRational::from_integer));
            prop_assert_eq!(q(&m.act(&vb)), q(&vb));
        }

        #[test]
        fn unipotent_inverse(m in -1000i64..=1000) {
            prop_assert_eq!(unipotent(BigInt::from(m)).inverse(), unipotent(BigInt::from(-m)));
        }
    }
}
