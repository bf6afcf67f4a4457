use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use isodense::forms::{standard_form, ShiftVector};
use isodense::isometries::unipotent;
use isodense::literal::parse_triple;
use isodense::matrix::{map, row_mul};
use isodense::solver::{find_solutions, verify_solution};
use isodense::FixedReal;

const BITS: u32 = 256;

fn shift(d: u32, p: i64, q: i64, bits: u32) -> ShiftVector {
    let s = format!("sqrt:{d} {p}/{q} {q}/{}", q + p.abs() + 1);
    ShiftVector::from_array(parse_triple(&s, bits).unwrap())
}

fn nonsquare() -> impl Strategy<Value = u32> {
    (2u32..50).prop_filter("non-square", |d| {
        let r = (*d as f64).sqrt() as u32;
        r * r != *d
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solutions_are_certified_and_distinct(
        d in nonsquare(),
        p in -9i64..10,
        q in 1i64..10,
        tn in -20i64..20,
        t_bound in 100u64..2_000_000,
        delta in 0.05f64..0.45,
    ) {
        let xi = shift(d, p, q, BITS);
        let t = FixedReal::from_ratio(tn, 7, BITS).unwrap();
        let rep = find_solutions(&xi, &t, t_bound, delta, 1.0, 32.0).unwrap();
        let xi_hi = shift(d, p, q, 2 * BITS);
        let t_hi = FixedReal::from_ratio(tn, 7, 2 * BITS).unwrap();
        let bound2 = BigInt::from(t_bound).pow(2);
        let mut seen = HashSet::new();
        for s in &rep.solutions {
            verify_solution(&xi_hi, &t_hi, &rep, s).unwrap();
            prop_assert_eq!(&s.v[0], &BigInt::from(0));
            prop_assert!(s.v.iter().map(|x| x * x).sum::<BigInt>() <= bound2);
            prop_assert!(s.residual <= 32.0 * delta);
            prop_assert_eq!(row_mul(&s.u, unipotent(BigInt::from(-s.m)).entries()), s.v.clone());
            prop_assert!(seen.insert(s.v.clone()));
        }
        prop_assert!(rep.solutions.windows(2).all(|w| w[0].m < w[1].m));
    }

    #[test]
    fn count_is_monotone(
        d in nonsquare(),
        p in -9i64..10,
        q in 1i64..10,
        t_bound in 100u64..1_000_000,
        grow in 1u64..4,
        delta in 0.05f64..0.2,
        wider in 1.0f64..2.0,
    ) {
        let xi = shift(d, p, q, BITS);
        let t = FixedReal::zero(BITS);
        let base = find_solutions(&xi, &t, t_bound, delta, 1.0, 32.0).unwrap();
        let more_t = find_solutions(&xi, &t, t_bound * grow, delta, 1.0, 32.0).unwrap();
        let more_d = find_solutions(&xi, &t, t_bound, delta * wider, 1.0, 32.0).unwrap();
        prop_assert!(more_t.count >= base.count);
        prop_assert!(more_d.count >= base.count);
    }

    #[test]
    fn orbit_identity_is_exact(
        xs in prop::array::uniform3((-50i64..50, 1i64..20)),
        m in -200i64..200,
        a in -1000i64..1000,
        b in -1000i64..1000,
    ) {
        // Q(ξM_m + u) = Q_ξ(u·M_m⁻¹) over the rationals
        let q = standard_form();
        let xi: [BigRational; 3] = xs.map(|(n, d)| BigRational::new(n.into(), d.into()));
        let u = [BigInt::from(0), BigInt::from(a), BigInt::from(b)];
        let rat = |e: &BigInt| BigRational::from_integer(e.clone());
        let mm = map(unipotent(BigInt::from(m)).entries(), rat);
        let lhs_v: [BigRational; 3] = {
            let w = row_mul(&xi, &mm);
            std::array::from_fn(|i| &w[i] + rat(&u[i]))
        };
        let v = row_mul(&u, unipotent(BigInt::from(-m)).entries());
        let rhs_v: [BigRational; 3] = std::array::from_fn(|i| &xi[i] + rat(&v[i]));
        prop_assert_eq!(q.eval(&lhs_v), q.eval(&rhs_v));
    }
}
