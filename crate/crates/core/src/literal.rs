//! The real-number literal grammar accepted on the command line and in
//! config files:
//!
//! | literal            | value            |
//! |--------------------|------------------|
//! | `p/q`              | the rational p/q |
//! | `sqrt:d`           | √d               |
//! | `surd:u,v,w,d`     | (u + v√d)/w      |
//! | `dec:<decimal>`    | the decimal, with radius half a unit in its last digit |

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::fixed::FixedReal;

fn int(s: &str, what: &'static str) -> Result<BigInt> {
    let t = s.strip_prefix('+').unwrap_or(s);
    if t.is_empty()
        || !t
            .trim_start_matches('-')
            .bytes()
            .all(|b| b.is_ascii_digit())
    {
        return Err(Error::Parse {
            what,
            input: s.to_string(),
        });
    }
    t.parse().map_err(|_| Error::Parse {
        what,
        input: s.to_string(),
    })
}

/// Parses one real literal at `bits` fractional bits.
pub fn parse_real(s: &str, bits: u32) -> Result<FixedReal> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("sqrt:") {
        return FixedReal::sqrt_of(int(rest, "sqrt radicand")?, bits);
    }
    if let Some(rest) = s.strip_prefix("surd:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 4 {
            return Err(Error::Parse {
                what: "surd literal (u,v,w,d)",
                input: s.to_string(),
            });
        }
        return FixedReal::from_surd(
            int(parts[0], "surd u")?,
            int(parts[1], "surd v")?,
            int(parts[2], "surd w")?,
            int(parts[3], "surd d")?,
            bits,
        );
    }
    if let Some(rest) = s.strip_prefix("dec:") {
        return FixedReal::from_decimal(rest, bits);
    }
    match s.split_once('/') {
        Some((p, q)) => FixedReal::from_ratio(int(p, "numerator")?, int(q, "denominator")?, bits),
        None => Err(Error::Parse {
            what: "real literal (p/q, sqrt:d, surd:u,v,w,d or dec:x)",
            input: s.to_string(),
        }),
    }
}

/// Parses a whitespace-separated triple of real literals.
pub fn parse_triple(s: &str, bits: u32) -> Result<[FixedReal; 3]> {
    let parts: Vec<&str> = s.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(Error::Parse {
            what: "triple of real literals",
            input: s.to_string(),
        });
    }
    Ok([
        parse_real(parts[0], bits)?,
        parse_real(parts[1], bits)?,
        parse_real(parts[2], bits)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn rationals_are_exact() {
        let x = parse_real("-6/4", 128).unwrap();
        assert_eq!(x.exact(), Some(&BigRational::new((-3).into(), 2.into())));
        assert!(parse_real("1/0", 128).is_err());
        assert!(parse_real("3", 128).is_err());
        assert!(parse_real("1/2/3", 128).is_err());
    }

    #[test]
    fn surds() {
        let golden = parse_real("surd:1,1,2,5", 256).unwrap();
        assert!((golden.to_f64() - 1.618033988749895).abs() < 1e-15);
        let r3 = parse_real("sqrt:3", 256).unwrap();
        assert!((r3.to_f64() - 3f64.sqrt()).abs() < 1e-15);
        assert!(parse_real("sqrt:-2", 256).is_err());
        assert!(parse_real("surd:1,2,3", 256).is_err());
    }

    #[test]
    fn decimals() {
        let x = parse_real("dec:3.14159", 128).unwrap();
        assert!((x.err_bound() - 5e-6).abs() < 1e-18);
        assert!(parse_real("dec:abc", 128).is_err());
    }

    #[test]
    fn triples() {
        let t = parse_triple("sqrt:2 0/1  1/2", 128).unwrap();
        assert_eq!(t[2].to_f64(), 0.5);
        assert!(parse_triple("sqrt:2 0/1", 128).is_err());
    }
}
