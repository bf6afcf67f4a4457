//! Run configuration: a flat `key = value` file, overridden key by key from
//! the command line.
//!
//! Mathematical inputs (`xi`, `t`, `delta`, `nu`, `v0`, `alpha`) use the real
//! literal grammar of [`crate::literal`]; tuning constants (`scan_c`,
//! `bound_C`) are plain decimal numbers; counts accept `1e8` and `100_000`.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::fixed::{FixedReal, DEFAULT_FRAC_BITS, MIN_FRAC_BITS};
use crate::forms::{RationalForm, ShiftVector};
use crate::literal::{parse_real, parse_triple};

/// Every key the harness understands.
pub const KEYS: &[&str] = &[
    "precision",
    "xi",
    "form",
    "t",
    "T",
    "delta",
    "nu",
    "scan_c",
    "bound_C",
    "q_max",
    "direction_bound",
    "direction",
    "out",
    "seed",
    "threads",
    "T_grid",
    "mode",
    "v0",
    "alpha",
    "alphas",
    "ns",
    "beta_samples",
    "isotropic_bound",
    "equivalence_m",
    "equivalence_matrix",
];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

fn invalid(key: &str, value: &str, why: &str) -> Error {
    Error::validation(format!("{key} = {value:?}: {why}"))
}

/// A non-negative integer written as digits (underscores allowed) or `MeE`.
pub fn parse_count(s: &str) -> Option<u64> {
    let s = s.trim().replace('_', "");
    if let Some((m, e)) = s.split_once(['e', 'E']) {
        let m: u64 = m.parse().ok()?;
        let e: u32 = e.parse().ok()?;
        return m.checked_mul(10u64.checked_pow(e)?);
    }
    s.parse().ok()
}

impl RunConfig {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::validation(format!("line {}: expected key = value", i + 1))
            })?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::validation(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(Error::validation(format!("unknown key {key:?}")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Parses a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::validation(format!("{pair:?}: expected key=value")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::validation(format!("missing required key {key:?}")))
    }

    pub fn precision(&self) -> Result<u32> {
        let Some(s) = self.get("precision") else {
            return Ok(DEFAULT_FRAC_BITS);
        };
        let bits = parse_count(s)
            .and_then(|b| u32::try_from(b).ok())
            .ok_or_else(|| invalid("precision", s, "not a bit count"))?;
        if bits < MIN_FRAC_BITS {
            return Err(invalid(
                "precision",
                s,
                "at least 64 fractional bits are required",
            ));
        }
        Ok(bits)
    }

    pub fn count(&self, key: &str, default: Option<u64>) -> Result<u64> {
        match self.get(key) {
            Some(s) => parse_count(s).ok_or_else(|| invalid(key, s, "not a non-negative integer")),
            None => {
                default.ok_or_else(|| Error::validation(format!("missing required key {key:?}")))
            }
        }
    }

    pub fn counts(&self, key: &str, default: &str) -> Result<Vec<u64>> {
        let s = self.get(key).unwrap_or(default);
        s.split(',')
            .map(|p| {
                parse_count(p).ok_or_else(|| invalid(key, s, "expected comma-separated integers"))
            })
            .collect()
    }

    pub fn integers(&self, key: &str, default: &str) -> Result<Vec<i64>> {
        let s = self.get(key).unwrap_or(default);
        s.split([',', ' '])
            .filter(|p| !p.trim().is_empty())
            .map(|p| {
                p.trim()
                    .parse()
                    .map_err(|_| invalid(key, s, "expected integers"))
            })
            .collect()
    }

    /// A plain decimal number such as `1`, `32` or `0.5`.
    pub fn number(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            Some(s) => s
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| invalid(key, s, "not a finite number")),
            None => Ok(default),
        }
    }

    pub fn real(&self, key: &str, default: Option<&str>, bits: u32) -> Result<FixedReal> {
        let s = match self.get(key) {
            Some(s) => s,
            None => {
                default.ok_or_else(|| Error::validation(format!("missing required key {key:?}")))?
            }
        };
        parse_real(s, bits)
    }

    pub fn real_literal(&self, key: &str, default: &str) -> String {
        self.get(key).unwrap_or(default).to_string()
    }

    pub fn xi(&self, bits: u32) -> Result<ShiftVector> {
        Ok(ShiftVector::from_array(parse_triple(
            self.require("xi")?,
            bits,
        )?))
    }

    pub fn form(&self) -> Result<Option<RationalForm>> {
        self.get("form").map(str::parse).transpose()
    }

    /// `(a, c)` given by the user; must be coprime.
    pub fn direction(&self) -> Result<Option<(i64, i64)>> {
        let Some(s) = self.get("direction") else {
            return Ok(None);
        };
        let v = self.integers("direction", "")?;
        let [a, c] = v[..] else {
            return Err(invalid("direction", s, "expected two integers a,c"));
        };
        if num_integer::Integer::gcd(&a, &c) != 1 {
            return Err(invalid("direction", s, "a and c must be coprime"));
        }
        Ok(Some((a, c)))
    }

    /// `δ` for a given `T`: either `delta`, or `T^(−ν)` from `nu`.
    pub fn delta_for(&self, t: u64, bits: u32) -> Result<f64> {
        let delta = match (self.get("delta"), self.get("nu")) {
            (Some(_), Some(_)) => {
                return Err(Error::validation("give either delta or nu, not both"))
            }
            (Some(_), None) => self.real("delta", None, bits)?.to_f64(),
            (None, Some(_)) => (t as f64).powf(-self.nu(bits)?.unwrap_or(0.0)),
            (None, None) => return Err(Error::validation("missing delta (or nu)")),
        };
        check_delta(delta)?;
        Ok(delta)
    }

    pub fn nu(&self, bits: u32) -> Result<Option<f64>> {
        let Some(s) = self.get("nu") else {
            return Ok(None);
        };
        let nu = parse_real(s, bits)?.to_f64();
        if !(nu > 0.0 && nu < 0.5) {
            return Err(invalid("nu", s, "must lie in (0, 1/2)"));
        }
        Ok(Some(nu))
    }

    pub fn seed(&self) -> Result<u64> {
        self.count("seed", Some(1))
    }

    pub fn threads(&self) -> Result<usize> {
        Ok(self.count("threads", Some(0))? as usize)
    }

    /// Integer matrix entries in row-major order.
    pub fn matrix(&self, key: &str) -> Result<Option<[[BigInt; 3]; 3]>> {
        let Some(s) = self.get(key) else {
            return Ok(None);
        };
        let v = self.integers(key, "")?;
        if v.len() != 9 {
            return Err(invalid(key, s, "expected nine integers"));
        }
        Ok(Some(std::array::from_fn(|i| {
            std::array::from_fn(|j| BigInt::from(v[3 * i + j]))
        })))
    }
}

pub fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::validation(format!(
            "delta = {delta} must lie in (0, 1/2)"
        )));
    }
    Ok(())
}

pub fn check_t(t: u64) -> Result<()> {
    if t < 4 {
        return Err(Error::validation(format!("T = {t} must be at least 4")));
    }
    Ok(())
}

/// `x` as an `f64` for reporting; integers too large become infinite.
pub fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_and_overrides() {
        let mut cfg = RunConfig::parse(
            "# comment\nxi = sqrt:2 0/1 0/1\nT = 1e4   # trailing\n\ndelta = 1/5\n",
        )
        .unwrap();
        assert_eq!(cfg.count("T", None).unwrap(), 10_000);
        cfg.set_pair("T=100_000").unwrap();
        assert_eq!(cfg.count("T", None).unwrap(), 100_000);
        assert_eq!(cfg.delta_for(100, 256).unwrap(), 0.2);
        assert!(cfg.xi(256).is_ok());
        assert!(RunConfig::parse("bogus = 1").is_err());
        assert!(RunConfig::parse("no equals sign").is_err());
    }

    #[test]
    fn validation() {
        let cfg = RunConfig::parse("precision = 32").unwrap();
        assert!(cfg.precision().is_err());
        let cfg = RunConfig::parse("delta = 1/2").unwrap();
        assert!(cfg.delta_for(100, 256).is_err());
        let cfg = RunConfig::parse("delta = 0/1").unwrap();
        assert!(cfg.delta_for(100, 256).is_err());
        let cfg = RunConfig::parse("nu = 1/2").unwrap();
        assert!(cfg.delta_for(100, 256).is_err());
        let cfg = RunConfig::parse("nu = 1/10").unwrap();
        assert!((cfg.delta_for(100_000_000, 256).unwrap() - 0.1584893192461113).abs() < 1e-15);
        let cfg = RunConfig::parse("nu = 1/10\ndelta = 1/5").unwrap();
        assert!(cfg.delta_for(100, 256).is_err());
        let cfg = RunConfig::parse("direction = 2,4").unwrap();
        assert!(cfg.direction().is_err());
        let cfg = RunConfig::parse("direction = 2,-3").unwrap();
        assert_eq!(cfg.direction().unwrap(), Some((2, -3)));
        assert!(check_t(3).is_err() && check_t(4).is_ok());
    }

    #[test]
    fn counts_and_lists() {
        assert_eq!(parse_count("1e8"), Some(100_000_000));
        assert_eq!(parse_count("12_345"), Some(12_345));
        assert_eq!(parse_count("-3"), None);
        let cfg = RunConfig::parse("T_grid = 20, 40,80").unwrap();
        assert_eq!(cfg.counts("T_grid", "1").unwrap(), vec![20, 40, 80]);
        let cfg = RunConfig::parse("equivalence_matrix = 1 0 0 0 1 0 0 0 1").unwrap();
        assert!(cfg.matrix("equivalence_matrix").unwrap().is_some());
    }
}
