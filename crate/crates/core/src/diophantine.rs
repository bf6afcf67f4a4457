//! Continued fractions, Dirichlet approximation and finite-range estimates of
//! how badly approximable a real number is.
//!
//! Partial quotients are produced from the center of a [`FixedReal`] and are
//! only emitted while they are certified:
//!
//! * the denominator guard `4·q_k²·err ≤ 1` holds, and
//! * for inexact inputs, both ends of the error interval share the quotient.
//!
//! An expansion of the center that terminates while the guard still holds is
//! reported as a rational number.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fixed::FixedReal;
use crate::forms::ShiftVector;

/// Why an expansion stopped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CfStop {
    /// The requested number of terms (or denominator bound) was reached.
    Complete,
    /// The expansion of the center terminated: the input looks rational.
    Terminated,
    /// The next quotient could not be certified at the working precision.
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfExpansion {
    pub quotients: Vec<BigInt>,
    pub stop: CfStop,
}

#[derive(Clone, Copy, Debug)]
enum Limit<'a> {
    Terms(usize),
    /// Stop before the first convergent whose denominator exceeds the bound.
    Denominator(&'a BigInt),
}

fn recip(x: &BigRational) -> BigRational {
    x.recip()
}

fn expand(alpha: &FixedReal, limit: Limit<'_>) -> CfExpansion {
    let mut x = alpha.center();
    let (err, bits) = if alpha.is_exact() {
        (BigInt::zero(), alpha.bits())
    } else {
        (BigInt::from(alpha.err_ulps().clone()), alpha.bits())
    };
    let radius = BigRational::new(err.clone(), BigInt::one() << bits);
    let mut ends = if err.is_zero() {
        None
    } else {
        Some((&x - &radius, &x + &radius))
    };
    let one_scaled = BigInt::one() << bits;

    let mut quotients = Vec::new();
    let (mut q_prev, mut q_prev2) = (BigInt::zero(), BigInt::one());
    loop {
        if let Limit::Terms(n) = limit {
            if quotients.len() >= n {
                return CfExpansion {
                    quotients,
                    stop: CfStop::Complete,
                };
            }
        }
        let a = x.floor().to_integer();
        let q = &a * &q_prev + &q_prev2;
        if let Limit::Denominator(bound) = limit {
            if &q > bound {
                return CfExpansion {
                    quotients,
                    stop: CfStop::Complete,
                };
            }
        }
        if (&q * &q * &err) << 2u32 > one_scaled {
            return CfExpansion {
                quotients,
                stop: CfStop::Exhausted,
            };
        }
        let rest = &x - BigRational::from_integer(a.clone());
        if rest.is_zero() {
            quotients.push(a);
            return CfExpansion {
                quotients,
                stop: CfStop::Terminated,
            };
        }
        if let Some((lo, hi)) = &ends {
            let a_lo = lo.floor().to_integer();
            let a_hi = hi.floor().to_integer();
            let a_r = BigRational::from_integer(a.clone());
            if a_lo != a || a_hi != a || lo == &a_r || hi == &a_r {
                return CfExpansion {
                    quotients,
                    stop: CfStop::Exhausted,
                };
            }
            ends = Some((recip(&(lo - &a_r)), recip(&(hi - &a_r))));
        }
        x = recip(&rest);
        quotients.push(a);
        q_prev2 = std::mem::replace(&mut q_prev, q);
    }
}

/// The first `n_terms` certified partial quotients `[a₀; a₁, …]`. A rational
/// input may yield fewer terms, with `stop == Terminated`.
pub fn continued_fraction(alpha: &FixedReal, n_terms: usize) -> Result<CfExpansion> {
    let cf = expand(alpha, Limit::Terms(n_terms));
    if cf.stop == CfStop::Exhausted {
        return Err(Error::precision(format!(
            "continued fraction certified only to {} terms: {:?}",
            cf.quotients.len(),
            cf.quotients
        )));
    }
    Ok(cf)
}

/// Certified partial quotients up to the last convergent with `q ≤ bound`,
/// along with the stop reason (never an error).
pub fn expand_to_denominator(alpha: &FixedReal, bound: &BigInt) -> CfExpansion {
    expand(alpha, Limit::Denominator(bound))
}

/// A convergent `p/q` together with `‖qα‖ = |qα − p|`.
#[derive(Clone, Debug, PartialEq)]
pub struct Convergent {
    pub p: BigInt,
    pub q: BigInt,
    pub dist: FixedReal,
}

/// Convergents from partial quotients via `p_k = a_k p_{k−1} + p_{k−2}` (and
/// likewise for `q_k`), with `dist` evaluated at the precision of `alpha`.
pub fn convergents(cf: &[BigInt], alpha: &FixedReal) -> Result<Vec<Convergent>> {
    let (mut p1, mut p2) = (BigInt::one(), BigInt::zero());
    let (mut q1, mut q2) = (BigInt::zero(), BigInt::one());
    let mut out = Vec::with_capacity(cf.len());
    for a in cf {
        let p = a * &p1 + &p2;
        let q = a * &q1 + &q2;
        let dist = (&alpha.mul_int(&q) - &FixedReal::from_int(p.clone(), alpha.bits()))
            .abs()
            .certify("convergent distance")?;
        out.push(Convergent {
            p: p.clone(),
            q: q.clone(),
            dist,
        });
        p2 = std::mem::replace(&mut p1, p);
        q2 = std::mem::replace(&mut q1, q);
    }
    Ok(out)
}

/// The convergent with the largest `q ≤ T` (the later one when two share
/// `q = 1`); it satisfies `|α − p/q| ≤ 1/(Tq)`.
pub fn dirichlet_approx(alpha: &FixedReal, t: &BigInt) -> Result<Convergent> {
    if t < &BigInt::one() {
        return Err(Error::validation("Dirichlet bound T must be at least 1"));
    }
    let cf = expand_to_denominator(alpha, t);
    if cf.stop == CfStop::Exhausted {
        return Err(Error::precision(format!(
            "continued fraction of {alpha} not certified up to denominator {t}"
        )));
    }
    let convs = convergents(&cf.quotients, alpha)?;
    convs
        .into_iter()
        .last()
        .ok_or_else(|| Error::precision("no certified convergent"))
}

/// Finite-range evidence that `α` is κ-Diophantine.
#[derive(Clone, Debug, PartialEq)]
pub struct DiophantineEstimate {
    /// Least-squares slope of `−ln‖q_kα‖` against `ln q_k`, at least 1.
    pub kappa_hat: f64,
    /// Largest `c` with `‖q_kα‖ ≥ c / q_k^kappa_hat` over the certified range.
    pub c_hat: f64,
    pub q_max: u64,
    /// `(q_k, −ln‖q_kα‖ / ln q_k)` for every convergent with `2 ≤ q_k ≤ q_max`.
    pub per_convergent: Vec<(BigInt, f64)>,
}

impl DiophantineEstimate {
    /// `C = c_hat^{1/kappa_hat}`, the constant in `q ≥ C·T^{1/κ}` for the
    /// Dirichlet denominator at bound `T ≤ q_max`.
    pub fn dirichlet_constant(&self) -> f64 {
        self.c_hat.powf(1.0 / self.kappa_hat)
    }
}

/// Estimates κ from the convergents with `2 ≤ q_k ≤ q_max`; convergents are the
/// record minima of `‖qα‖`, so the certificate covers every `q ≤ q_max`.
pub fn estimate_kappa(alpha: &FixedReal, q_max: u64) -> Result<DiophantineEstimate> {
    if q_max < 2 {
        return Err(Error::validation("q_max must be at least 2"));
    }
    let cf = expand_to_denominator(alpha, &BigInt::from(q_max));
    match cf.stop {
        CfStop::Terminated => {
            return Err(Error::Rational(format!(
                "continued fraction of {alpha} terminates: {:?}",
                cf.quotients
            )))
        }
        CfStop::Exhausted => {
            return Err(Error::precision(format!(
                "continued fraction of {alpha} not certified up to q = {q_max}"
            )))
        }
        CfStop::Complete => {}
    }
    let convs = convergents(&cf.quotients, alpha)?;
    let two = BigInt::from(2);
    let mut samples = Vec::new();
    let mut per_convergent = Vec::new();
    for c in convs.iter().filter(|c| c.q >= two) {
        // the radius must be small against the distance for the logarithm to mean anything
        let dist_ulps = c.dist.mantissa().magnitude();
        if dist_ulps <= &(c.dist.err_ulps() << 2u32) {
            return Err(Error::precision(format!(
                "‖qα‖ not resolved at q = {}",
                c.q
            )));
        }
        let ln_q = c.q.to_f64().unwrap_or(f64::INFINITY).ln();
        let ln_d = c.dist.to_f64().ln();
        samples.push((ln_q, -ln_d));
        per_convergent.push((c.q.clone(), -ln_d / ln_q));
    }
    if samples.is_empty() {
        return Err(Error::precision(format!(
            "no convergent of {alpha} has 2 ≤ q ≤ {q_max}"
        )));
    }
    let kappa_hat = fit_slope(&samples).max(1.0);
    let c_min = samples
        .iter()
        .map(|&(ln_q, neg_ln_d)| (kappa_hat * ln_q - neg_ln_d).exp())
        .fold(f64::INFINITY, f64::min);
    Ok(DiophantineEstimate {
        kappa_hat,
        // deflated by a few ulps so every sample satisfies the inequality strictly
        c_hat: c_min * (1.0 - 1e-12),
        q_max,
        per_convergent,
    })
}

/// Least-squares slope through `(x, y)` points; a single point gives `y/x`.
fn fit_slope(points: &[(f64, f64)]) -> f64 {
    if points.len() == 1 {
        return points[0].1 / points[0].0;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        my / mx
    } else {
        sxy / sxx
    }
}

/// A direction `(a, c)` with `α̃ = αa² + βac + γc²` and its estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionChoice {
    pub a: i64,
    pub c: i64,
    pub alpha_tilde: FixedReal,
    pub estimate: DiophantineEstimate,
}

/// `αa² + βac + γc²`.
pub fn directional_alpha(xi: &ShiftVector, a: i64, c: i64) -> FixedReal {
    let (a, c) = (BigInt::from(a), BigInt::from(c));
    &(&xi.alpha().mul_int(&(&a * &a)) + &xi.beta().mul_int(&(&a * &c)))
        + &xi.gamma().mul_int(&(&c * &c))
}

/// Coprime `(a, c)` with `|a|, |c| ≤ bound`, first nonzero entry positive.
pub fn primitive_directions(bound: u64) -> Vec<(i64, i64)> {
    let b = bound as i64;
    let mut out = Vec::new();
    for a in 0..=b {
        let c_lo = if a == 0 { 1 } else { -b };
        for c in c_lo..=b {
            if a.gcd(&c) == 1 {
                out.push((a, c));
            }
        }
    }
    out
}

/// Among primitive directions with entries bounded by `bound`, the one whose
/// `α̃` has the smallest `kappa_hat` (ties: smaller `|a|+|c|`, then `(a, c)`).
pub fn diophantine_direction(xi: &ShiftVector, bound: u64, q_max: u64) -> Result<DirectionChoice> {
    if bound < 1 {
        return Err(Error::validation("direction bound must be at least 1"));
    }
    let results: Vec<Result<Option<DirectionChoice>>> = primitive_directions(bound)
        .into_par_iter()
        .map(|(a, c)| {
            let alpha_tilde = directional_alpha(xi, a, c);
            match estimate_kappa(&alpha_tilde, q_max) {
                Ok(estimate) => Ok(Some(DirectionChoice {
                    a,
                    c,
                    alpha_tilde,
                    estimate,
                })),
                Err(Error::Rational(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut best: Option<DirectionChoice> = None;
    for r in results {
        let Some(cand) = r? else { continue };
        let key = |d: &DirectionChoice| (d.estimate.kappa_hat, d.a.abs() + d.c.abs(), d.a, d.c);
        let better = match &best {
            None => true,
            Some(b) => {
                let (k1, s1, a1, c1) = key(&cand);
                let (k2, s2, a2, c2) = key(b);
                k1.total_cmp(&k2)
                    .then(s1.cmp(&s2))
                    .then(a1.cmp(&a2))
                    .then(c1.cmp(&c2))
                    .is_lt()
            }
        };
        if better {
            best = Some(cand);
        }
    }
    best.ok_or(Error::AllRational { bound })
}
