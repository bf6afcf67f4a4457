//! Integer solutions of `|Q_ξ(v) − t| ≤ Cδ`, `‖v‖ ≤ T`, built from the
//! unipotent orbit, and an exhaustive lattice oracle to check them against.
//!
//! With `ξ = (α, β, γ)` and a lift `η = (α, y, z)` of the target
//! (`y² − 4αz = t`), the orbit point `ξ·M_m = (α, φ(m))` is moved by an integer
//! `u_m = (0, a_m, b_m)` as close to `η` as possible. Because `M_m` preserves
//! `Q`, the vector `v_m = u_m·M_m⁻¹ = (0, a_m, b_m − m·a_m)` has
//! `Q_ξ(v_m) = Q(ξ·M_m + u_m)`, which is near `Q(η) = t` whenever the orbit
//! passes near `(y, z)`.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fixed::FixedReal;
use crate::forms::{standard_form, RationalForm, ShiftVector};
use crate::isometries::{apply, unipotent};
use crate::report::{real, Table};

/// Largest `T` the brute-force oracle accepts by default.
pub const BRUTE_FORCE_CAP: u64 = 300;

/// `η = (α, y, z)` with `y² − 4αz = t`.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetLift {
    alpha: FixedReal,
    y: FixedReal,
    z: FixedReal,
    t: FixedReal,
}

impl TargetLift {
    pub fn alpha(&self) -> &FixedReal {
        &self.alpha
    }

    pub fn y(&self) -> &FixedReal {
        &self.y
    }

    pub fn z(&self) -> &FixedReal {
        &self.z
    }

    pub fn t(&self) -> &FixedReal {
        &self.t
    }
}

/// The lift with `y = 0`, `z = −t/(4α)`; an exactly zero target lifts to
/// `z = 0` for any `α`.
pub fn target_lift(alpha: &FixedReal, t: &FixedReal) -> Result<TargetLift> {
    let bits = alpha.bits().max(t.bits());
    let y = FixedReal::zero(bits);
    let z = if t.exact().is_some_and(|r| r.is_zero()) {
        FixedReal::zero(bits)
    } else {
        if alpha.may_be_zero() {
            return Err(Error::AlphaZero);
        }
        t.neg_ref()
            .div_ref(&alpha.mul_int(&BigInt::from(4)))
            .map_err(|_| Error::AlphaZero)?
            .certify("target lift")?
    };
    let check = &(&y * &y) - &(&alpha.mul_int(&BigInt::from(4)) * &z);
    (&check - t).certify("target lift identity")?;
    Ok(TargetLift {
        alpha: alpha.clone(),
        y,
        z,
        t: t.clone(),
    })
}

/// `u = (0, a, b)` minimizing `‖ξ·M_m + u − η‖`, and that distance.
pub fn nearest_offset(
    xi: &ShiftVector,
    m: &BigInt,
    eta: &TargetLift,
) -> Result<([BigInt; 3], f64)> {
    let w = apply(xi, &unipotent(m.clone()))?;
    let ey = (w.beta() - &eta.y).certify("orbit offset")?;
    let ez = (w.gamma() - &eta.z).certify("orbit offset")?;
    let a = -ey.round_half_even();
    let b = -ez.round_half_even();
    let dy = (&ey + &FixedReal::from_int(a.clone(), ey.bits())).to_f64();
    let dz = (&ez + &FixedReal::from_int(b.clone(), ez.bits())).to_f64();
    Ok(([BigInt::zero(), a, b], dy.hypot(dz)))
}

/// One certified solution produced by the orbit construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub m: i64,
    pub u: [BigInt; 3],
    pub v: [BigInt; 3],
    pub value: f64,
    pub residual: f64,
    pub torus_miss: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    /// Distinct `v`, in increasing `m`.
    pub solutions: Vec<Solution>,
    pub t_bound: u64,
    pub delta: f64,
    pub scan_c: f64,
    pub bound_c: f64,
    /// Number of orbit steps scanned, `⌊scan_c·√T⌋`.
    pub scanned: u64,
    pub count: usize,
}

fn int_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

impl SolveReport {
    pub const COLUMNS: [&'static str; 9] = [
        "m",
        "a",
        "b",
        "v1",
        "v2",
        "v3",
        "value",
        "residual",
        "torus_miss",
    ];

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&Self::COLUMNS);
        for s in &self.solutions {
            t.push(vec![
                s.m.to_string(),
                s.u[1].to_string(),
                s.u[2].to_string(),
                s.v[0].to_string(),
                s.v[1].to_string(),
                s.v[2].to_string(),
                real(s.value),
                real(s.residual),
                real(s.torus_miss),
            ]);
        }
        t
    }

    pub fn to_json(&self) -> Value {
        let sols: Vec<Value> = self
            .solutions
            .iter()
            .map(|s| {
                json!({
                    "m": s.m,
                    "u": s.u.iter().map(int_json).collect::<Vec<_>>(),
                    "v": s.v.iter().map(int_json).collect::<Vec<_>>(),
                    "value": s.value,
                    "residual": s.residual,
                    "torus_miss": s.torus_miss,
                })
            })
            .collect();
        json!({
            "T": self.t_bound,
            "delta": self.delta,
            "scan_c": self.scan_c,
            "bound_C": self.bound_c,
            "scanned": self.scanned,
            "count": self.count,
            "solutions": sols,
        })
    }
}

fn scan_limit(scan_c: f64, t: u64) -> u64 {
    (scan_c * (t as f64).sqrt()).floor() as u64
}

fn norm_sqr(v: &[BigInt; 3]) -> BigInt {
    v.iter().map(|x| x * x).sum()
}

/// `|Q_ξ(v) − t|` and `Q_ξ(v)`, certified.
fn residual(
    form: &RationalForm,
    xi: &ShiftVector,
    t: &FixedReal,
    v: &[BigInt; 3],
) -> Result<(FixedReal, FixedReal)> {
    let value = form.evaluate_shifted(xi, v)?;
    let r = (&value - t).abs().certify("residual")?;
    Ok((r, value))
}

/// `v = u·M_m⁻¹`, checked against the closed form `(0, a, b − m·a)`.
fn pull_back(m: i64, u: &[BigInt; 3]) -> Result<[BigInt; 3]> {
    let v = unipotent(BigInt::from(-m)).act(u);
    let closed = [BigInt::zero(), u[1].clone(), &u[2] - &u[1] * m];
    if v != closed {
        return Err(Error::Soundness(format!(
            "u·M_-m = {v:?} differs from {closed:?} at m = {m}"
        )));
    }
    Ok(v)
}

fn validate_scan(t: u64, delta: f64, scan_c: f64) -> Result<()> {
    if t < 4 {
        return Err(Error::validation(format!("T = {t} must be at least 4")));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::validation(format!(
            "delta = {delta} is outside (0, 1/2)"
        )));
    }
    if !(scan_c > 0.0 && scan_c.is_finite()) {
        return Err(Error::validation("scan_c must be positive"));
    }
    Ok(())
}

/// Scans `1 ≤ m ≤ scan_c·√T`, keeps `m` whose orbit point is within
/// `scan_c·δ` of the lift, and reports the resulting `v_m` that satisfy
/// `‖v_m‖ ≤ T` and `|Q_ξ(v_m) − t| ≤ bound_c·δ`, deduplicated.
///
/// `ξ` should already be in a Diophantine direction: its first coordinate is
/// the `α` driving the orbit.
pub fn find_solutions(
    xi: &ShiftVector,
    t: &FixedReal,
    bound: u64,
    delta: f64,
    scan_c: f64,
    bound_c: f64,
) -> Result<SolveReport> {
    validate_scan(bound, delta, scan_c)?;
    if !(bound_c >= 1.0 && bound_c.is_finite()) {
        return Err(Error::validation("bound_C must be at least 1"));
    }
    let eta = target_lift(xi.alpha(), t)?;
    let scanned = scan_limit(scan_c, bound);
    let form = standard_form();
    let limit = FixedReal::from_f64(bound_c * delta, xi.bits())?;
    let bound2 = BigInt::from(bound) * BigInt::from(bound);

    let found: Vec<Result<Option<Solution>>> = (1..=scanned as i64)
        .into_par_iter()
        .map(|m| {
            let (u, miss) = nearest_offset(xi, &BigInt::from(m), &eta)?;
            if miss > scan_c * delta {
                return Ok(None);
            }
            let v = pull_back(m, &u)?;
            if norm_sqr(&v) > bound2 {
                return Ok(None);
            }
            let (r, value) = residual(&form, xi, t, &v)?;
            if r.cmp_center(&limit) == Ordering::Greater {
                return Ok(None);
            }
            Ok(Some(Solution {
                m,
                u,
                v,
                value: value.to_f64(),
                residual: r.to_f64(),
                torus_miss: miss,
            }))
        })
        .collect();

    let mut seen = HashSet::new();
    let mut solutions = Vec::new();
    for s in found {
        if let Some(s) = s? {
            if seen.insert(s.v.clone()) {
                solutions.push(s);
            }
        }
    }
    Ok(SolveReport {
        count: solutions.len(),
        solutions,
        t_bound: bound,
        delta,
        scan_c,
        bound_c,
        scanned,
    })
}

/// Re-derives `sol` from `ξ` and `t` (normally given at a higher precision
/// than the run that produced it) and fails with [`Error::Soundness`] on any
/// disagreement.
pub fn verify_solution(
    xi: &ShiftVector,
    t: &FixedReal,
    report: &SolveReport,
    sol: &Solution,
) -> Result<()> {
    let fail = |what: &str| {
        Err(Error::Soundness(format!(
            "solution at m = {}: {what}",
            sol.m
        )))
    };
    if !sol.v[0].is_zero() || !sol.u[0].is_zero() {
        return fail("first coordinate is not zero");
    }
    if pull_back(sol.m, &sol.u)? != sol.v {
        return fail("v is not u·M_m⁻¹");
    }
    if norm_sqr(&sol.v) > BigInt::from(report.t_bound) * BigInt::from(report.t_bound) {
        return fail("‖v‖ exceeds T");
    }
    let (r, value) = residual(&standard_form(), xi, t, &sol.v)?;
    let limit = FixedReal::from_f64(report.bound_c * report.delta, xi.bits())?;
    if r.cmp_center(&limit) == Ordering::Greater {
        return fail("residual exceeds bound_C·δ");
    }
    let tol = 1e-9 * value.to_f64().abs().max(1.0);
    if (value.to_f64() - sol.value).abs() > tol || (r.to_f64() - sol.residual).abs() > tol {
        return fail("value disagrees with the recomputation");
    }
    Ok(())
}

/// Result of the exhaustive scan over `‖v‖ ≤ T`.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub count: u64,
    pub min_residual: FixedReal,
    /// Lexicographically least minimizer.
    pub argmin: [i64; 3],
    /// All `v` with `|Q_ξ(v) − t| ≤ δ` in lexicographic order, when requested.
    pub hits: Option<Vec<[i64; 3]>>,
}

fn isqrt(n: i64) -> i64 {
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn big3(v: &[i64; 3]) -> [BigInt; 3] {
    v.map(BigInt::from)
}

#[derive(Default)]
struct Slab {
    sure: u64,
    border: Vec<[i64; 3]>,
    hits: Vec<([i64; 3], bool)>,
    best: f64,
    near: Vec<([i64; 3], f64)>,
}

/// [`count_values_bruteforce_capped`] with the default cap.
pub fn count_values_bruteforce(
    form: &RationalForm,
    xi: &ShiftVector,
    t: &FixedReal,
    bound: u64,
    delta: f64,
    collect_hits: bool,
) -> Result<OracleResult> {
    count_values_bruteforce_capped(form, xi, t, bound, delta, collect_hits, BRUTE_FORCE_CAP)
}

/// Counts `v ∈ ℤ³` with `‖v‖ ≤ T` and `|Q_ξ(v) − t| ≤ δ` and finds the
/// smallest residual.
///
/// Points are screened in `f64`; any point whose screened residual is within
/// a rounding margin of `δ` or of the running minimum is re-evaluated in
/// certified fixed point, so the answer does not depend on float rounding.
pub fn count_values_bruteforce_capped(
    form: &RationalForm,
    xi: &ShiftVector,
    t: &FixedReal,
    bound: u64,
    delta: f64,
    collect_hits: bool,
    cap: u64,
) -> Result<OracleResult> {
    if bound > cap {
        return Err(Error::CapExceeded {
            requested: bound,
            cap,
        });
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::validation(format!(
            "delta = {delta} must be finite and non-negative"
        )));
    }
    let g = form
        .gram()
        .clone()
        .map(|row| row.map(|x| x.to_f64().unwrap_or(f64::NAN)));
    let x = xi.components().clone().map(|c| c.to_f64());
    let tf = t.to_f64();
    let tb = bound as i64;
    let gmax = g.iter().flatten().fold(0f64, |a, b| a.max(b.abs()));
    let s = tb as f64 + x.iter().fold(0f64, |a, b| a.max(b.abs()));
    let margin = 1e-13 * (9.0 * gmax * s * s + tf.abs()).max(1.0);

    let slabs: Vec<Slab> = (-tb..=tb)
        .into_par_iter()
        .map(|v1| {
            let mut sl = Slab {
                best: f64::INFINITY,
                ..Slab::default()
            };
            let y1 = v1 as f64 + x[0];
            let r2 = tb * tb - v1 * v1;
            let r = isqrt(r2);
            for v2 in -r..=r {
                let y2 = v2 as f64 + x[1];
                let base = g[0][0] * y1 * y1 + g[1][1] * y2 * y2 + 2.0 * g[0][1] * y1 * y2 - tf;
                let lin = 2.0 * (g[0][2] * y1 + g[1][2] * y2);
                let r3 = isqrt(r2 - v2 * v2);
                for v3 in -r3..=r3 {
                    let y3 = v3 as f64 + x[2];
                    let res = (base + (lin + g[2][2] * y3) * y3).abs();
                    let v = [v1, v2, v3];
                    if res <= delta + margin {
                        let sure = res < delta - margin;
                        if sure {
                            sl.sure += 1;
                        } else {
                            sl.border.push(v);
                        }
                        if collect_hits {
                            sl.hits.push((v, sure));
                        }
                    }
                    if res <= sl.best + 2.0 * margin {
                        if res < sl.best {
                            sl.best = res;
                            let cut = res + 2.0 * margin;
                            sl.near.retain(|p| p.1 <= cut);
                        }
                        sl.near.push((v, res));
                    }
                }
            }
            sl
        })
        .collect();

    let delta_fx = FixedReal::from_f64(delta, xi.bits())?;
    let exact_residual = |v: &[i64; 3]| residual(form, xi, t, &big3(v)).map(|p| p.0);
    let border: Vec<[i64; 3]> = slabs
        .iter()
        .flat_map(|s| s.border.iter().copied())
        .collect();
    let decided: Vec<Result<bool>> = border
        .par_iter()
        .map(|v| Ok(exact_residual(v)?.cmp_center(&delta_fx) != Ordering::Greater))
        .collect();
    let mut border_hits = HashSet::new();
    for (v, d) in border.iter().zip(decided) {
        if d? {
            border_hits.insert(*v);
        }
    }
    let count = slabs.iter().map(|s| s.sure).sum::<u64>() + border_hits.len() as u64;

    let best = slabs.iter().fold(f64::INFINITY, |a, s| a.min(s.best));
    let cut = best + 2.0 * margin;
    let near: Vec<[i64; 3]> = slabs
        .iter()
        .flat_map(|s| s.near.iter().filter(|p| p.1 <= cut).map(|p| p.0))
        .collect();
    let evaluated: Vec<Result<FixedReal>> = near.par_iter().map(exact_residual).collect();
    let mut arg: Option<([i64; 3], FixedReal)> = None;
    for (v, r) in near.into_iter().zip(evaluated) {
        let r = r?;
        // candidates arrive in lexicographic order, so only a strict improvement moves the argmin
        if arg
            .as_ref()
            .is_none_or(|(_, b)| r.cmp_center(b) == Ordering::Less)
        {
            arg = Some((v, r));
        }
    }
    let (argmin, min_residual) = arg.expect("the origin is always in the ball");

    let hits = collect_hits.then(|| {
        slabs
            .into_iter()
            .flat_map(|s| s.hits)
            .filter(|(v, sure)| *sure || border_hits.contains(v))
            .map(|p| p.0)
            .collect()
    });
    Ok(OracleResult {
        count,
        min_residual,
        argmin,
        hits,
    })
}

/// How `estimate_critical_exponent` finds small residuals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExponentMode {
    /// Exhaustive scan of the ball (subject to the oracle cap).
    Oracle,
    /// The orbit construction with no miss threshold: the best `v_m` over
    /// `1 ≤ m ≤ scan_c·√T` with `‖v_m‖ ≤ T`.
    Solver { scan_c: f64 },
}

/// `ω̂ = −ln(r)/ln T`, or a marker when the residual is zero at working
/// precision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Omega {
    Finite(f64),
    Saturated,
}

impl Omega {
    pub fn value(&self) -> Option<f64> {
        match self {
            Omega::Finite(x) => Some(*x),
            Omega::Saturated => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExponentRow {
    pub t_bound: u64,
    pub min_residual: f64,
    pub omega_hat: Omega,
}

fn omega(r: &FixedReal, t: u64) -> Omega {
    if r.is_zero_center() {
        Omega::Saturated
    } else {
        Omega::Finite(-r.to_f64().ln() / (t as f64).ln())
    }
}

/// Smallest residual over the orbit solutions with `‖v_m‖ ≤ T`, if any.
fn solver_min_residual(
    xi: &ShiftVector,
    t: &FixedReal,
    bound: u64,
    scan_c: f64,
) -> Result<Option<FixedReal>> {
    let eta = target_lift(xi.alpha(), t)?;
    let form = standard_form();
    let bound2 = BigInt::from(bound) * BigInt::from(bound);
    let rs: Vec<Result<Option<FixedReal>>> = (1..=scan_limit(scan_c, bound) as i64)
        .into_par_iter()
        .map(|m| {
            let (u, _) = nearest_offset(xi, &BigInt::from(m), &eta)?;
            let v = pull_back(m, &u)?;
            if norm_sqr(&v) > bound2 {
                return Ok(None);
            }
            Ok(Some(residual(&form, xi, t, &v)?.0))
        })
        .collect();
    let mut best: Option<FixedReal> = None;
    for r in rs {
        if let Some(r) = r? {
            if best
                .as_ref()
                .is_none_or(|b| r.cmp_center(b) == Ordering::Less)
            {
                best = Some(r);
            }
        }
    }
    Ok(best)
}

/// `ω̂(T) = −ln(min residual)/ln T` along a strictly increasing grid.
pub fn estimate_critical_exponent(
    xi: &ShiftVector,
    t: &FixedReal,
    grid: &[u64],
    mode: ExponentMode,
) -> Result<Vec<ExponentRow>> {
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::validation(
            "the T grid must be non-empty and strictly increasing",
        ));
    }
    if grid[0] < 2 {
        return Err(Error::validation("grid values must be at least 2"));
    }
    if let ExponentMode::Solver { scan_c } = mode {
        if !(scan_c > 0.0 && scan_c.is_finite()) {
            return Err(Error::validation("scan_c must be positive"));
        }
    }
    let form = standard_form();
    grid.iter()
        .map(|&tb| {
            let r = match mode {
                ExponentMode::Oracle => {
                    Some(count_values_bruteforce(&form, xi, t, tb, 0.0, false)?.min_residual)
                }
                ExponentMode::Solver { scan_c } => solver_min_residual(xi, t, tb, scan_c)?,
            };
            Ok(match r {
                Some(r) => ExponentRow {
                    t_bound: tb,
                    min_residual: r.to_f64(),
                    omega_hat: omega(&r, tb),
                },
                None => ExponentRow {
                    t_bound: tb,
                    min_residual: f64::INFINITY,
                    omega_hat: Omega::Finite(f64::NEG_INFINITY),
                },
            })
        })
        .collect()
}

impl ExponentRow {
    pub fn is_saturated(&self) -> bool {
        self.omega_hat == Omega::Saturated
    }
}
