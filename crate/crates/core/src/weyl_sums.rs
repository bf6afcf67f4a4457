//! The torus map `φ(m) = (2αm + β, αm² + βm + γ) mod 1`, hit counts of its
//! orbit near a target point, quadratic Weyl sums, and the two bounds that
//! control them.
//!
//! Long scans step the polynomial phases with wrapping fixed-width additions
//! on the mantissas, so every step is exact with respect to the closed form
//! evaluated on the centers. Scans are cut into blocks of [`RESYNC`] steps and
//! each block starts from the closed form, which also fixes the partition used
//! for parallel evaluation: results do not depend on the thread count.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::circle::{limbs_for, Angle};
use crate::diophantine::dirichlet_approx;
use crate::error::{Error, Result};
use crate::fixed::{scaled_to_f64, FixedReal, TOLERANCE_LOG2};
use crate::forms::ShiftVector;
use crate::scalar::Real;

/// Block length of incremental scans; each block restarts from the closed form.
pub const RESYNC: u64 = 1 << 16;

/// A point of `𝕋² = ℝ²/ℤ²` with both coordinates in `[0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoint2 {
    x: FixedReal,
    y: FixedReal,
}

impl TorusPoint2 {
    /// Reduces both coordinates modulo one.
    pub fn new(x: FixedReal, y: FixedReal) -> Result<Self> {
        let bits = x.bits().max(y.bits());
        Ok(TorusPoint2 {
            x: x.with_bits(bits).frac().certify("torus coordinate")?,
            y: y.with_bits(bits).frac().certify("torus coordinate")?,
        })
    }

    pub fn origin(bits: u32) -> Self {
        TorusPoint2 {
            x: FixedReal::zero(bits),
            y: FixedReal::zero(bits),
        }
    }

    pub fn x(&self) -> &FixedReal {
        &self.x
    }

    pub fn y(&self) -> &FixedReal {
        &self.y
    }

    pub fn bits(&self) -> u32 {
        self.x.bits()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

/// `φ(m)` from the closed form, refusing once `m²·err(α) + m·err(β) + err(γ)`
/// passes the output tolerance.
pub fn phi(xi: &ShiftVector, m: &BigInt) -> Result<TorusPoint2> {
    let [a, b, c] = xi.components();
    let x = &a.mul_int(&(m * 2)) + b;
    let y = &(&a.mul_int(&(m * m)) + &b.mul_int(m)) + c;
    let x = x.frac().certify("phi")?;
    let y = y.frac().certify("phi")?;
    Ok(TorusPoint2 { x, y })
}

/// Euclidean distance on `𝕋²`, `sqrt(d_x² + d_y²)` with `d = ‖Δ‖_𝕋` per coordinate.
pub fn torus_dist(u: &TorusPoint2, v: &TorusPoint2) -> f64 {
    let dx = u.x.sub_ref(&v.x).circle_norm().to_f64();
    let dy = u.y.sub_ref(&v.y).circle_norm().to_f64();
    dx.hypot(dy)
}

/// Fails unless `Σ coef·err(x)` is within the output tolerance. All values
/// must share one precision.
fn guard(terms: &[(BigUint, &FixedReal)], what: &str) -> Result<()> {
    let bits = terms.iter().map(|t| t.1.bits()).max().unwrap_or(0);
    let total: BigUint = terms.iter().map(|(k, x)| k * x.err_ulps()).sum();
    let shift = i64::from(bits) + i64::from(TOLERANCE_LOG2);
    let ok = if shift < 0 {
        total.is_zero()
    } else {
        total <= BigUint::one() << (shift as u64)
    };
    if ok {
        Ok(())
    } else {
        Err(Error::precision(format!(
            "{what}: accumulated error {:.3e} exceeds 2^{TOLERANCE_LOG2} at {bits} fractional bits",
            scaled_to_f64(&BigInt::from(total), bits)
        )))
    }
}

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

/// Mantissas of a quadratic `a·m² + b·m + c`, widened to whole limbs.
struct Quadratic {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    limbs: usize,
}

impl Quadratic {
    fn new(a: &FixedReal, b: &FixedReal, c: &FixedReal) -> Self {
        let bits = a.bits().max(b.bits()).max(c.bits());
        let limbs = limbs_for(bits);
        let shift = 64 * limbs as u32 - bits;
        let wide = |x: &FixedReal| x.with_bits(bits).mantissa() << shift;
        Quadratic {
            a: wide(a),
            b: wide(b),
            c: wide(c),
            limbs,
        }
    }

    fn angle(&self, v: &BigInt) -> Angle {
        Angle::from_scaled(v, self.limbs)
    }

    /// State at `m`: `x = 2am + b` (the forward difference minus `a`) and
    /// `y = am² + bm + c`.
    fn at(&self, m: u64) -> Stepper {
        let m = BigInt::from(m);
        Stepper {
            x: self.angle(&(&self.a * &m * 2 + &self.b)),
            y: self.angle(&(&self.a * &m * &m + &self.b * &m + &self.c)),
            a: self.angle(&self.a),
            two_a: self.angle(&(&self.a * 2)),
        }
    }
}

struct Stepper {
    x: Angle,
    y: Angle,
    a: Angle,
    two_a: Angle,
}

impl Stepper {
    /// `y(m+1) = y(m) + x(m) + a`, `x(m+1) = x(m) + 2a`.
    #[inline]
    fn advance(&mut self) {
        self.y.add_assign(&self.x);
        self.y.add_assign(&self.a);
        self.x.add_assign(&self.two_a);
    }
}

/// Runs `f` on the blocks `[lo, hi]` partitioning `first..=last`, in order.
fn blocks<R: Send>(first: u64, last: u64, f: impl Fn(u64, u64) -> R + Sync) -> Vec<R> {
    if last < first {
        return Vec::new();
    }
    let n = (last - first) / RESYNC + 1;
    (0..n)
        .into_par_iter()
        .map(|k| {
            let lo = first + k * RESYNC;
            f(lo, (lo + RESYNC - 1).min(last))
        })
        .collect()
}

/// Compensated (Neumaier) summation.
#[derive(Clone, Copy, Debug)]
struct Neumaier<F> {
    sum: F,
    comp: F,
}

impl<F: Real> Neumaier<F> {
    fn new() -> Self {
        Neumaier {
            sum: F::zero(),
            comp: F::zero(),
        }
    }

    #[inline]
    fn add(&mut self, x: F) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.add(other.comp);
    }

    fn value(&self) -> F {
        self.sum + self.comp
    }
}

/// Result of [`count_orbit_hits`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitCount {
    pub count: u64,
    /// The hitting `m` in increasing order, when requested.
    pub hits: Option<Vec<u64>>,
}

/// `N_φ(T, δ) = #{1 ≤ m ≤ T : ‖φ(m) − v0‖ ≤ δ}`; the condition is closed.
///
/// Distances are screened in floating point; those within `1e-12` of `δ²`
/// are decided exactly on the fixed-point values.
pub fn count_orbit_hits(
    xi: &ShiftVector,
    v0: &TorusPoint2,
    t: u64,
    delta: f64,
    collect_hits: bool,
) -> Result<OrbitCount> {
    if t < 1 {
        return Err(Error::validation("T must be at least 1"));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::validation(format!(
            "delta = {delta} is outside (0, 1/2)"
        )));
    }
    let bits = xi.bits().max(v0.bits());
    let xi = xi.with_bits(bits);
    let (vx, vy) = (v0.x.with_bits(bits), v0.y.with_bits(bits));
    let [a, b, c] = xi.components();
    guard(&[(big(2 * t), a), (big(1), b), (big(1), &vx)], "orbit scan")?;
    guard(
        &[
            (big(t) * big(t), a),
            (big(t), b),
            (big(1), c),
            (big(1), &vy),
        ],
        "orbit scan",
    )?;

    let quad = Quadratic::new(a, b, c);
    let width = 64 * quad.limbs;
    let target_x = Angle::from_scaled(&(vx.mantissa() << (width - bits as usize)), quad.limbs);
    let target_y = Angle::from_scaled(&(vy.mantissa() << (width - bits as usize)), quad.limbs);
    let d = BigRational::from_float(delta).expect("finite delta");
    // ‖·‖² ≤ δ² ⇔ (nx² + ny²)·den² ≤ num²·2^(2W) on the scaled norms
    let rhs: BigUint = (d.numer().magnitude() * d.numer().magnitude()) << (2 * width);
    let den2: BigUint = d.denom().magnitude() * d.denom().magnitude();
    let delta2 = delta * delta;

    let parts = blocks(1, t, |lo, hi| {
        let mut st = quad.at(lo);
        let mut count = 0u64;
        let mut hits = Vec::new();
        for m in lo..=hi {
            let ex = st.x.sub(&target_x);
            let ey = st.y.sub(&target_y);
            let (dx, dy) = (ex.to_signed_f64(), ey.to_signed_f64());
            let d2 = dx * dx + dy * dy;
            let hit = if (d2 - delta2).abs() > 1e-12 {
                d2 < delta2
            } else {
                let (nx, ny) = (ex.norm_scaled(), ey.norm_scaled());
                (&nx * &nx + &ny * &ny) * &den2 <= rhs
            };
            if hit {
                count += 1;
                if collect_hits {
                    hits.push(m);
                }
            }
            st.advance();
        }
        (count, hits)
    });
    let count = parts.iter().map(|p| p.0).sum();
    let hits = collect_hits.then(|| parts.into_iter().flat_map(|p| p.1).collect());
    Ok(OrbitCount { count, hits })
}

/// `S_T(n, α, β) = Σ_{m=1}^T e(nαm² + βm)` with its parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeylSumResult<F> {
    pub re: F,
    pub im: F,
    pub t: u64,
    pub n: i64,
}

impl<F: Real> WeylSumResult<F> {
    pub fn norm_sqr(&self) -> F {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(&self) -> F {
        self.re.hypot(self.im)
    }
}

/// Direct evaluation of `S_T(n, α, β)`. Phases are reduced modulo one in fixed
/// point and only the representative in `[−1/2, 1/2)` reaches `cos`/`sin`.
pub fn weyl_sum<F: Real>(
    n: i64,
    alpha: &FixedReal,
    beta: &FixedReal,
    t: u64,
) -> Result<WeylSumResult<F>> {
    if t < 1 {
        return Err(Error::validation("T must be at least 1"));
    }
    let bits = alpha.bits().max(beta.bits());
    let na = alpha.with_bits(bits).mul_int(&BigInt::from(n));
    let b = beta.with_bits(bits);
    guard(&[(big(t) * big(t), &na), (big(t), &b)], "Weyl sum phase")?;

    let quad = Quadratic::new(&na, &b, &FixedReal::zero(bits));
    let tau = F::PI() + F::PI();
    let parts = blocks(1, t, |lo, hi| {
        let mut st = quad.at(lo);
        let (mut re, mut im) = (Neumaier::<F>::new(), Neumaier::<F>::new());
        for _ in lo..=hi {
            let theta = F::from_f64(st.y.to_signed_f64()).expect("float conversion");
            let (s, c) = (tau * theta).sin_cos();
            re.add(c);
            im.add(s);
            st.advance();
        }
        (re, im)
    });
    let (mut re, mut im) = (Neumaier::<F>::new(), Neumaier::<F>::new());
    for (r, i) in &parts {
        re.merge(r);
        im.merge(i);
    }
    Ok(WeylSumResult {
        re: re.value(),
        im: im.value(),
        t,
        n,
    })
}

/// `Σ_{m=1}^{count} min(1/‖m·step‖, cap)`.
fn capped_reciprocal_sum(step: &FixedReal, count: u64, cap: f64, what: &str) -> Result<f64> {
    guard(&[(big(count), step)], what)?;
    let zero = FixedReal::zero(step.bits());
    let quad = Quadratic::new(&zero, step, &zero);
    let parts = blocks(1, count, |lo, hi| {
        let mut st = quad.at(lo);
        let mut acc = Neumaier::<f64>::new();
        for _ in lo..=hi {
            let norm = st.y.norm_f64();
            acc.add(if norm * cap <= 1.0 { cap } else { 1.0 / norm });
            st.advance();
        }
        acc
    });
    let mut acc = Neumaier::<f64>::new();
    for p in &parts {
        acc.merge(p);
    }
    Ok(acc.value())
}

/// `T + 2·Σ_{m=1}^T min(1/‖2nmα‖, T)`, an upper bound for `|S_T(n, α, β)|²`
/// whatever `β` is.
pub fn weyl_differencing_bound(n: i64, alpha: &FixedReal, t: u64) -> Result<f64> {
    if t < 1 {
        return Err(Error::validation("T must be at least 1"));
    }
    let step = alpha.mul_int(&BigInt::from(2 * n));
    let tf = t as f64;
    Ok(tf + 2.0 * capped_reciprocal_sum(&step, t, tf, "differencing bound")?)
}

/// `Σ_{m=1}^{MT} min(1/‖mα‖, T)`.
pub fn sum_min(alpha: &FixedReal, m: u64, t: u64) -> Result<f64> {
    let count = m
        .checked_mul(t)
        .ok_or_else(|| Error::validation("M·T overflows"))?;
    capped_reciprocal_sum(alpha, count, t as f64, "sum of capped reciprocals")
}

/// `4MT²/q + 8(M+1)·T·ln T` with `q` the Dirichlet denominator of `α` at `T`.
pub fn sum_min_explicit_bound(alpha: &FixedReal, m: u64, t: u64) -> Result<f64> {
    if t < 2 {
        return Err(Error::validation("T must be at least 2"));
    }
    let q = dirichlet_approx(alpha, &BigInt::from(t))?.q;
    let q = num_traits::ToPrimitive::to_f64(&q).unwrap_or(f64::INFINITY);
    let (mf, tf) = (m as f64, t as f64);
    Ok(4.0 * mf * tf * tf / q + 8.0 * (mf + 1.0) * tf * tf.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isometries::{apply, unipotent};
    use proptest::prelude::*;

    const BITS: u32 = 256;

    fn rat(p: i64, q: i64) -> FixedReal {
        FixedReal::from_ratio(p, q, BITS).unwrap()
    }

    fn sqrt2() -> FixedReal {
        FixedReal::sqrt_of(2, BITS).unwrap()
    }

    fn golden() -> FixedReal {
        FixedReal::from_surd(1, 1, 2, 5, BITS).unwrap()
    }

    fn xi(a: FixedReal, b: FixedReal, c: FixedReal) -> ShiftVector {
        ShiftVector::new(a, b, c)
    }

    fn point(x: f64, y: f64) -> TorusPoint2 {
        TorusPoint2::new(
            FixedReal::from_f64(x, BITS).unwrap(),
            FixedReal::from_f64(y, BITS).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn phi_examples() {
        let p = phi(&xi(rat(1, 4), rat(0, 1), rat(0, 1)), &BigInt::from(2)).unwrap();
        assert!(p.x().is_zero_center() && p.y().is_zero_center());

        let p = phi(&xi(sqrt2(), rat(7, 3), rat(-5, 4)), &BigInt::zero()).unwrap();
        assert_eq!(p.x().exact(), None);
        assert!((p.x().to_f64() - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.y().to_f64() - 0.75).abs() < 1e-15);

        let p = phi(&xi(sqrt2(), rat(0, 1), rat(0, 1)), &BigInt::one()).unwrap();
        let (x, y) = p.to_f64();
        assert!((x - (2.0 * 2f64.sqrt() - 2.0)).abs() < 1e-15);
        assert!((y - (2f64.sqrt() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn phi_precision_guard() {
        let m = BigInt::from(1_000_000);
        let low = ShiftVector::new(
            FixedReal::sqrt_of(2, 64).unwrap(),
            FixedReal::zero(64),
            FixedReal::zero(64),
        );
        assert!(matches!(phi(&low, &m), Err(Error::PrecisionExhausted(_))));
        let hi = xi(sqrt2(), rat(0, 1), rat(0, 1));
        let p = phi(&hi, &m).unwrap();
        assert!(p.y().err_bound() < 1e-60);
    }

    #[test]
    fn phi_matches_unipotent_action() {
        let s = xi(sqrt2(), FixedReal::sqrt_of(3, BITS).unwrap(), rat(1, 2));
        for m in [-7i64, 0, 1, 2, 13, 1000, 123_457] {
            let w = apply(&s, &unipotent(BigInt::from(m))).unwrap();
            let p = phi(&s, &BigInt::from(m)).unwrap();
            assert_eq!(w.alpha(), s.alpha());
            let dx = w.beta().sub_ref(p.x()).circle_norm();
            let dy = w.gamma().sub_ref(p.y()).circle_norm();
            assert!(dx.to_f64() < 1e-40 && dy.to_f64() < 1e-40, "m = {m}");
        }
    }

    #[test]
    fn torus_dist_examples() {
        let u = point(0.9, 0.0);
        assert_eq!(torus_dist(&u, &u), 0.0);
        assert!((torus_dist(&u, &point(0.1, 0.0)) - 0.2).abs() < 1e-15);
        let d = torus_dist(&point(0.9, 0.9), &point(0.1, 0.1));
        assert!((d - 0.08f64.sqrt()).abs() < 1e-15);
        assert_eq!(torus_dist(&point(0.5, 0.0), &point(0.0, 0.0)), 0.5);
    }

    #[test]
    fn stepper_matches_closed_form_across_blocks() {
        let q = Quadratic::new(&sqrt2(), &golden(), &rat(1, 3));
        let mut st = q.at(1);
        for _ in 1..RESYNC + 10 {
            st.advance();
        }
        let fresh = q.at(RESYNC + 10);
        assert_eq!(st.x, fresh.x);
        assert_eq!(st.y, fresh.y);
    }

    #[test]
    fn count_orbit_trivial_cases() {
        let zero = ShiftVector::zero(BITS);
        let c = count_orbit_hits(&zero, &TorusPoint2::origin(BITS), 500, 0.1, false).unwrap();
        assert_eq!(c.count, 500);
        let c = count_orbit_hits(&zero, &point(0.5, 0.5), 500, 0.1, false).unwrap();
        assert_eq!(c.count, 0);
        assert!(count_orbit_hits(&zero, &point(0.5, 0.5), 500, 0.0, false).is_err());
        assert!(count_orbit_hits(&zero, &point(0.5, 0.5), 500, 0.5, false).is_err());
    }

    #[test]
    fn boundary_is_closed() {
        let zero = ShiftVector::zero(BITS);
        let v0 = point(0.25, 0.0);
        assert_eq!(
            count_orbit_hits(&zero, &v0, 10, 0.25, false).unwrap().count,
            10
        );
        let below = 0.25 - 2f64.powi(-40);
        assert_eq!(
            count_orbit_hits(&zero, &v0, 10, below, false)
                .unwrap()
                .count,
            0
        );
    }

    /// Independent scan: closed-form `φ(m)` and [`torus_dist`] for each `m`.
    fn direct_count(s: &ShiftVector, v0: &TorusPoint2, t: u64, delta: f64) -> Vec<u64> {
        (1..=t)
            .filter(|&m| torus_dist(&phi(s, &BigInt::from(m)).unwrap(), v0) <= delta)
            .collect()
    }

    #[test]
    fn count_orbit_matches_direct_scan() {
        let s = xi(sqrt2(), rat(0, 1), rat(0, 1));
        let v0 = TorusPoint2::origin(BITS);
        let c = count_orbit_hits(&s, &v0, 1000, 0.05, true).unwrap();
        assert!((1..=30).contains(&c.count), "count {}", c.count);
        assert_eq!(c.hits.unwrap(), direct_count(&s, &v0, 1000, 0.05));

        let s = xi(golden(), FixedReal::sqrt_of(3, BITS).unwrap(), rat(1, 7));
        let v0 = TorusPoint2::new(rat(3, 10), rat(7, 10)).unwrap();
        let c = count_orbit_hits(&s, &v0, 2000, 0.1, true).unwrap();
        assert_eq!(c.count as usize, c.hits.as_ref().unwrap().len());
        assert_eq!(c.hits.unwrap(), direct_count(&s, &v0, 2000, 0.1));
    }

    #[test]
    fn count_orbit_precision_guard() {
        let s = ShiftVector::new(
            FixedReal::sqrt_of(2, 64).unwrap(),
            FixedReal::zero(64),
            FixedReal::zero(64),
        );
        let r = count_orbit_hits(&s, &TorusPoint2::origin(64), 1_000_000, 0.1, false);
        assert!(matches!(r, Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn weyl_sum_trivial_cases() {
        let s = weyl_sum::<f64>(7, &rat(0, 1), &rat(0, 1), 1000).unwrap();
        assert_eq!((s.re, s.im), (1000.0, 0.0));
        let s = weyl_sum::<f64>(0, &sqrt2(), &rat(0, 1), 321).unwrap();
        assert_eq!((s.re, s.im), (321.0, 0.0));
        let s = weyl_sum::<f64>(0, &sqrt2(), &rat(1, 2), 2).unwrap();
        assert!(s.abs() < 1e-15);
    }

    /// Phases from the closed form, one at a time, summed naively.
    fn direct_weyl(n: i64, alpha: &FixedReal, beta: &FixedReal, t: u64) -> (f64, f64) {
        let (mut re, mut im) = (0.0, 0.0);
        for m in 1..=t {
            let m = BigInt::from(m);
            let ph = &alpha.mul_int(&(&m * &m * n)) + &beta.mul_int(&m);
            let th = ph.frac().to_f64() * std::f64::consts::TAU;
            re += th.cos();
            im += th.sin();
        }
        (re, im)
    }

    #[test]
    fn weyl_sum_matches_direct_evaluation() {
        for (n, a, b) in [
            (1, sqrt2(), rat(0, 1)),
            (3, golden(), rat(2, 7)),
            (-5, sqrt2(), golden()),
        ] {
            let s = weyl_sum::<f64>(n, &a, &b, 3000).unwrap();
            let (re, im) = direct_weyl(n, &a, &b, 3000);
            assert!((s.re - re).abs() < 1e-9 && (s.im - im).abs() < 1e-9);
            let s32 = weyl_sum::<f32>(n, &a, &b, 3000).unwrap();
            assert!((f64::from(s32.re) - re).abs() < 1e-2);
            assert!(s.abs() <= 3000.0);
        }
    }

    #[test]
    fn weyl_sum_cancels_for_sqrt2() {
        let t = 10_000;
        let s = weyl_sum::<f64>(1, &sqrt2(), &rat(0, 1), t).unwrap();
        assert!(s.norm_sqr() <= weyl_differencing_bound(1, &sqrt2(), t).unwrap());
        assert!(s.abs() < 20.0 * (t as f64).sqrt() * (t as f64).ln());
        assert!(s.abs() < 0.1 * t as f64);
    }

    #[test]
    fn differencing_bound_examples() {
        let b = weyl_differencing_bound(4, &rat(0, 1), 50).unwrap();
        assert_eq!(b, 50.0 + 2.0 * 2500.0);

        let bound = weyl_differencing_bound(1, &sqrt2(), 100).unwrap();
        for k in 0..100 {
            let s = weyl_sum::<f64>(1, &sqrt2(), &rat(k, 100), 100).unwrap();
            assert!(s.norm_sqr() <= bound * (1.0 + 1e-6));
        }
        let bound = weyl_differencing_bound(3, &golden(), 1000).unwrap();
        for k in 0..20 {
            let beta = FixedReal::sqrt_of(k + 2, BITS).unwrap();
            let s = weyl_sum::<f64>(3, &golden(), &beta, 1000).unwrap();
            assert!(s.norm_sqr() <= bound * (1.0 + 1e-6));
        }
    }

    #[test]
    fn sum_min_examples() {
        assert_eq!(sum_min(&rat(0, 1), 3, 10).unwrap(), 300.0);
        assert_eq!(sum_min(&rat(1, 2), 1, 4).unwrap(), 12.0);
        assert_eq!(sum_min(&sqrt2(), 0, 10).unwrap(), 0.0);
        let s = sum_min(&sqrt2(), 1, 1000).unwrap();
        let (q, t) = (985.0, 1000f64);
        assert!(s <= 4.0 * t * t / q + 16.0 * t * t.ln());
    }

    /// Term-by-term sum with `‖mα‖` from the closed form.
    #[test]
    fn sum_min_matches_direct_sum() {
        let a = golden();
        let t = 300u64;
        let direct: f64 = (1..=2 * t)
            .map(|m| {
                let d = a.mul_int(&BigInt::from(m)).circle_norm().to_f64();
                (1.0 / d).min(t as f64)
            })
            .sum();
        assert!((sum_min(&a, 2, t).unwrap() - direct).abs() < 1e-9 * direct);
    }

    #[test]
    fn explicit_bound_examples() {
        let b = sum_min_explicit_bound(&sqrt2(), 1, 1000).unwrap();
        let expect = 4e6 / 985.0 + 16_000.0 * 1000f64.ln();
        assert!((b - expect).abs() < 1e-9 * expect);
        assert!((b - 114_585.0).abs() < 1.0);
        let b = sum_min_explicit_bound(&golden(), 1, 10).unwrap();
        assert!((b - (50.0 + 160.0 * 10f64.ln())).abs() < 1e-9);
        assert!((b - 418.4).abs() < 0.1);
        let b = sum_min_explicit_bound(&golden(), 0, 10).unwrap();
        assert!((b - 80.0 * 10f64.ln()).abs() < 1e-9);
        assert!(sum_min_explicit_bound(&golden(), 1, 1).is_err());
    }

    #[test]
    fn explicit_inequality_holds() {
        for a in [sqrt2(), golden()] {
            for m in [1, 5] {
                for t in [100, 1000] {
                    assert!(
                        sum_min(&a, m, t).unwrap() <= sum_min_explicit_bound(&a, m, t).unwrap()
                    );
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn torus_dist_is_a_metric(
            p in proptest::array::uniform6(0.0f64..1.0),
        ) {
            let (u, v, w) = (point(p[0], p[1]), point(p[2], p[3]), point(p[4], p[5]));
            prop_assert_eq!(torus_dist(&u, &v), torus_dist(&v, &u));
            prop_assert!(torus_dist(&u, &w) <= torus_dist(&u, &v) + torus_dist(&v, &w) + 1e-15);
            prop_assert!(torus_dist(&u, &v) <= std::f64::consts::FRAC_1_SQRT_2 + 1e-15);
        }

        #[test]
        fn count_monotone_in_delta(d1 in 0.01f64..0.49, d2 in 0.01f64..0.49, x in 0.0f64..1.0) {
            let s = xi(sqrt2(), golden(), rat(0, 1));
            let v0 = point(x, 1.0 - x);
            let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
            let a = count_orbit_hits(&s, &v0, 400, lo, false).unwrap().count;
            let b = count_orbit_hits(&s, &v0, 400, hi, false).unwrap().count;
            prop_assert!(a <= b);
        }
    }
}
