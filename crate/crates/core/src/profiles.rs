//! Scalar building blocks for the warped-product constructions: second-order jets, smooth
//! profiles with closed-form derivatives, and the mollifier bump used for every interpolation.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{positive, Error, Result};
use crate::search::maximize;

/// Relative safety margin applied to every sampled supremum that is certified as a bound.
pub const SAFETY_FACTOR: f64 = 0.01;

/// Sample count used by [`make_bump`] to certify the derivative bounds.
pub const DEFAULT_BUMP_SAMPLES: usize = 20_000;

/// Number of interior probe points used by [`check_derivatives`].
pub const DERIVATIVE_PROBES: usize = 1000;

// Distance to a transition endpoint below which the mollifier returns its exact limit.
const FLAT_CUTOFF: f64 = 1e-12;

/// Value, first and second derivative of a function at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const fn new(value: f64, d1: f64, d2: f64) -> Self {
        Jet { value, d1, d2 }
    }

    pub const fn constant(value: f64) -> Self {
        Jet::new(value, 0.0, 0.0)
    }

    /// Jet of `exp(f)` given the jet of `f`.
    pub fn exp(self) -> Self {
        let e = self.value.exp();
        Jet::new(e, e * self.d1, e * (self.d2 + self.d1 * self.d1))
    }

    pub fn scale(self, k: f64) -> Self {
        Jet::new(k * self.value, k * self.d1, k * self.d2)
    }
}

/// A closed real interval; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub const fn real_line() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

type JetFn = dyn Fn(f64) -> Jet + Send + Sync;

/// A C² function of one variable evaluated in closed form together with its first two
/// derivatives. Cheap to clone; evaluation is pure.
#[derive(Clone)]
pub struct SmoothProfile {
    domain: Interval,
    f: Arc<JetFn>,
}

impl fmt::Debug for SmoothProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothProfile")
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl SmoothProfile {
    pub fn new<F>(domain: Interval, f: F) -> Self
    where
        F: Fn(f64) -> Jet + Send + Sync + 'static,
    {
        SmoothProfile {
            domain,
            f: Arc::new(f),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(Interval::real_line(), move |_| Jet::constant(c))
    }

    /// `r ↦ slope·r + intercept`.
    pub fn linear(slope: f64, intercept: f64) -> Self {
        Self::new(Interval::real_line(), move |r| {
            Jet::new(slope * r + intercept, slope, 0.0)
        })
    }

    pub fn sinh() -> Self {
        Self::new(Interval::real_line(), |r| {
            Jet::new(r.sinh(), r.cosh(), r.sinh())
        })
    }

    pub fn cosh() -> Self {
        Self::new(Interval::real_line(), |r| {
            Jet::new(r.cosh(), r.sinh(), r.cosh())
        })
    }

    pub fn exp() -> Self {
        Self::new(Interval::real_line(), |r| {
            let e = r.exp();
            Jet::new(e, e, e)
        })
    }

    #[inline]
    pub fn eval(&self, r: f64) -> Jet {
        (self.f)(r)
    }

    pub fn value(&self, r: f64) -> f64 {
        self.eval(r).value
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Same function on a sub-interval of the current domain.
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<Self> {
        let d = Interval::new(lo, hi)?;
        if !(self.domain.contains(lo) && self.domain.contains(hi)) {
            return Err(Error::OutOfDomain {
                r: if self.domain.contains(lo) { hi } else { lo },
                lo: self.domain.lo,
                hi: self.domain.hi,
            });
        }
        Ok(SmoothProfile {
            domain: d,
            f: Arc::clone(&self.f),
        })
    }

    /// `r ↦ k·p(r)`.
    pub fn scaled(&self, k: f64) -> Self {
        let f = Arc::clone(&self.f);
        SmoothProfile {
            domain: self.domain,
            f: Arc::new(move |r| f(r).scale(k)),
        }
    }

    /// `r ↦ p(r + t)`, with the domain moved accordingly.
    pub fn shifted(&self, t: f64) -> Self {
        let f = Arc::clone(&self.f);
        SmoothProfile {
            domain: Interval {
                lo: self.domain.lo - t,
                hi: self.domain.hi - t,
            },
            f: Arc::new(move |r| f(r + t)),
        }
    }

    /// `r ↦ exp(p(r))`.
    pub fn exp_of(&self) -> Self {
        let f = Arc::clone(&self.f);
        SmoothProfile {
            domain: self.domain,
            f: Arc::new(move |r| f(r).exp()),
        }
    }
}

/// Standard smooth transition on the unit interval:
/// `f(t)/(f(t) + f(1 − t))` with `f(t) = exp(−1/t)`, written in logistic form so that no
/// intermediate overflows.
pub(crate) fn unit_transition(t: f64) -> Jet {
    if t <= FLAT_CUTOFF {
        return Jet::constant(0.0);
    }
    if t >= 1.0 - FLAT_CUTOFF {
        return Jet::constant(1.0);
    }
    let u = 1.0 - t;
    // η = 1/(1 + e^q) with q = 1/t − 1/(1 − t)
    let q = 1.0 / t - 1.0 / u;
    let dq = -1.0 / (t * t) - 1.0 / (u * u);
    let ddq = 2.0 / (t * t * t) - 2.0 / (u * u * u);
    let m = (-q.abs()).exp();
    let s = if q >= 0.0 {
        m / (1.0 + m)
    } else {
        1.0 / (1.0 + m)
    };
    let s1 = m / ((1.0 + m) * (1.0 + m)); // s(1 − s)
    Jet::new(s, -s1 * dq, (1.0 - 2.0 * s) * s1 * dq * dq - s1 * ddq)
}

/// Non-decreasing smooth step: 0 on `(−∞, x0]`, 1 on `[x1, ∞)`, with certified bounds
/// `|η′| ≤ c1` and `|η″| ≤ c2`.
#[derive(Debug, Clone)]
pub struct BumpFunction {
    pub profile: SmoothProfile,
    pub x0: f64,
    pub x1: f64,
    pub c1: f64,
    pub c2: f64,
}

impl BumpFunction {
    #[inline]
    pub fn eval(&self, x: f64) -> Jet {
        self.profile.eval(x)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }
}

fn mollifier_profile(x0: f64, x1: f64) -> SmoothProfile {
    let w = x1 - x0;
    SmoothProfile::new(Interval::real_line(), move |x| {
        let j = unit_transition((x - x0) / w);
        Jet::new(j.value, j.d1 / w, j.d2 / (w * w))
    })
}

/// Mollifier transition from 0 at `x0` to 1 at `x1`.
pub fn make_bump(x0: f64, x1: f64) -> Result<BumpFunction> {
    if !(x0.is_finite() && x1.is_finite() && x0 < x1) {
        return Err(Error::InvalidInterval { lo: x0, hi: x1 });
    }
    let mut eta = BumpFunction {
        profile: mollifier_profile(x0, x1),
        x0,
        x1,
        c1: f64::NAN,
        c2: f64::NAN,
    };
    let (c1, c2) = bump_derivative_bounds(&eta, DEFAULT_BUMP_SAMPLES)?;
    eta.c1 = c1;
    eta.c2 = c2;
    Ok(eta)
}

/// Sup of `|η′|` and `|η″|` over the transition by dense sampling plus local refinement, each
/// inflated by [`SAFETY_FACTOR`].
pub fn bump_derivative_bounds(eta: &BumpFunction, samples: usize) -> Result<(f64, f64)> {
    if samples < 1000 {
        return Err(Error::InvalidParameter {
            name: "samples",
            value: samples as f64,
            reason: "at least 1000 samples are required",
        });
    }
    let d1 = maximize(|x| eta.eval(x).d1.abs(), eta.x0, eta.x1, samples)?;
    let d2 = maximize(|x| eta.eval(x).d2.abs(), eta.x0, eta.x1, samples)?;
    let c1 = (1.0 + SAFETY_FACTOR) * d1.value;
    let c2 = (1.0 + SAFETY_FACTOR) * d2.value;
    if !(c1 > 0.0 && c2 > 0.0) {
        return Err(Error::NumericOverflow { at: d1.at });
    }
    Ok((c1, c2))
}

/// `χ(r) = η(r/R)`: transition on `[x0·R, x1·R]`, derivatives scaled by `1/R` and `1/R²`.
pub fn rescale_bump(eta: &BumpFunction, radius: f64) -> Result<SmoothProfile> {
    let radius = positive("R", radius)?;
    let p = eta.profile.clone();
    Ok(SmoothProfile::new(Interval::real_line(), move |r| {
        let j = p.eval(r / radius);
        Jet::new(j.value, j.d1 / radius, j.d2 / (radius * radius))
    }))
}

/// Outcome of comparing closed-form derivatives with central differences.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeCheck {
    pub step: f64,
    pub tol: f64,
    pub probes: usize,
    /// Largest `|d1 − D[v]|`.
    pub max_d1_error: f64,
    /// Largest `|d2 − D[d1]|`.
    pub max_d2_error: f64,
    /// Largest error divided by `max(1, |closed form|)`; this is what `tol` is applied to.
    pub max_scaled_error: f64,
    /// Probe points whose scaled error exceeds `tol`.
    pub flagged: Vec<f64>,
}

impl DerivativeCheck {
    pub fn passed(&self) -> bool {
        self.flagged.is_empty()
    }
}

// Central differences at steps h and h/2 combined as (4D(h/2) − D(h))/3, which removes the
// h² truncation term. Steep transitions have fourth derivatives of order 1e6, where the plain
// h² error alone would exceed any useful tolerance.
fn richardson_central(p: &SmoothProfile, r: f64, h: f64) -> (f64, f64) {
    let central = |h: f64| {
        let (m, q) = (p.eval(r - h), p.eval(r + h));
        ((q.value - m.value) / (2.0 * h), (q.d1 - m.d1) / (2.0 * h))
    };
    let (a1, a2) = central(h);
    let (b1, b2) = central(0.5 * h);
    ((4.0 * b1 - a1) / 3.0, (4.0 * b2 - a2) / 3.0)
}

/// Probe a bounded profile at [`DERIVATIVE_PROBES`] interior points. The first derivative is
/// compared with a central difference `D` of the value, the second with `D` of the closed-form
/// first derivative. `D` is the Richardson-extrapolated central difference at `step`.
pub fn check_derivatives(p: &SmoothProfile, step: f64, tol: f64) -> Result<DerivativeCheck> {
    let step = positive("step", step)?;
    let tol = positive("tol", tol)?;
    let d = p.domain();
    if !d.is_bounded() {
        return Err(Error::UnboundedDomain { lo: d.lo, hi: d.hi });
    }
    let scale = 1f64.max(d.lo.abs()).max(d.hi.abs());
    if f64::EPSILON * scale / step > tol {
        return Err(Error::IllConditionedStep { step, tol });
    }
    if 2.0 * step >= d.width() {
        return Err(Error::IllConditionedStep { step, tol });
    }

    let (lo, hi) = (d.lo + step, d.hi - step);
    let mut report = DerivativeCheck {
        step,
        tol,
        probes: DERIVATIVE_PROBES,
        max_d1_error: 0.0,
        max_d2_error: 0.0,
        max_scaled_error: 0.0,
        flagged: Vec::new(),
    };
    let h = (hi - lo) / DERIVATIVE_PROBES as f64;
    for i in 0..DERIVATIVE_PROBES {
        let r = lo + (i as f64 + 0.5) * h;
        let mid = p.eval(r);
        let (fd1, fd2) = richardson_central(p, r, step);
        let e1 = (mid.d1 - fd1).abs();
        let e2 = (mid.d2 - fd2).abs();
        let scaled = (e1 / mid.d1.abs().max(1.0)).max(e2 / mid.d2.abs().max(1.0));
        report.max_d1_error = report.max_d1_error.max(e1);
        report.max_d2_error = report.max_d2_error.max(e2);
        report.max_scaled_error = report.max_scaled_error.max(scaled);
        if !(scaled <= tol) {
            report.flagged.push(r);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Independent route: η = f(t)/(f(t) + f(1−t)) differentiated by the quotient rule.
    fn quotient_rule_derivative(t: f64) -> f64 {
        let f = |s: f64| if s > 0.0 { (-1.0 / s).exp() } else { 0.0 };
        let df = |s: f64| {
            if s > 0.0 {
                (-1.0 / s).exp() / (s * s)
            } else {
                0.0
            }
        };
        let (g, h) = (f(t), f(1.0 - t));
        let (dg, dh) = (df(t), -df(1.0 - t));
        (dg * (g + h) - g * (dg + dh)) / ((g + h) * (g + h))
    }

    #[test]
    fn bump_endpoints_and_midpoint() {
        let eta = make_bump(1.0 / 3.0, 2.0 / 3.0).unwrap();
        assert_eq!(eta.eval(1.0 / 3.0).value, 0.0);
        assert_eq!(eta.eval(2.0 / 3.0).value, 1.0);
        assert_relative_eq!(eta.eval(0.5).value, 0.5, epsilon = 1e-15);
        assert_eq!(eta.eval(-5.0), Jet::constant(0.0));
        assert_eq!(eta.eval(5.0), Jet::constant(1.0));
    }

    #[test]
    fn bump_rejects_empty_interval() {
        assert!(matches!(
            make_bump(0.5, 0.5),
            Err(Error::InvalidInterval { .. })
        ));
        assert!(make_bump(1.0, 0.0).is_err());
    }

    #[test]
    fn unit_bump_c1_matches_dense_oracle() {
        let eta = make_bump(0.0, 1.0).unwrap();
        let n = 100_000;
        let mut best = 0.0f64;
        let mut best_t = 0.0;
        for i in 1..n {
            let t = i as f64 / n as f64;
            let v = quotient_rule_derivative(t).abs();
            if v > best {
                best = v;
                best_t = t;
            }
        }
        // local refinement around the sampled maximum
        for i in -1000..=1000 {
            let t = best_t + i as f64 * 1e-8;
            best = best.max(quotient_rule_derivative(t).abs());
        }
        assert_relative_eq!(best, 2.0, max_relative = 1e-12);
        assert_relative_eq!(eta.c1, 1.01 * best, max_relative = 1e-9);
        // closed form agrees with the quotient rule on the interior
        for i in 1..100 {
            let t = i as f64 / 100.0;
            assert_relative_eq!(
                eta.eval(t).d1,
                quotient_rule_derivative(t),
                max_relative = 1e-10,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn derivative_bounds_scale_with_width() {
        let unit = make_bump(0.0, 1.0).unwrap();
        let third = make_bump(1.0 / 3.0, 2.0 / 3.0).unwrap();
        assert_relative_eq!(third.c1 / unit.c1, 3.0, max_relative = 1e-6);
        assert_relative_eq!(third.c2 / unit.c2, 9.0, max_relative = 1e-6);
    }

    #[test]
    fn derivative_bounds_converge_with_samples() {
        let eta = make_bump(0.0, 1.0).unwrap();
        let (a1, a2) = bump_derivative_bounds(&eta, 1_000).unwrap();
        let (b1, b2) = bump_derivative_bounds(&eta, 100_000).unwrap();
        assert!((a1 / b1 - 1.0).abs() < 0.01);
        assert!((a2 / b2 - 1.0).abs() < 0.01);
        assert!(matches!(
            bump_derivative_bounds(&eta, 999),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn non_finite_sample_signals_overflow() {
        let broken = BumpFunction {
            profile: SmoothProfile::new(Interval::real_line(), |x| {
                Jet::new(x, 1.0 / (x - 0.5), 0.0)
            }),
            x0: 0.0,
            x1: 1.0,
            c1: 1.0,
            c2: 1.0,
        };
        assert!(matches!(
            bump_derivative_bounds(&broken, 1000),
            Err(Error::NumericOverflow { .. })
        ));
    }

    #[test]
    fn rescaled_bump_moves_the_transition() {
        let eta = make_bump(1.0 / 3.0, 2.0 / 3.0).unwrap();
        let chi = rescale_bump(&eta, 0.5).unwrap();
        assert_eq!(chi.value(1.0 / 6.0), 0.0);
        assert_eq!(chi.value(0.1), 0.0);
        assert_eq!(chi.value(1.0 / 3.0), 1.0);
        assert_eq!(chi.value(0.9), 1.0);

        let same = rescale_bump(&eta, 1.0).unwrap();
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            assert_eq!(same.eval(x), eta.eval(x));
        }

        let peak = maximize(|r| chi.eval(r).d1.abs(), 1.0 / 6.0, 1.0 / 3.0, 10_000).unwrap();
        assert_relative_eq!(1.01 * peak.value, 2.0 * eta.c1, max_relative = 1e-9);

        assert!(matches!(
            rescale_bump(&eta, 0.0),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn derivative_check_sinh_and_exp() {
        let s = SmoothProfile::sinh().restrict(-1.0, 1.0).unwrap();
        let rep = check_derivatives(&s, 1e-5, 1e-6).unwrap();
        assert!(rep.max_d1_error < 1e-8, "{rep:?}");
        assert!(rep.passed());

        let e = SmoothProfile::exp().restrict(-1.0, 1.0).unwrap();
        let rep = check_derivatives(&e, 1e-5, 1e-6).unwrap();
        assert!(rep.max_d2_error < 1e-6, "{rep:?}");
    }

    #[test]
    fn derivative_check_constant_is_exact() {
        let c = SmoothProfile::constant(3.5).restrict(0.0, 2.0).unwrap();
        let rep = check_derivatives(&c, 1e-5, 1e-6).unwrap();
        assert_eq!(rep.max_d1_error, 0.0);
        assert_eq!(rep.max_d2_error, 0.0);
    }

    #[test]
    fn derivative_check_guards() {
        let s = SmoothProfile::sinh();
        assert!(matches!(
            check_derivatives(&s, 1e-5, 1e-6),
            Err(Error::UnboundedDomain { .. })
        ));
        let s = s.restrict(-1.0, 1.0).unwrap();
        assert!(matches!(
            check_derivatives(&s, 1e-13, 1e-6),
            Err(Error::IllConditionedStep { .. })
        ));
    }

    #[test]
    fn wrong_derivative_is_flagged() {
        let bad = SmoothProfile::new(Interval::new(0.0, 1.0).unwrap(), |r| {
            Jet::new(r * r, 2.0 * r + 0.1, 2.0)
        });
        let rep = check_derivatives(&bad, 1e-5, 1e-6).unwrap();
        assert_eq!(rep.flagged.len(), DERIVATIVE_PROBES);
    }

    #[test]
    fn exp_of_matches_chain_rule() {
        let p = SmoothProfile::linear(2.0, 0.5).exp_of();
        let j = p.eval(0.3);
        let v = (2.0f64 * 0.3 + 0.5).exp();
        assert_relative_eq!(j.value, v);
        assert_relative_eq!(j.d1, 2.0 * v);
        assert_relative_eq!(j.d2, 4.0 * v);
    }
}
