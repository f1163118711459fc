//! Cusp → tube interpolation used when Dehn filling a cusp, and the solid-torus metric built
//! from flat boundary-torus data.
//!
//! With `R = log(ℓ₁/π)`, `κ = 2πℓ₂/ℓ₁` and a step `χ` on `[−log(2)/2, −log(2)/4]`:
//!
//! ```text
//! φ = (1 − χ) log(2π sinh(r + R)) + χ log(ℓ₁ eʳ)     a_fill = e^φ
//! ψ = (1 − χ) log(κ cosh(r + R))  + χ log(ℓ₂ eʳ)     b_fill = e^ψ
//! ```
//!
//! Everything below is written in terms of `E = e^{−2(r+R)} = (π²/ℓ₁²)e^{−2r}`, which keeps the
//! curvature defect free of cancellation even when it is of order `ℓ₁⁻⁴`.

use std::f64::consts::{LN_2, PI, TAU};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{positive, Error, Result};
use crate::profiles::{BumpFunction, Interval, Jet, SmoothProfile, SAFETY_FACTOR};
use crate::search::{linspace, maximize};
use crate::warped::WarpedMetric;

/// Half-width parameter of the transition: `χ` steps on `[−2δ, −δ]`.
pub const DELTA: f64 = LN_2 / 4.0;

/// Slack tolerated on the pointwise profile properties.
pub const PROPERTY_SLACK_TOL: f64 = 1e-12;
/// Tolerance on `a_fill′(−R) = 2π`.
pub const CORE_TOL: f64 = 1e-10;
const ONE_SIDED_OFFSET: f64 = 1e-11;

#[derive(Debug)]
struct FillShape {
    ell1: f64,
    ell2: f64,
    radius: f64,
    kappa: f64,
    eta: BumpFunction,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Branch {
    Tube,
    Transition,
    Cusp,
}

/// Terms of `φ′ − 1`, `ψ′ − 1` and friends at one radius.
struct Parts {
    chi: Jet,
    e: f64,
    // log(1 − E), log(1 + E)
    l1: f64,
    l2: f64,
    // coth(r+R) − 1 = 2E/(1 − E), tanh(r+R) − 1 = −2E/(1 + E)
    p: f64,
    q: f64,
}

impl FillShape {
    fn branch(&self, r: f64) -> Branch {
        if r <= -2.0 * DELTA {
            Branch::Tube
        } else if r >= -DELTA {
            Branch::Cusp
        } else {
            Branch::Transition
        }
    }

    fn parts(&self, r: f64) -> Parts {
        let e = (-2.0 * (r + self.radius)).exp();
        Parts {
            chi: self.eta.eval(r),
            e,
            l1: (-e).ln_1p(),
            l2: e.ln_1p(),
            p: 2.0 * e / (1.0 - e),
            q: -2.0 * e / (1.0 + e),
        }
    }

    fn log_jets_interpolated(&self, r: f64) -> (Jet, Jet) {
        let Parts {
            chi,
            e,
            l1,
            l2,
            p,
            q,
        } = self.parts(r);
        let x = r + self.radius;
        let w = 1.0 - chi.value;
        let csch2 = 4.0 * e / ((1.0 - e) * (1.0 - e));
        let sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
        let phi = Jet::new(
            w * (TAU * x.sinh()).ln() + chi.value * (self.ell1.ln() + r),
            1.0 + w * p - chi.d1 * l1,
            -chi.d2 * l1 - 2.0 * chi.d1 * p - w * csch2,
        );
        let psi = Jet::new(
            w * (self.kappa * x.cosh()).ln() + chi.value * (self.ell2.ln() + r),
            1.0 + w * q - chi.d1 * l2,
            -chi.d2 * l2 - 2.0 * chi.d1 * q + w * sech2,
        );
        (phi, psi)
    }

    fn log_jets(&self, r: f64) -> (Jet, Jet) {
        match self.branch(r) {
            Branch::Tube => {
                let x = r + self.radius;
                let (sh, ch) = (x.sinh(), x.cosh());
                (
                    Jet::new((TAU * sh).ln(), ch / sh, -1.0 / (sh * sh)),
                    Jet::new((self.kappa * ch).ln(), sh / ch, 1.0 / (ch * ch)),
                )
            }
            Branch::Cusp => (
                Jet::new(self.ell1.ln() + r, 1.0, 0.0),
                Jet::new(self.ell2.ln() + r, 1.0, 0.0),
            ),
            Branch::Transition => self.log_jets_interpolated(r),
        }
    }

    fn warps(&self, r: f64) -> (Jet, Jet) {
        match self.branch(r) {
            Branch::Tube => {
                let x = r + self.radius;
                let (sh, ch) = (x.sinh(), x.cosh());
                (
                    Jet::new(sh, ch, sh).scale(TAU),
                    Jet::new(ch, sh, ch).scale(self.kappa),
                )
            }
            Branch::Cusp => {
                let e = r.exp();
                (
                    Jet::new(e, e, e).scale(self.ell1),
                    Jet::new(e, e, e).scale(self.ell2),
                )
            }
            Branch::Transition => {
                let (phi, psi) = self.log_jets_interpolated(r);
                (phi.exp(), psi.exp())
            }
        }
    }

    /// `a″/a + b″/b + a′b′/(ab) − 3`, expanded so that every term carries a factor `E²`:
    ///
    /// ```text
    /// −(3χ′ + χ″)log(1 − E²) − 2χ′(P + Q) + χ′²(L₁² + L₂² + L₁L₂)
    ///   − χ′(1 − χ)(L₁(2P + Q) + L₂(2Q + P)) − χ(1 − χ)(P² + Q² + PQ)
    /// ```
    fn curvature_excess(&self, r: f64) -> f64 {
        let Parts {
            chi,
            e,
            l1,
            l2,
            p,
            q,
        } = self.parts(r);
        let (c, c1, c2) = (chi.value, chi.d1, chi.d2);
        if c1 == 0.0 && c2 == 0.0 && (c == 0.0 || c == 1.0) {
            return 0.0;
        }
        let w = 1.0 - c;
        let e2 = e * e;
        let log_sum = (-e2).ln_1p();
        let pq_sum = 4.0 * e2 / (1.0 - e2);
        -(3.0 * c1 + c2) * log_sum - 2.0 * c1 * pq_sum + c1 * c1 * (l1 * l1 + l2 * l2 + l1 * l2)
            - c1 * w * (l1 * (2.0 * p + q) + l2 * (2.0 * q + p))
            - c * w * (p * p + q * q + p * q)
    }
}

/// The pair `a_fill, b_fill` for boundary lengths `ℓ₁ > 2π`, `ℓ₂ > 0`.
#[derive(Debug, Clone)]
pub struct FillProfilePair {
    pub ell1: f64,
    pub ell2: f64,
    /// `R = log(ℓ₁/π)`.
    pub radius: f64,
    /// `κ = 2πℓ₂/ℓ₁`.
    pub kappa: f64,
    pub delta: f64,
    pub a_fill: SmoothProfile,
    pub b_fill: SmoothProfile,
    pub phi: SmoothProfile,
    pub psi: SmoothProfile,
    pub chi: SmoothProfile,
    pub eta: BumpFunction,
    shape: Arc<FillShape>,
}

pub fn build_fill_profiles(ell1: f64, ell2: f64, eta: &BumpFunction) -> Result<FillProfilePair> {
    if !(ell1.is_finite() && ell1 > TAU) {
        return Err(Error::InvalidParameter {
            name: "ell1",
            value: ell1,
            reason: "must exceed 2π",
        });
    }
    let ell2 = positive("ell2", ell2)?;
    if (eta.x0 + 2.0 * DELTA).abs() > 1e-12 || (eta.x1 + DELTA).abs() > 1e-12 {
        return Err(Error::InvalidParameter {
            name: "eta",
            value: eta.x0,
            reason: "bump must transition on [−log(2)/2, −log(2)/4]",
        });
    }
    let radius = (ell1 / PI).ln();
    let shape = Arc::new(FillShape {
        ell1,
        ell2,
        radius,
        kappa: TAU * ell2 / ell1,
        eta: eta.clone(),
    });
    let domain = Interval {
        lo: -radius,
        hi: f64::INFINITY,
    };
    let profile = |f: fn(&FillShape, f64) -> Jet| {
        let s = Arc::clone(&shape);
        SmoothProfile::new(domain, move |r| f(&s, r))
    };
    Ok(FillProfilePair {
        ell1,
        ell2,
        radius,
        kappa: shape.kappa,
        delta: DELTA,
        a_fill: profile(|s, r| s.warps(r).0),
        b_fill: profile(|s, r| s.warps(r).1),
        phi: profile(|s, r| s.log_jets(r).0),
        psi: profile(|s, r| s.log_jets(r).1),
        chi: eta.profile.clone(),
        eta: eta.clone(),
        shape,
    })
}

/// The bump that [`build_fill_profiles`] expects.
pub fn fill_bump() -> Result<BumpFunction> {
    crate::profiles::make_bump(-2.0 * DELTA, -DELTA)
}

impl FillProfilePair {
    /// The transition window `[−2δ, −δ]`.
    pub fn transition(&self) -> (f64, f64) {
        (-2.0 * DELTA, -DELTA)
    }

    /// `|a_fill′(−R) − 2π|`.
    pub fn core_residual(&self) -> f64 {
        (self.a_fill.eval(-self.radius).d1 - TAU).abs()
    }
}

/// `|a″/a + b″/b + a′b′/(ab) − 3|` for `r ∈ (−R, 0)`.
pub fn fill_curvature_defect(p: &FillProfilePair, r: f64) -> Result<f64> {
    if r == -p.radius {
        return Err(Error::SingularAxis { r });
    }
    if !(r > -p.radius && r < 0.0) {
        return Err(Error::OutOfDomain {
            r,
            lo: -p.radius,
            hi: 0.0,
        });
    }
    Ok(p.shape.curvature_excess(r).abs())
}

/// Pointwise verification of the fill profile properties on `(−R, 0]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FillPropertyReport {
    pub ell1: f64,
    pub ell2: f64,
    pub samples: usize,
    pub min_a: f64,
    pub min_b: f64,
    /// Largest `|a − 2π sinh(r+R)|`, `|b − κ cosh(r+R)|` for `r ≤ −2δ`.
    pub tube_branch_deviation: f64,
    /// Largest `|a − ℓ₁eʳ|`, `|b − ℓ₂eʳ|` for `r ≥ −δ`.
    pub cusp_branch_deviation: f64,
    /// Smallest `(ℓ₁ℓ₂e^{2r} − a b) / (ℓ₁ℓ₂e^{2r})`.
    pub product_min_slack: f64,
    pub core_residual: f64,
    /// Largest defect sampled outside `[−2δ, −δ]`.
    pub branch_defect: f64,
    pub gluing_max_jump: f64,
}

impl FillPropertyReport {
    pub fn positivity_holds(&self) -> bool {
        self.min_a > 0.0 && self.min_b > 0.0
    }

    pub fn branches_hold(&self) -> bool {
        self.tube_branch_deviation <= PROPERTY_SLACK_TOL * self.ell1.max(1.0)
            && self.cusp_branch_deviation <= PROPERTY_SLACK_TOL * self.ell1.max(1.0)
    }

    pub fn product_bound_holds(&self) -> bool {
        self.product_min_slack >= -PROPERTY_SLACK_TOL
    }

    pub fn core_smooth(&self) -> bool {
        self.core_residual < CORE_TOL
    }

    pub fn all_hold(&self) -> bool {
        self.positivity_holds()
            && self.branches_hold()
            && self.product_bound_holds()
            && self.core_smooth()
            && self.branch_defect <= PROPERTY_SLACK_TOL
            && self.gluing_max_jump < 1e-9 * self.ell1.max(1.0)
    }
}

fn max_jump(p: &SmoothProfile, at: f64) -> f64 {
    let h = ONE_SIDED_OFFSET;
    let (l, r) = (p.eval(at - h), p.eval(at + h));
    (l.value - r.value)
        .abs()
        .max((l.d1 - r.d1).abs())
        .max((l.d2 - r.d2).abs())
}

/// Check properties (1), (2), (3), (5), the core condition and branch exactness on `points`
/// equispaced samples of `(−R, 0]` plus the gluing radii.
pub fn verify_fill_properties(p: &FillProfilePair, points: usize) -> FillPropertyReport {
    let (lo, hi) = p.transition();
    let mut samples: Vec<f64> = linspace(-p.radius, 0.0, points.max(2) + 1)
        .skip(1)
        .collect();
    samples.extend([lo, hi]);
    samples.sort_by(f64::total_cmp);
    samples.dedup();

    let mut rep = FillPropertyReport {
        ell1: p.ell1,
        ell2: p.ell2,
        samples: samples.len(),
        min_a: f64::INFINITY,
        min_b: f64::INFINITY,
        tube_branch_deviation: 0.0,
        cusp_branch_deviation: 0.0,
        product_min_slack: f64::INFINITY,
        core_residual: p.core_residual(),
        branch_defect: 0.0,
        gluing_max_jump: 0.0,
    };
    for &r in &samples {
        let (a, b) = (p.a_fill.value(r), p.b_fill.value(r));
        rep.min_a = rep.min_a.min(a);
        rep.min_b = rep.min_b.min(b);
        let x = r + p.radius;
        if r <= lo {
            let dev = (a - TAU * x.sinh())
                .abs()
                .max((b - p.kappa * x.cosh()).abs());
            rep.tube_branch_deviation = rep.tube_branch_deviation.max(dev);
        }
        if r >= hi {
            let e = r.exp();
            let dev = (a - p.ell1 * e).abs().max((b - p.ell2 * e).abs());
            rep.cusp_branch_deviation = rep.cusp_branch_deviation.max(dev);
        }
        let cap = p.ell1 * p.ell2 * (2.0 * r).exp();
        rep.product_min_slack = rep.product_min_slack.min((cap - a * b) / cap);
        if (r < lo || r > hi) && r < 0.0 {
            rep.branch_defect = rep.branch_defect.max(p.shape.curvature_excess(r).abs());
        }
    }
    for g in [lo, hi] {
        rep.gluing_max_jump = rep
            .gluing_max_jump
            .max(max_jump(&p.a_fill, g))
            .max(max_jump(&p.b_fill, g));
    }
    rep
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FillDefectRow {
    pub ell: f64,
    pub sup_defect: f64,
    /// `(ℓ⁴/π⁴) · sup_defect`.
    pub scaled_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FillConstantEstimate {
    pub rows: Vec<FillDefectRow>,
    /// `(1 + safety) · max (ℓ⁴/π⁴) sup_defect`.
    pub c_hat: f64,
    /// Least-squares slope of `log sup_defect` against `log ℓ`.
    pub slope: f64,
}

pub fn fill_defect_row(p: &FillProfilePair, samples: usize) -> Result<FillDefectRow> {
    let (lo, hi) = p.transition();
    let d = maximize(|r| p.shape.curvature_excess(r).abs(), lo, hi, samples)?;
    Ok(FillDefectRow {
        ell: p.ell1,
        sup_defect: d.value,
        scaled_defect: d.value * (p.ell1 / PI).powi(4),
    })
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Certify the constant in `|a″/a + b″/b + a′b′/(ab) − 3| ≤ ĉπ⁴/ℓ₁⁴` over a grid of `ℓ₁`
/// and fit the decay exponent. The defect does not depend on `ℓ₂`.
pub fn estimate_fill_constant(
    eta: &BumpFunction,
    ell_grid: &[f64],
    samples: usize,
) -> Result<FillConstantEstimate> {
    if ell_grid.is_empty() {
        return Err(Error::InvalidParameter {
            name: "ell_grid",
            value: 0.0,
            reason: "length grid is empty",
        });
    }
    let rows = ell_grid
        .iter()
        .map(|&l| build_fill_profiles(l, 1.0, eta).and_then(|p| fill_defect_row(&p, samples)))
        .collect::<Result<Vec<_>>>()?;
    let logs: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.ell.ln(), r.sup_defect.ln()))
        .collect();
    let slope = fit_slope(&logs).ok_or(Error::InvalidParameter {
        name: "ell_grid",
        value: ell_grid.len() as f64,
        reason: "slope fit needs at least two distinct lengths",
    })?;
    let max = rows.iter().map(|r| r.scaled_defect).fold(0.0, f64::max);
    Ok(FillConstantEstimate {
        rows,
        c_hat: (1.0 + SAFETY_FACTOR) * max,
        slope,
    })
}

/// Flat metric on the boundary torus: area `A`, meridian length `ℓ`, twist `α` of the deck
/// translation `(θ, y) ↦ (θ + α, y + s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlatTorusData {
    pub area: f64,
    pub ell: f64,
    pub twist: f64,
}

impl FlatTorusData {
    pub fn new(area: f64, ell: f64, twist: f64) -> Result<Self> {
        let area = positive("A", area)?;
        let ell = positive("ell", ell)?;
        if !(0.0..1.0).contains(&twist) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: twist,
                reason: "twist must lie in [0, 1)",
            });
        }
        Ok(FlatTorusData { area, ell, twist })
    }

    /// Height `s = A/ℓ` of the fundamental domain `S¹ × [0, s]`.
    pub fn height(&self) -> f64 {
        self.area / self.ell
    }
}

#[derive(Debug, Clone)]
pub struct SolidTorusMetric {
    pub metric: WarpedMetric,
    pub torus: FlatTorusData,
    pub profiles: FillProfilePair,
    pub smoothness_residual: f64,
}

impl SolidTorusMetric {
    /// Area of the boundary torus `r = 0` in the constructed metric.
    pub fn boundary_area(&self) -> f64 {
        self.metric.slice_area(0.0)
    }
}

/// Realize the flat torus as the horospherical boundary of a solid torus: fill profiles with
/// `ℓ₁ = ℓ`, `ℓ₂ = 1` on `[−R, 0]`, θ-period 1 and y-extent `s = A/ℓ`.
pub fn solid_torus_from_flat_torus(
    t: &FlatTorusData,
    eta: &BumpFunction,
) -> Result<SolidTorusMetric> {
    if !(t.ell > TAU) {
        return Err(Error::HypothesisViolation(format!(
            "meridian length {} must exceed 2π",
            t.ell
        )));
    }
    let profiles = build_fill_profiles(t.ell, 1.0, eta)?;
    let (lo, hi) = profiles.transition();
    let metric = WarpedMetric::new(
        -profiles.radius,
        0.0,
        profiles.a_fill.clone(),
        profiles.b_fill.clone(),
        1.0,
        t.height(),
    )?
    .with_breakpoints(vec![lo, hi]);
    Ok(SolidTorusMetric {
        metric,
        torus: *t,
        smoothness_residual: profiles.core_residual(),
        profiles,
    })
}

/// Integral bound chain for the filled solid torus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TubeIntegralReport {
    pub area: f64,
    pub ell: f64,
    pub c_hat: f64,
    /// `I = ∫ (|S|/6)^{3/2} dvol`.
    pub integral: f64,
    /// `V = vol(V, g)`.
    pub volume: f64,
    /// `(A/2)(1 − π²/ℓ²)`.
    pub volume_bound: f64,
    /// `(3/2)ĉπ⁴/ℓ⁴`.
    pub allowance: f64,
    /// `(A/2)(1 − π²/ℓ²)(1 + (3/2)ĉπ⁴/ℓ⁴)`.
    pub chain_bound: f64,
    /// `(A/2)(1 − π²/ℓ²)(1 + ĉπ⁴/ℓ⁴)`, the form stated for the solid torus.
    pub stated_bound: f64,
    /// Largest sampled `|(|S|/6)^{3/2} − 1|` divided by `allowance`.
    pub pointwise_ratio: f64,
    /// `(1 + x)^{3/2} − 1 − (3/2)x` at `x = ĉπ⁴/ℓ⁴`; positive means the scalar step used to
    /// pass from the defect bound to the allowance does not hold literally at that `x`.
    pub scalar_step_gap: f64,
}

impl TubeIntegralReport {
    pub fn volume_slack(&self) -> f64 {
        self.volume_bound - self.volume
    }

    pub fn deviation(&self) -> f64 {
        (self.integral - self.volume).abs()
    }

    pub fn deviation_slack(&self) -> f64 {
        self.allowance * self.volume - self.deviation()
    }

    pub fn chain_slack(&self) -> f64 {
        self.chain_bound - self.integral
    }

    pub fn stated_slack(&self) -> f64 {
        self.stated_bound - self.integral
    }
}

const POINTWISE_PROBES: usize = 4000;

pub fn tube_scalar_integral_bound(
    st: &SolidTorusMetric,
    c_hat: f64,
    tol: f64,
) -> Result<TubeIntegralReport> {
    let c_hat = positive("c_hat", c_hat)?;
    let (area, ell) = (st.torus.area, st.torus.ell);
    let integral = st.metric.scalar_power_integral(tol)?;
    let volume = st.metric.volume(tol)?;
    let x = c_hat * (PI / ell).powi(4);
    let allowance = 1.5 * x;
    let base = 0.5 * area * (1.0 - (PI / ell).powi(2));

    let g = &st.metric;
    let mut worst = 0.0f64;
    for r in linspace(g.r0(), g.r1(), POINTWISE_PROBES + 2)
        .skip(1)
        .take(POINTWISE_PROBES)
    {
        let s = g.scalar_curvature(r)?;
        worst = worst.max(((s.abs() / 6.0).powf(1.5) - 1.0).abs());
    }
    Ok(TubeIntegralReport {
        area,
        ell,
        c_hat,
        integral,
        volume,
        volume_bound: base,
        allowance,
        chain_bound: base * (1.0 + allowance),
        stated_bound: base * (1.0 + x),
        pointwise_ratio: worst / allowance,
        scalar_step_gap: (1.0 + x).powf(1.5) - 1.0 - allowance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn eta() -> BumpFunction {
        fill_bump().unwrap()
    }

    #[test]
    fn radius_and_kappa() {
        let p = build_fill_profiles(4.0 * PI, 1.0, &eta()).unwrap();
        assert_relative_eq!(p.radius, 4f64.ln(), epsilon = 1e-15);
        assert!((p.radius - 1.386_294).abs() < 1e-6);
        assert_relative_eq!(p.kappa, 0.5, epsilon = 1e-15);
        assert_relative_eq!(
            p.a_fill.value(-0.1),
            4.0 * PI * (-0.1f64).exp(),
            max_relative = 1e-15
        );
        let core = p.a_fill.eval(-p.radius);
        assert_eq!(core.value, 0.0);
        assert_eq!(core.d1, TAU);
    }

    #[test]
    fn parameter_guards() {
        assert!(build_fill_profiles(TAU, 1.0, &eta()).is_err());
        assert!(build_fill_profiles(10.0, 0.0, &eta()).is_err());
        let wrong = crate::profiles::make_bump(0.0, 1.0).unwrap();
        assert!(build_fill_profiles(10.0, 1.0, &wrong).is_err());
    }

    #[test]
    fn defect_vanishes_on_branches() {
        let p = build_fill_profiles(4.0 * PI, 1.0, &eta()).unwrap();
        assert!(fill_curvature_defect(&p, -DELTA / 2.0).unwrap() < 1e-12);
        assert!(fill_curvature_defect(&p, -3.0 * DELTA).unwrap() < 1e-12);
        assert!(matches!(
            fill_curvature_defect(&p, -p.radius),
            Err(Error::SingularAxis { .. })
        ));
        assert!(matches!(
            fill_curvature_defect(&p, 0.5),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn expanded_defect_matches_direct_sum() {
        // at moderate ℓ the direct sum has enough digits to serve as a reference
        for ell in [7.0, 10.0, 15.0] {
            let p = build_fill_profiles(ell, 1.7, &eta()).unwrap();
            let g = WarpedMetric::new(-p.radius, 0.0, p.a_fill.clone(), p.b_fill.clone(), 1.0, 1.0)
                .unwrap();
            for i in 1..40 {
                let r = -2.0 * DELTA + i as f64 * DELTA / 40.0;
                let direct = -g.scalar_curvature(r).unwrap() / 2.0 - 3.0;
                let expanded = p.shape.curvature_excess(r);
                assert!(
                    (direct - expanded).abs() < 1e-12 * (1.0 + expanded.abs()) + 1e-13,
                    "ℓ = {ell}, r = {r}: {direct} vs {expanded}"
                );
            }
        }
    }

    #[test]
    fn properties_hold_for_several_lengths() {
        for (l1, l2) in [(8.0 * PI, 1.0), (10.0, 0.3), (100.0, 5.0)] {
            let p = build_fill_profiles(l1, l2, &eta()).unwrap();
            let rep = verify_fill_properties(&p, 2000);
            assert!(rep.all_hold(), "{rep:?}");
        }
    }

    #[test]
    fn flat_torus_height() {
        let t = FlatTorusData::new(6.0, 3.0 * PI, 0.25).unwrap();
        assert_relative_eq!(t.height(), 2.0 / PI, epsilon = 1e-15);
        assert!(FlatTorusData::new(0.0, 10.0, 0.0).is_err());
        assert!(FlatTorusData::new(1.0, 10.0, 1.0).is_err());
    }

    #[test]
    fn solid_torus_for_area_ten() {
        let st = solid_torus_from_flat_torus(&FlatTorusData::new(10.0, 10.0, 0.0).unwrap(), &eta())
            .unwrap();
        assert_eq!(st.torus.height(), 1.0);
        assert!((st.profiles.radius - 1.157_855).abs() < 1e-6);
        assert!(st.smoothness_residual < 1e-10);
        assert_relative_eq!(st.boundary_area(), 10.0, max_relative = 1e-12);

        let low = FlatTorusData::new(10.0, 6.0, 0.0).unwrap();
        assert!(matches!(
            solid_torus_from_flat_torus(&low, &eta()),
            Err(Error::HypothesisViolation(_))
        ));
    }

    #[test]
    fn slope_fit_of_exact_power_law() {
        let pts: Vec<(f64, f64)> = [1.0f64, 2.0, 4.0, 8.0]
            .iter()
            .map(|x| (x.ln(), (3.0 * x.powi(-4)).ln()))
            .collect();
        assert_relative_eq!(fit_slope(&pts).unwrap(), -4.0, epsilon = 1e-12);
        assert!(fit_slope(&[(1.0, 1.0), (1.0, 2.0)]).is_none());
    }
}
