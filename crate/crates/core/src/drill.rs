//! Tube → cusp interpolation used when drilling a geodesic.
//!
//! For a tube radius `R ∈ (0, 1]` and `χ(r) = η(r/R)` with `η` stepping on `[1/3, 2/3]`:
//!
//! ```text
//! φ = (1 − χ) log(sinh(R) eʳ) + χ log(sinh r)      a_drill = e^φ
//! ψ = (1 − χ) log(cosh(R) eʳ) + χ log(cosh r)      b_drill = e^ψ
//! ```
//!
//! so that `a_drill, b_drill` are the hyperbolic cusp `sinh(R)eʳ, cosh(R)eʳ` for `r ≤ R/3` and
//! the hyperbolic tube `sinh r, cosh r` for `r ≥ 2R/3`. Outside the transition window the
//! profiles are evaluated from the branch formulas directly.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{positive, Error, Result};
use crate::profiles::{BumpFunction, Interval, Jet, SmoothProfile, SAFETY_FACTOR};
use crate::search::{linspace, maximize};
use crate::warped::WarpedMetric;

/// Slack tolerated on the pointwise profile properties.
pub const PROPERTY_SLACK_TOL: f64 = 1e-12;
/// Largest jump tolerated between one-sided limits at a gluing radius.
pub const GLUING_TOL: f64 = 1e-9;
// Offset used to sample one-sided limits at the gluing radii.
const ONE_SIDED_OFFSET: f64 = 1e-11;

#[derive(Debug)]
struct DrillShape {
    radius: f64,
    sinh_radius: f64,
    cosh_radius: f64,
    eta: BumpFunction,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Branch {
    Cusp,
    Transition,
    Tube,
}

impl DrillShape {
    fn lower(&self) -> f64 {
        self.radius / 3.0
    }

    fn upper(&self) -> f64 {
        2.0 * self.radius / 3.0
    }

    fn branch(&self, r: f64) -> Branch {
        if r <= self.lower() {
            Branch::Cusp
        } else if r >= self.upper() {
            Branch::Tube
        } else {
            Branch::Transition
        }
    }

    fn chi(&self, r: f64) -> Jet {
        let j = self.eta.eval(r / self.radius);
        let k = 1.0 / self.radius;
        Jet::new(j.value, j.d1 * k, j.d2 * k * k)
    }

    /// Jets of φ and ψ from the interpolation formulas (valid for every `r > 0`).
    fn log_jets_interpolated(&self, r: f64) -> (Jet, Jet) {
        let c = self.chi(r);
        let (sh, ch) = (r.sinh(), r.cosh());
        let (coth_m1, tanh_m1) = (ch / sh - 1.0, sh / ch - 1.0);
        // log(sinh r / (sinh R eʳ)) and log(cosh r / (cosh R eʳ))
        let la = (sh / self.sinh_radius).ln() - r;
        let lb = (ch / self.cosh_radius).ln() - r;
        let phi = Jet::new(
            (1.0 - c.value) * (self.sinh_radius.ln() + r) + c.value * sh.ln(),
            c.d1 * la + c.value * coth_m1 + 1.0,
            c.d2 * la + 2.0 * c.d1 * coth_m1 - c.value / (sh * sh),
        );
        let psi = Jet::new(
            (1.0 - c.value) * (self.cosh_radius.ln() + r) + c.value * ch.ln(),
            c.d1 * lb + c.value * tanh_m1 + 1.0,
            c.d2 * lb + 2.0 * c.d1 * tanh_m1 + c.value / (ch * ch),
        );
        (phi, psi)
    }

    fn log_jets(&self, r: f64) -> (Jet, Jet) {
        match self.branch(r) {
            Branch::Cusp => (
                Jet::new(self.sinh_radius.ln() + r, 1.0, 0.0),
                Jet::new(self.cosh_radius.ln() + r, 1.0, 0.0),
            ),
            Branch::Tube => {
                let (sh, ch) = (r.sinh(), r.cosh());
                (
                    Jet::new(sh.ln(), ch / sh, -1.0 / (sh * sh)),
                    Jet::new(ch.ln(), sh / ch, 1.0 / (ch * ch)),
                )
            }
            Branch::Transition => self.log_jets_interpolated(r),
        }
    }

    fn warps(&self, r: f64) -> (Jet, Jet) {
        match self.branch(r) {
            Branch::Cusp => {
                let e = r.exp();
                let (a, b) = (self.sinh_radius * e, self.cosh_radius * e);
                (Jet::new(a, a, a), Jet::new(b, b, b))
            }
            Branch::Tube => {
                let (sh, ch) = (r.sinh(), r.cosh());
                (Jet::new(sh, ch, sh), Jet::new(ch, sh, ch))
            }
            Branch::Transition => {
                let (phi, psi) = self.log_jets_interpolated(r);
                (phi.exp(), psi.exp())
            }
        }
    }
}

/// The pair `a_drill, b_drill` for one tube radius, with the intermediate profiles.
#[derive(Debug, Clone)]
pub struct DrillProfilePair {
    pub radius: f64,
    pub a_drill: SmoothProfile,
    pub b_drill: SmoothProfile,
    pub phi: SmoothProfile,
    pub psi: SmoothProfile,
    pub chi: SmoothProfile,
    pub eta: BumpFunction,
    shape: Arc<DrillShape>,
}

fn check_unit_third_bump(eta: &BumpFunction, lo: f64, hi: f64) -> Result<()> {
    if (eta.x0 - lo).abs() > 1e-12 || (eta.x1 - hi).abs() > 1e-12 {
        return Err(Error::InvalidParameter {
            name: "eta",
            value: eta.x0,
            reason: "bump must transition on the prescribed window",
        });
    }
    Ok(())
}

pub fn build_drill_profiles(radius: f64, eta: &BumpFunction) -> Result<DrillProfilePair> {
    if !(radius > 0.0 && radius <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "R",
            value: radius,
            reason: "tube radius must lie in (0, 1]",
        });
    }
    check_unit_third_bump(eta, 1.0 / 3.0, 2.0 / 3.0)?;
    let shape = Arc::new(DrillShape {
        radius,
        sinh_radius: radius.sinh(),
        cosh_radius: radius.cosh(),
        eta: eta.clone(),
    });
    let line = Interval::real_line();
    let profile = |f: fn(&DrillShape, f64) -> Jet| {
        let s = Arc::clone(&shape);
        SmoothProfile::new(line, move |r| f(&s, r))
    };
    Ok(DrillProfilePair {
        radius,
        a_drill: profile(|s, r| s.warps(r).0),
        b_drill: profile(|s, r| s.warps(r).1),
        phi: profile(|s, r| s.log_jets(r).0),
        psi: profile(|s, r| s.log_jets(r).1),
        chi: profile(DrillShape::chi),
        eta: eta.clone(),
        shape,
    })
}

impl DrillProfilePair {
    /// The transition window `[R/3, 2R/3]`.
    pub fn transition(&self) -> (f64, f64) {
        (self.shape.lower(), self.shape.upper())
    }

    /// `(φ′)² + (ψ′)² + φ′ψ′ + φ″ + ψ″`, which equals `a″/a + b″/b + a′b′/(ab)`.
    fn curvature_sum(&self, r: f64) -> Result<f64> {
        let (lo, hi) = self.transition();
        if !(lo <= r && r <= hi) {
            return Err(Error::OutOfDomain { r, lo, hi });
        }
        let (p, q) = self.shape.log_jets_interpolated(r);
        Ok(p.d1 * p.d1 + q.d1 * q.d1 + p.d1 * q.d1 + p.d2 + q.d2)
    }
}

/// `|a″/a + b″/b + a′b′/(ab)|` on the transition window, the quantity bounded by `c/R²`.
pub fn drill_curvature_defect(p: &DrillProfilePair, r: f64) -> Result<f64> {
    p.curvature_sum(r).map(f64::abs)
}

/// `|a″/a + b″/b + a′b′/(ab) − 3|` on the transition window (deviation from hyperbolic).
pub fn drill_curvature_excess(p: &DrillProfilePair, r: f64) -> Result<f64> {
    p.curvature_sum(r).map(|s| (s - 3.0).abs())
}

/// Equispaced radial samples on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplingPlan {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl SamplingPlan {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        Interval::new(lo, hi)?;
        if points < 2 {
            return Err(Error::InvalidParameter {
                name: "points",
                value: points as f64,
                reason: "need at least two sample points",
            });
        }
        Ok(SamplingPlan { lo, hi, points })
    }

    /// `[−2, R + 1]` with `points` samples.
    pub fn drill(radius: f64, points: usize) -> Result<Self> {
        Self::new(-2.0, radius + 1.0, points)
    }

    pub(crate) fn samples_with(&self, extra: &[f64]) -> Vec<f64> {
        let mut v: Vec<f64> = linspace(self.lo, self.hi, self.points).collect();
        v.extend(
            extra
                .iter()
                .copied()
                .filter(|x| self.lo <= *x && *x <= self.hi),
        );
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

/// Pointwise verification of the drill profile properties on a sampling plan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DrillPropertyReport {
    pub radius: f64,
    pub samples: usize,
    /// Property (1): smallest sampled `a_drill` and `b_drill`.
    pub min_a: f64,
    pub min_b: f64,
    /// Property (2): largest `|a − sinh r|`, `|b − cosh r|` for `r ≥ 2R/3`.
    pub tube_branch_deviation: f64,
    /// Property (3): largest `|a − sinh(R)eʳ|`, `|b − cosh(R)eʳ|` for `r ≤ R/3`.
    pub cusp_branch_deviation: f64,
    /// Property (5): smallest `sinh(R)cosh(R)e^{2r} − a b` over all samples, and where.
    pub product_min_slack: f64,
    pub product_worst_r: f64,
    /// Property (5) restricted to samples with `r ≤ R`, the range entering the shell integral.
    pub product_min_slack_up_to_radius: f64,
    /// Largest relative gap between `a_drill` and `exp(φ)` (and `b_drill`, `exp(ψ)`).
    pub log_consistency: f64,
    /// Largest jump of `a, b, a′, b′, a″, b″` between one-sided limits at `R/3` and `2R/3`.
    pub gluing_max_jump: f64,
}

impl DrillPropertyReport {
    pub fn positivity_holds(&self) -> bool {
        self.min_a > 0.0 && self.min_b > 0.0
    }

    pub fn branches_hold(&self) -> bool {
        self.tube_branch_deviation <= PROPERTY_SLACK_TOL
            && self.cusp_branch_deviation <= PROPERTY_SLACK_TOL
    }

    pub fn product_bound_holds(&self) -> bool {
        self.product_min_slack >= -PROPERTY_SLACK_TOL
    }

    pub fn product_bound_holds_up_to_radius(&self) -> bool {
        self.product_min_slack_up_to_radius >= -PROPERTY_SLACK_TOL
    }

    pub fn gluing_holds(&self) -> bool {
        self.gluing_max_jump < GLUING_TOL
    }

    pub fn all_hold(&self) -> bool {
        self.positivity_holds()
            && self.branches_hold()
            && self.product_bound_holds()
            && self.gluing_holds()
    }
}

fn max_jump(p: &SmoothProfile, at: f64) -> f64 {
    let h = ONE_SIDED_OFFSET * at.abs().max(1.0);
    let (l, r) = (p.eval(at - h), p.eval(at + h));
    (l.value - r.value)
        .abs()
        .max((l.d1 - r.d1).abs())
        .max((l.d2 - r.d2).abs())
}

/// Check properties (1), (2), (3), (5) at every sample of `plan` (the gluing radii are added),
/// plus continuity of the profiles and their first two derivatives across the gluing radii.
/// Violations are recorded, never raised.
pub fn verify_drill_properties(p: &DrillProfilePair, plan: &SamplingPlan) -> DrillPropertyReport {
    let radius = p.radius;
    let (lo, hi) = p.transition();
    let (sr, cr) = (radius.sinh(), radius.cosh());
    let samples = plan.samples_with(&[lo, hi, radius]);

    let mut rep = DrillPropertyReport {
        radius,
        samples: samples.len(),
        min_a: f64::INFINITY,
        min_b: f64::INFINITY,
        tube_branch_deviation: 0.0,
        cusp_branch_deviation: 0.0,
        product_min_slack: f64::INFINITY,
        product_worst_r: f64::NAN,
        product_min_slack_up_to_radius: f64::INFINITY,
        log_consistency: 0.0,
        gluing_max_jump: 0.0,
    };
    for &r in &samples {
        let (a, b) = (p.a_drill.value(r), p.b_drill.value(r));
        rep.min_a = rep.min_a.min(a);
        rep.min_b = rep.min_b.min(b);
        if r >= hi {
            let dev = (a - r.sinh()).abs().max((b - r.cosh()).abs());
            rep.tube_branch_deviation = rep.tube_branch_deviation.max(dev);
        }
        if r <= lo {
            let e = r.exp();
            let dev = (a - sr * e).abs().max((b - cr * e).abs());
            rep.cusp_branch_deviation = rep.cusp_branch_deviation.max(dev);
        }
        let slack = sr * cr * (2.0 * r).exp() - a * b;
        if slack < rep.product_min_slack {
            rep.product_min_slack = slack;
            rep.product_worst_r = r;
        }
        if r <= radius {
            rep.product_min_slack_up_to_radius = rep.product_min_slack_up_to_radius.min(slack);
        }
        let ea = (p.phi.value(r).exp() - a).abs() / a;
        let eb = (p.psi.value(r).exp() - b).abs() / b;
        rep.log_consistency = rep.log_consistency.max(ea).max(eb);
    }
    for g in [lo, hi] {
        rep.gluing_max_jump = rep
            .gluing_max_jump
            .max(max_jump(&p.a_drill, g))
            .max(max_jump(&p.b_drill, g));
    }
    rep
}

/// Sup of the curvature sum over the transition window, in both readings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DrillDefectRow {
    pub radius: f64,
    /// `sup |a″/a + b″/b + a′b′/(ab)|` on `[R/3, 2R/3]`.
    pub sup_defect: f64,
    /// `sup |a″/a + b″/b + a′b′/(ab) − 3|` on `[R/3, 2R/3]`.
    pub sup_excess: f64,
    pub scaled_defect: f64,
    pub scaled_excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DrillConstantEstimate {
    pub rows: Vec<DrillDefectRow>,
    /// `(1 + safety) · max_R R² · sup_defect`.
    pub c_hat: f64,
    /// Same for the `− 3` reading.
    pub c_hat_excess: f64,
    /// `max / min` of `R² · sup_defect` over the grid.
    pub spread: f64,
    /// Every `|R² sup_defect − ĉ/(1 + safety)| / ĉ` is below 1.
    pub uniform: bool,
}

pub fn drill_defect_row(p: &DrillProfilePair, samples: usize) -> Result<DrillDefectRow> {
    let (lo, hi) = p.transition();
    let sum = |r: f64| p.curvature_sum(r).unwrap_or(f64::NAN);
    let d = maximize(|r| sum(r).abs(), lo, hi, samples)?;
    let e = maximize(|r| (sum(r) - 3.0).abs(), lo, hi, samples)?;
    let r2 = p.radius * p.radius;
    Ok(DrillDefectRow {
        radius: p.radius,
        sup_defect: d.value,
        sup_excess: e.value,
        scaled_defect: r2 * d.value,
        scaled_excess: r2 * e.value,
    })
}

/// Certify the constant in `|a″/a + b″/b + a′b′/(ab)| ≤ ĉ/R²` over a grid of radii.
pub fn estimate_drill_constant(
    eta: &BumpFunction,
    radius_grid: &[f64],
    samples: usize,
) -> Result<DrillConstantEstimate> {
    if radius_grid.is_empty() {
        return Err(Error::InvalidParameter {
            name: "R_grid",
            value: 0.0,
            reason: "radius grid is empty",
        });
    }
    if samples < 1000 {
        return Err(Error::InvalidParameter {
            name: "samples",
            value: samples as f64,
            reason: "at least 1000 samples per radius are required",
        });
    }
    let rows = radius_grid
        .iter()
        .map(|&r| build_drill_profiles(r, eta).and_then(|p| drill_defect_row(&p, samples)))
        .collect::<Result<Vec<_>>>()?;
    let max_d = rows.iter().map(|r| r.scaled_defect).fold(0.0, f64::max);
    let min_d = rows
        .iter()
        .map(|r| r.scaled_defect)
        .fold(f64::INFINITY, f64::min);
    let max_e = rows.iter().map(|r| r.scaled_excess).fold(0.0, f64::max);
    let c_hat = (1.0 + SAFETY_FACTOR) * max_d;
    let uniform = rows
        .iter()
        .all(|r| ((r.scaled_defect - max_d) / c_hat).abs() < 1.0);
    Ok(DrillConstantEstimate {
        rows,
        c_hat,
        c_hat_excess: (1.0 + SAFETY_FACTOR) * max_e,
        spread: max_d / min_d,
        uniform,
    })
}

/// Metric `dr² + 4π² a_drill² dθ² + ℓ² b_drill² dy²` on the `[r0, r1]`-shell.
pub fn shell_metric(p: &DrillProfilePair, ell: f64, r0: f64, r1: f64) -> Result<WarpedMetric> {
    let ell = positive("ell", ell)?;
    let (lo, hi) = p.transition();
    Ok(WarpedMetric::new(
        r0,
        r1,
        p.a_drill.scaled(TAU),
        p.b_drill.scaled(ell),
        1.0,
        1.0,
    )?
    .with_breakpoints(vec![lo, hi]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShellIntegral {
    pub radius: f64,
    pub ell: f64,
    pub eps: f64,
    /// `∫ |S|^{3/2} dvol` over the `[ε, R]`-shell.
    pub value: f64,
    pub volume: f64,
    /// `(2ĉ)^{3/2} π ℓ sinh(R)cosh(R)(e^{2R} − e^{2ε}) / R³`.
    pub bound: f64,
}

impl ShellIntegral {
    pub fn slack(&self) -> f64 {
        self.bound - self.value
    }

    pub fn holds(&self) -> bool {
        self.value <= self.bound
    }
}

pub fn shell_scalar_integral(
    p: &DrillProfilePair,
    ell: f64,
    eps: f64,
    c_hat: f64,
    tol: f64,
) -> Result<ShellIntegral> {
    let radius = p.radius;
    if !(eps >= 0.0 && eps < radius / 3.0) {
        return Err(Error::InvalidParameter {
            name: "eps",
            value: eps,
            reason: "inner shell radius must lie in [0, R/3)",
        });
    }
    let c_hat = positive("c_hat", c_hat)?;
    let g = shell_metric(p, ell, eps, radius)?;
    let value = g.abs_scalar_power_integral(tol)?;
    let volume = g.volume(tol)?;
    let bound = (2.0 * c_hat).powf(1.5)
        * PI
        * ell
        * radius.sinh()
        * radius.cosh()
        * ((2.0 * radius).exp() - (2.0 * eps).exp())
        / radius.powi(3);
    Ok(ShellIntegral {
        radius,
        ell,
        eps,
        value,
        volume,
        bound,
    })
}
