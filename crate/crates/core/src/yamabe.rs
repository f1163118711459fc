//! Einstein–Hilbert functional, conformal change of scalar curvature and the Hölder lower
//! bound for radial conformal factors on warped regions.
//!
//! Regions here have boundary, so nothing relies on integrating by parts. Only pointwise
//! identities and Hölder's inequality are asserted.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{positive, Error, Result};
use crate::profiles::{Interval, Jet, SmoothProfile};
use crate::search::linspace;
use crate::warped::{curvature_from_jets, WarpedMetric};

const POSITIVITY_PROBES: usize = 257;

/// Relative slack below which a Hölder or quotient check is reported as failed.
pub const RELATIVE_SLACK_TOL: f64 = 1e-9;

/// A radial conformal factor `u > 0`, giving the metric `u⁴g`.
#[derive(Debug, Clone)]
pub struct ConformalFactor {
    u: SmoothProfile,
}

impl ConformalFactor {
    /// Checks positivity on `[lo, hi]` at a probe grid including both ends.
    pub fn new(u: SmoothProfile, lo: f64, hi: f64) -> Result<Self> {
        Interval::new(lo, hi)?;
        for r in linspace(lo, hi, POSITIVITY_PROBES) {
            let v = u.value(r);
            if !(v > 0.0) {
                return Err(Error::InvalidConformalFactor { r, value: v });
            }
        }
        Ok(ConformalFactor { u })
    }

    /// Factor that is positive for every `r`.
    pub fn constant(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidConformalFactor {
                r: 0.0,
                value: lambda,
            });
        }
        Ok(ConformalFactor {
            u: SmoothProfile::constant(lambda),
        })
    }

    pub fn profile(&self) -> &SmoothProfile {
        &self.u
    }

    pub fn eval(&self, r: f64) -> Jet {
        self.u.eval(r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EinsteinHilbert {
    pub total_scalar: f64,
    pub volume: f64,
    /// `∫S dvol / vol^{1/3}`.
    pub functional: f64,
}

pub fn einstein_hilbert(g: &WarpedMetric, tol: f64) -> Result<EinsteinHilbert> {
    let volume = g.volume(tol)?;
    if !(volume > 0.0) {
        return Err(Error::DegenerateRegion);
    }
    let total_scalar = g.total_scalar(tol)?;
    Ok(EinsteinHilbert {
        total_scalar,
        volume,
        functional: total_scalar / volume.cbrt(),
    })
}

fn conformal_scalar_from_jets(r: f64, a: Jet, b: Jet, u: Jet) -> f64 {
    let s = curvature_from_jets(r, a, b).scalar;
    let laplacian = u.d2 + (a.d1 / a.value + b.d1 / b.value) * u.d1;
    (-8.0 * laplacian + s * u.value) / u.value.powi(5)
}

/// Scalar curvature of `u⁴g` at `r`: `u⁻⁵(−8Δu + S u)` with the radial Laplacian
/// `Δu = u″ + (a′/a + b′/b)u′`.
pub fn conformal_scalar(g: &WarpedMetric, u: &ConformalFactor, r: f64) -> Result<f64> {
    let uj = u.eval(r);
    if !(uj.value > 0.0) {
        return Err(Error::InvalidConformalFactor { r, value: uj.value });
    }
    // validates r and the axis
    g.sectional_curvatures(r)?;
    Ok(conformal_scalar_from_jets(
        r,
        g.a().eval(r),
        g.b().eval(r),
        uj,
    ))
}

/// Both sides of `∫S u² dvol ≥ −(∫|S|^{3/2} dvol)^{2/3} (∫u⁶ dvol)^{1/3}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderCheck {
    /// `∫S u² dvol`.
    pub lhs: f64,
    /// `−(∫|S|^{3/2})^{2/3} (∫u⁶)^{1/3}`.
    pub rhs: f64,
    pub abs_scalar_power: f64,
    pub u6: f64,
}

impl HolderCheck {
    pub fn slack(&self) -> f64 {
        self.lhs - self.rhs
    }

    /// Slack relative to `max(1, |rhs|)`.
    pub fn relative_slack(&self) -> f64 {
        self.slack() / self.rhs.abs().max(1.0)
    }

    pub fn holds(&self) -> bool {
        self.relative_slack() >= -RELATIVE_SLACK_TOL
    }
}

fn u_power_integral(g: &WarpedMetric, u: &ConformalFactor, tol: f64) -> Result<f64> {
    g.integrate_radial(|r, _, _| u.eval(r).value.powi(6), tol)
}

pub fn holder_lower_bound_check(
    g: &WarpedMetric,
    u: &ConformalFactor,
    tol: f64,
) -> Result<HolderCheck> {
    let lhs = g.integrate_radial(
        |r, a, b| curvature_from_jets(r, a, b).scalar * u.eval(r).value.powi(2),
        tol,
    )?;
    let abs_scalar_power = g.abs_scalar_power_integral(tol)?;
    let u6 = u_power_integral(g, u, tol)?;
    Ok(HolderCheck {
        lhs,
        rhs: -abs_scalar_power.powf(2.0 / 3.0) * u6.cbrt(),
        abs_scalar_power,
        u6,
    })
}

/// Yamabe quotient of a radial `u` together with the quantities it is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YamabeQuotient {
    /// `∫(8u′² + S u²) dvol / (∫u⁶ dvol)^{1/3}`.
    pub quotient: f64,
    /// Same quotient without the gradient term.
    pub without_gradient: f64,
    /// `−(∫|S|^{3/2} dvol)^{2/3}`.
    pub lower_bound: f64,
}

impl YamabeQuotient {
    pub fn holds(&self) -> bool {
        let scale = self.lower_bound.abs().max(1.0);
        self.quotient - self.lower_bound >= -RELATIVE_SLACK_TOL * scale
            && self.quotient - self.without_gradient >= -RELATIVE_SLACK_TOL * scale
    }
}

pub fn yamabe_quotient(g: &WarpedMetric, u: &ConformalFactor, tol: f64) -> Result<YamabeQuotient> {
    let gradient = g.integrate_radial(|r, _, _| 8.0 * u.eval(r).d1.powi(2), tol)?;
    let potential = g.integrate_radial(
        |r, a, b| curvature_from_jets(r, a, b).scalar * u.eval(r).value.powi(2),
        tol,
    )?;
    let norm = u_power_integral(g, u, tol)?.cbrt();
    if !(norm > 0.0) {
        return Err(Error::DegenerateRegion);
    }
    Ok(YamabeQuotient {
        quotient: (gradient + potential) / norm,
        without_gradient: potential / norm,
        lower_bound: -g.abs_scalar_power_integral(tol)?.powf(2.0 / 3.0),
    })
}

/// `−6 vol^{2/3}`, the sigma invariant of a closed hyperbolic 3-manifold of volume `vol`.
pub fn sigma_hyperbolic(vol: f64) -> Result<f64> {
    Ok(-6.0 * positive("vol", vol)?.powf(2.0 / 3.0))
}

/// A polynomial factor `1 + Σ c_k s^k` in the normalized coordinate `s = (r − r0)/(r1 − r0)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolynomialFactor {
    pub r0: f64,
    pub r1: f64,
    /// `c_1, …, c_4`.
    pub coefficients: [f64; 4],
}

impl PolynomialFactor {
    pub fn profile(&self) -> SmoothProfile {
        let (r0, w) = (self.r0, self.r1 - self.r0);
        let c = self.coefficients;
        SmoothProfile::new(Interval::real_line(), move |r| {
            let s = (r - r0) / w;
            let (mut v, mut d1, mut d2) = (1.0, 0.0, 0.0);
            for (i, &ck) in c.iter().enumerate() {
                let k = (i + 1) as i32;
                v += ck * s.powi(k);
                d1 += ck * k as f64 * s.powi(k - 1);
                if k >= 2 {
                    d2 += ck * (k * (k - 1)) as f64 * s.powi(k - 2);
                }
            }
            Jet::new(v, d1 / w, d2 / (w * w))
        })
    }

    pub fn factor(&self) -> Result<ConformalFactor> {
        ConformalFactor::new(self.profile(), self.r0, self.r1)
    }
}

/// Coefficient range of the seeded corpus.
pub const CORPUS_MAX_COEFFICIENT: f64 = 0.3;

/// `n` seeded factors `1 + Σ_{k≤4} c_k s^k` with `c_k` uniform in `[0, 0.3]`.
/// Positive on `[r0, r1]` since `s ∈ [0, 1]` there.
pub fn conformal_corpus(seed: u64, n: usize, r0: f64, r1: f64) -> Result<Vec<PolynomialFactor>> {
    Interval::new(r0, r1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| PolynomialFactor {
            r0,
            r1,
            coefficients: std::array::from_fn(|_| rng.gen_range(0.0..=CORPUS_MAX_COEFFICIENT)),
        })
        .collect())
}
