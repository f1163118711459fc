//! Warped-product metrics `dr² + a(r)²dθ² + b(r)²dy²`, their curvatures, and radial integrals
//! over the region `[r0, r1] × S¹ × [0, y_extent]`.
//!
//! All constant angular factors live in `a` and `b`; `theta_period` and `y_extent` are the
//! coordinate lengths of the two flat factors.

use serde::Serialize;

use crate::error::{positive, Error, Result};
use crate::profiles::{Interval, Jet, SmoothProfile};
use crate::search::linspace;

pub use crate::quadrature::{adaptive_quadrature, quadrature_1d, QuadratureResult};

const POSITIVITY_PROBES: usize = 257;

#[derive(Debug, Clone)]
pub struct WarpedMetric {
    r0: f64,
    r1: f64,
    a: SmoothProfile,
    b: SmoothProfile,
    theta_period: f64,
    y_extent: f64,
    breakpoints: Vec<f64>,
}

/// Sectional curvatures of the coordinate planes and the scalar curvature at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureSample {
    pub r: f64,
    pub k_r_theta: f64,
    pub k_r_y: f64,
    pub k_theta_y: f64,
    pub scalar: f64,
}

impl WarpedMetric {
    /// Checks `r0 < r1`, positive periods, and `a, b > 0` on a probe grid of the open interval.
    pub fn new(
        r0: f64,
        r1: f64,
        a: SmoothProfile,
        b: SmoothProfile,
        theta_period: f64,
        y_extent: f64,
    ) -> Result<Self> {
        let span = Interval::new(r0, r1)?;
        if !span.is_bounded() {
            return Err(Error::InvalidInterval { lo: r0, hi: r1 });
        }
        let theta_period = positive("theta_period", theta_period)?;
        let y_extent = positive("y_extent", y_extent)?;
        for r in linspace(r0, r1, POSITIVITY_PROBES + 2)
            .skip(1)
            .take(POSITIVITY_PROBES)
        {
            if !(a.value(r) > 0.0 && b.value(r) > 0.0) {
                return Err(Error::NonPositiveWarp { r });
            }
        }
        Ok(WarpedMetric {
            r0,
            r1,
            a,
            b,
            theta_period,
            y_extent,
            breakpoints: Vec::new(),
        })
    }

    /// Radii strictly inside `(r0, r1)` where quadrature should place a panel boundary.
    pub fn with_breakpoints(mut self, mut points: Vec<f64>) -> Self {
        points.retain(|&p| p > self.r0 && p < self.r1);
        points.sort_by(f64::total_cmp);
        points.dedup();
        self.breakpoints = points;
        self
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn a(&self) -> &SmoothProfile {
        &self.a
    }

    pub fn b(&self) -> &SmoothProfile {
        &self.b
    }

    pub fn theta_period(&self) -> f64 {
        self.theta_period
    }

    pub fn y_extent(&self) -> f64 {
        self.y_extent
    }

    /// Area of the flat torus `{r} × S¹ × [0, y_extent]`.
    pub fn slice_area(&self, r: f64) -> f64 {
        self.a.value(r) * self.b.value(r) * self.theta_period * self.y_extent
    }

    fn jets_at(&self, r: f64) -> Result<(Jet, Jet)> {
        if !(r > self.r0 && r < self.r1) {
            return Err(Error::OutOfDomain {
                r,
                lo: self.r0,
                hi: self.r1,
            });
        }
        let (a, b) = (self.a.eval(r), self.b.eval(r));
        if a.value == 0.0 || b.value == 0.0 {
            return Err(Error::SingularAxis { r });
        }
        Ok((a, b))
    }

    pub fn sectional_curvatures(&self, r: f64) -> Result<CurvatureSample> {
        let (a, b) = self.jets_at(r)?;
        Ok(curvature_from_jets(r, a, b))
    }

    pub fn scalar_curvature(&self, r: f64) -> Result<f64> {
        self.sectional_curvatures(r).map(|k| k.scalar)
    }

    fn breaks(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.breakpoints.len() + 2);
        v.push(self.r0);
        v.extend_from_slice(&self.breakpoints);
        v.push(self.r1);
        v
    }

    /// `theta_period · y_extent · ∫ w(r) a(r) b(r) dr` for a radial weight built from the jets.
    /// Quadrature nodes are interior, so the weight is never evaluated on the boundary.
    pub fn integrate_radial<W>(&self, weight: W, tol: f64) -> Result<f64>
    where
        W: Fn(f64, Jet, Jet) -> f64,
    {
        let f = |r: f64| {
            let (a, b) = (self.a.eval(r), self.b.eval(r));
            weight(r, a, b) * a.value * b.value
        };
        let q = adaptive_quadrature(
            &f,
            &self.breaks(),
            tol,
            crate::quadrature::DEFAULT_MAX_PANELS,
        )?;
        Ok(self.theta_period * self.y_extent * q.value)
    }

    pub fn volume(&self, tol: f64) -> Result<f64> {
        self.integrate_radial(|_, _, _| 1.0, tol)
    }

    /// `∫ (|S|/6)^{3/2} dvol`.
    pub fn scalar_power_integral(&self, tol: f64) -> Result<f64> {
        self.integrate_radial(
            |r, a, b| (curvature_from_jets(r, a, b).scalar.abs() / 6.0).powf(1.5),
            tol,
        )
    }

    /// `∫ |S|^{3/2} dvol`.
    pub fn abs_scalar_power_integral(&self, tol: f64) -> Result<f64> {
        self.integrate_radial(
            |r, a, b| curvature_from_jets(r, a, b).scalar.abs().powf(1.5),
            tol,
        )
    }

    /// `∫ S dvol`.
    pub fn total_scalar(&self, tol: f64) -> Result<f64> {
        self.integrate_radial(|r, a, b| curvature_from_jets(r, a, b).scalar, tol)
    }
}

pub(crate) fn curvature_from_jets(r: f64, a: Jet, b: Jet) -> CurvatureSample {
    let k_r_theta = -a.d2 / a.value;
    let k_r_y = -b.d2 / b.value;
    let k_theta_y = -(a.d1 * b.d1) / (a.value * b.value);
    CurvatureSample {
        r,
        k_r_theta,
        k_r_y,
        k_theta_y,
        scalar: 2.0 * (k_r_theta + k_r_y + k_theta_y),
    }
}

/// Metric of a hyperbolic tube of radius `radius` around a geodesic of length `ell`, in Fermi
/// coordinates: `a = 2π sinh r`, `b = ℓ cosh r` on `[0, radius]`.
pub fn hyperbolic_tube(ell: f64, radius: f64) -> Result<WarpedMetric> {
    let ell = positive("ell", ell)?;
    let radius = positive("R", radius)?;
    WarpedMetric::new(
        0.0,
        radius,
        SmoothProfile::sinh().scaled(std::f64::consts::TAU),
        SmoothProfile::cosh().scaled(ell),
        1.0,
        1.0,
    )
}

/// Closed-form volume `π ℓ sinh²R` of [`hyperbolic_tube`].
pub fn hyperbolic_tube_volume(ell: f64, radius: f64) -> f64 {
    std::f64::consts::PI * ell * radius.sinh().powi(2)
}
