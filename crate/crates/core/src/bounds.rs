//! Volume-change bounds for drilling a short geodesic and for Dehn filling a cusp, assembled
//! from the certified constants.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{positive, Error, Result};
use crate::search::linspace;

/// Where a constant came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// A published rounded value, kept for comparison only.
    Published,
    /// Computed here by sampling or quadrature.
    DerivedByOracle,
    /// Passed in by the caller.
    UserSupplied,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedConstant {
    pub name: String,
    pub value: f64,
    pub provenance: Provenance,
}

impl NamedConstant {
    pub fn new(name: &str, value: f64, provenance: Provenance) -> Self {
        NamedConstant {
            name: name.to_owned(),
            value,
            provenance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Flag {
    pub name: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: String,
    pub inputs: Vec<(String, f64)>,
    pub constants: Vec<NamedConstant>,
    pub bound_value: f64,
    /// `bound_value − vol_M`, negative for a deficit.
    pub increment: f64,
    /// Simplified closed form of the same bound, where one exists.
    pub simplified_value: Option<f64>,
    pub flags: Vec<Flag>,
    pub warnings: Vec<String>,
}

impl BoundReport {
    // The increment is stored as computed, not recovered from `bound_value − vol`, which
    // would lose every digit once it falls below the rounding of `vol`.
    fn new(kind: &str, inputs: &[(&str, f64)], vol: f64, increment: f64) -> Self {
        BoundReport {
            kind: kind.to_owned(),
            inputs: inputs.iter().map(|(n, v)| ((*n).to_owned(), *v)).collect(),
            constants: Vec::new(),
            bound_value: vol + increment,
            increment,
            simplified_value: None,
            flags: Vec::new(),
            warnings: Vec::new(),
        }
    }

    fn flag(&mut self, name: &str, holds: bool) {
        self.flags.push(Flag {
            name: name.to_owned(),
            holds,
        });
    }

    pub fn input(&self, name: &str) -> Option<f64> {
        self.inputs.iter().find(|(n, _)| n == name).map(|p| p.1)
    }

    pub fn constant(&self, name: &str) -> Option<&NamedConstant> {
        self.constants.iter().find(|c| c.name == name)
    }

    /// Change the provenance label of a named constant, for callers that derived it.
    pub fn relabel(&mut self, name: &str, provenance: Provenance) {
        for c in self.constants.iter_mut().filter(|c| c.name == name) {
            c.provenance = provenance;
        }
    }

    pub fn all_flags_hold(&self) -> bool {
        self.flags.iter().all(|f| f.holds)
    }
}

/// Published roundings of the two geometry suprema.
pub const PUBLISHED_C1: f64 = 11.59;
pub const PUBLISHED_C2: f64 = 1.81;

/// Largest admissible tube radius after clamping.
pub const RADIUS_CLAMP: f64 = 1.0 - 1e-6;

const GEOMETRY_SAMPLES: usize = 10_000;

/// `sinh(R)cosh(R)(e^{2R} − 1)/R²`.
pub fn geometry_term_c1(radius: f64) -> f64 {
    radius.sinh() * radius.cosh() * (2.0 * radius).exp_m1() / (radius * radius)
}

/// `sinh(R)cosh(R)/R`.
pub fn geometry_term_c2(radius: f64) -> f64 {
    radius.sinh() * radius.cosh() / radius
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometryConstants {
    pub c1_geom: f64,
    pub c2_geom: f64,
    /// Both terms were non-decreasing on the sample grid, so the suprema sit at `R = 1`.
    pub monotone: bool,
}

/// Suprema over `R ∈ (0, 1]` of the two geometry terms. Monotonicity is checked on a grid
/// and the supremum is taken as the sampled maximum.
pub fn drill_geometry_constants() -> GeometryConstants {
    let mut monotone = true;
    let (mut c1, mut c2) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for r in linspace(0.0, 1.0, GEOMETRY_SAMPLES + 1).skip(1) {
        let (t1, t2) = (geometry_term_c1(r), geometry_term_c2(r));
        monotone &= t1 >= c1 && t2 >= c2;
        c1 = c1.max(t1);
        c2 = c2.max(t2);
    }
    GeometryConstants {
        c1_geom: c1,
        c2_geom: c2,
        monotone,
    }
}

fn curvature_weight(c_hat: f64) -> f64 {
    (2.0 * c_hat / 6.0).powf(1.5)
}

/// Upper bound on the volume after drilling a geodesic of length `ℓ` with an embedded tube of
/// radius `R ∈ (0, 1)`:
///
/// ```text
/// vol + π(ℓ/R)((2ĉ)^{3/2}/6^{3/2} · sinh R cosh R (e^{2R} − 1)/R² + sinh R cosh R/R)
/// ```
///
/// The simplified value replaces both `R`-dependent terms by their suprema.
pub fn drill_volume_bound(vol: f64, ell: f64, radius: f64, c_hat: f64) -> Result<BoundReport> {
    let vol = positive("vol", vol)?;
    if !(ell.is_finite() && ell >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "ell",
            value: ell,
            reason: "must be finite and non-negative",
        });
    }
    let c_hat = positive("c_hat", c_hat)?;
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::HypothesisViolation(format!(
            "tube radius R = {radius} must lie in (0, 1)"
        )));
    }
    let k = curvature_weight(c_hat);
    let increment = PI * (ell / radius) * (k * geometry_term_c1(radius) + geometry_term_c2(radius));
    let geo = drill_geometry_constants();
    let big_c = PI * (k * geo.c1_geom + geo.c2_geom);

    let mut rep = BoundReport::new(
        "drill",
        &[("vol", vol), ("ell", ell), ("R", radius)],
        vol,
        increment,
    );
    rep.constants = vec![
        NamedConstant::new("c_hat", c_hat, Provenance::UserSupplied),
        NamedConstant::new("c1_geom", geo.c1_geom, Provenance::DerivedByOracle),
        NamedConstant::new("c2_geom", geo.c2_geom, Provenance::DerivedByOracle),
        NamedConstant::new("C", big_c, Provenance::DerivedByOracle),
    ];
    rep.simplified_value = Some(vol + big_c * ell / radius);
    rep.flag("R in (0,1)", true);
    rep.flag("geometry terms monotone", geo.monotone);
    rep.flag(
        "increment positive when ell > 0",
        ell == 0.0 || rep.increment > 0.0,
    );
    Ok(rep)
}

/// Bound for the shortest geodesic: `ℓ = 2·inj`, tube radius `max(ℓ/4, R_floor)` clamped
/// below 1.
pub fn shortest_geodesic_bound(
    vol: f64,
    inj: f64,
    radius_floor: f64,
    c_hat: f64,
) -> Result<BoundReport> {
    let inj = positive("inj", inj)?;
    let radius_floor = positive("R_floor", radius_floor)?;
    let ell = 2.0 * inj;
    let natural = (ell / 4.0).max(radius_floor);
    let radius = natural.min(RADIUS_CLAMP);
    let mut rep = drill_volume_bound(vol, ell, radius, c_hat)?;
    rep.kind = "shortest".to_owned();
    rep.inputs.push(("inj".to_owned(), inj));
    rep.inputs.push(("R_floor".to_owned(), radius_floor));
    if natural > radius {
        rep.warnings.push(format!(
            "tube radius {natural} clamped to {radius}; the bound uses the smaller tube"
        ));
    }
    Ok(rep)
}

fn check_fill_inputs(vol: f64, area: f64) -> Result<(f64, f64)> {
    let vol = positive("vol", vol)?;
    if !(area.is_finite() && area >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "A",
            value: area,
            reason: "must be finite and non-negative",
        });
    }
    Ok((vol, area))
}

/// Deficit `(A/2)(π²/ℓ² − ĉπ⁴/ℓ⁴ + ĉπ⁶/ℓ⁶)`.
pub fn fill_deficit(area: f64, ell: f64, c_hat: f64) -> f64 {
    let x = (PI / ell).powi(2);
    0.5 * area * (x - c_hat * x * x + c_hat * x * x * x)
}

/// Deficit `(A/2)(π²/ℓ²)(1 − cπ²/ℓ²)`.
pub fn fill_deficit_theorem_form(area: f64, ell: f64, c: f64) -> f64 {
    let x = (PI / ell).powi(2);
    0.5 * area * x * (1.0 - c * x)
}

/// Upper bound `vol − (A/2)(π²/ℓ² − ĉπ⁴/ℓ⁴ + ĉπ⁶/ℓ⁶)` for the volume after filling along a
/// slope of flat length `ℓ > 2π` on a cusp torus of area `A`.
pub fn fill_volume_bound(vol: f64, area: f64, ell: f64, c_hat: f64) -> Result<BoundReport> {
    let (vol, area) = check_fill_inputs(vol, area)?;
    let c_hat = positive("c_hat", c_hat)?;
    if !(ell > 2.0 * PI) || !ell.is_finite() {
        return Err(Error::HypothesisViolation(format!(
            "slope length ell = {ell} must exceed 2π"
        )));
    }
    let deficit = fill_deficit(area, ell, c_hat);
    let mut rep = BoundReport::new(
        "fill",
        &[("vol", vol), ("A", area), ("ell", ell)],
        vol,
        -deficit,
    );
    rep.constants = vec![NamedConstant::new("c_hat", c_hat, Provenance::UserSupplied)];
    rep.flag("ell > 2pi", true);
    rep.flag("deficit positive", area == 0.0 || deficit > 0.0);
    Ok(rep)
}

/// The weaker closed form `vol − (A/2)(π²/ℓ²)(1 − cπ²/ℓ²)`, valid for `ℓ > √c·π`.
/// The report also records that the full deficit dominates this one for the same `c`.
pub fn fill_bound_theorem_form(vol: f64, area: f64, ell: f64, c: f64) -> Result<BoundReport> {
    let (vol, area) = check_fill_inputs(vol, area)?;
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "c",
            value: c,
            reason: "must be finite and non-negative",
        });
    }
    if !(ell > c.sqrt() * PI) || !ell.is_finite() {
        return Err(Error::HypothesisViolation(format!(
            "slope length ell = {ell} must exceed sqrt(c)·π = {}",
            c.sqrt() * PI
        )));
    }
    let deficit = fill_deficit_theorem_form(area, ell, c);
    let mut rep = BoundReport::new(
        "fill-theorem",
        &[("vol", vol), ("A", area), ("ell", ell)],
        vol,
        -deficit,
    );
    rep.constants = vec![NamedConstant::new("c", c, Provenance::UserSupplied)];
    rep.simplified_value = Some(vol - fill_deficit(area, ell, c));
    rep.flag("ell > sqrt(c) pi", true);
    rep.flag("deficit positive", area == 0.0 || deficit > 0.0);
    rep.flag(
        "full deficit dominates",
        fill_deficit(area, ell, c) >= deficit,
    );
    Ok(rep)
}
