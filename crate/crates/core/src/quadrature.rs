//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.
//!
//! The panel with the largest error estimate is bisected until the summed estimate meets
//! `tol · max(1, |I|)`. Ties are resolved by panel order, so the subdivision sequence and the
//! result are reproducible.

use serde::Serialize;

use crate::error::{Error, Result};

/// Panel budget used by [`quadrature_1d`].
pub const DEFAULT_MAX_PANELS: usize = 20_000;

// Tabulated to 30 digits; the compiler rounds to the nearest double.

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    estimate: f64,
    error: f64,
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.abs() * WGK[7];
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let (f1, f2) = (f(centre - dx), f(centre + dx));
        kronrod += w * (f1 + f2);
        abs_sum += w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let estimate = kronrod * half;
    let roundoff = 50.0 * f64::EPSILON * abs_sum * half.abs();
    let error = ((kronrod - gauss) * half).abs().max(roundoff);
    Panel {
        a,
        b,
        estimate,
        error,
    }
}

/// Integral estimate together with its error bound and the number of panels used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_bound: f64,
    pub panels: usize,
}

/// Integrate `f` over `[lo, hi]` to `tol · max(1, |I|)`.
pub fn quadrature_1d<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    adaptive_quadrature(&f, &[lo, hi], tol, DEFAULT_MAX_PANELS).map(|r| r.value)
}

/// Integrate `f` over the union of consecutive intervals given by the strictly increasing
/// `breaks`. Interior breakpoints mark where the integrand changes character (for example the
/// ends of a transition window).
pub fn adaptive_quadrature<F: Fn(f64) -> f64>(
    f: &F,
    breaks: &[f64],
    tol: f64,
    max_panels: usize,
) -> Result<QuadratureResult> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
            reason: "quadrature tolerance must be positive",
        });
    }
    if breaks.len() < 2 || breaks.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "breaks",
            value: breaks.len() as f64,
            reason: "need at least two finite breakpoints",
        });
    }
    if let Some(w) = breaks.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInterval { lo: w[0], hi: w[1] });
    }

    let mut panels: Vec<Panel> = breaks
        .windows(2)
        .map(|w| gauss_kronrod(f, w[0], w[1]))
        .collect();

    loop {
        let estimate: f64 = panels.iter().map(|p| p.estimate).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if !estimate.is_finite() || !error.is_finite() {
            return Err(Error::QuadratureFailure {
                estimate,
                error_bound: error,
            });
        }
        if error <= tol * estimate.abs().max(1.0) {
            return Ok(QuadratureResult {
                value: estimate,
                error_bound: error,
                panels: panels.len(),
            });
        }
        if panels.len() >= max_panels {
            return Err(Error::QuadratureFailure {
                estimate,
                error_bound: error,
            });
        }
        let worst = panels.iter().enumerate().fold(0, |best, (i, p)| {
            if p.error > panels[best].error {
                i
            } else {
                best
            }
        });
        let Panel { a, b, .. } = panels[worst];
        let mid = 0.5 * (a + b);
        if !(a < mid && mid < b) {
            // cannot bisect further at this precision
            return Err(Error::QuadratureFailure {
                estimate,
                error_bound: error,
            });
        }
        panels[worst] = gauss_kronrod(f, a, mid);
        panels.insert(worst + 1, gauss_kronrod(f, mid, b));
    }
}
