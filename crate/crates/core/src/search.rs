//! Dense-sampling maximum search with golden-section refinement.

use crate::error::{Error, Result};

const GOLDEN_ITERATIONS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Peak {
    pub at: f64,
    pub value: f64,
}

/// Maximum of `f` over `[lo, hi]` from `samples + 1` equispaced points, then refined by golden
/// section on the bracket around the best sample. Non-finite samples are reported as overflow.
pub(crate) fn maximize<F>(f: F, lo: f64, hi: f64, samples: usize) -> Result<Peak>
where
    F: Fn(f64) -> f64,
{
    let samples = samples.max(2);
    let h = (hi - lo) / samples as f64;
    let mut best = Peak {
        at: lo,
        value: f64::NEG_INFINITY,
    };
    let mut best_idx = 0;
    for i in 0..=samples {
        let x = if i == samples { hi } else { lo + i as f64 * h };
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::NumericOverflow { at: x });
        }
        if v > best.value {
            best = Peak { at: x, value: v };
            best_idx = i;
        }
    }

    let mut a = lo + best_idx.saturating_sub(1) as f64 * h;
    let mut b = (lo + (best_idx + 1) as f64 * h).min(hi);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_ITERATIONS {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v.is_finite() && v > best.value {
            best = Peak { at: x, value: v };
        }
    }
    Ok(best)
}

/// `n` equispaced points covering `[lo, hi]` including both ends.
pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let n = n.max(2);
    let h = (hi - lo) / (n - 1) as f64;
    (0..n).map(move |i| if i == n - 1 { hi } else { lo + i as f64 * h })
}
