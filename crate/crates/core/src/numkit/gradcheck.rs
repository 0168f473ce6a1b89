//! Central finite differences, used to verify analytic gradients.

use alloc::vec::Vec;

use crate::numkit::MlpState;

pub const DEFAULT_STEP: f64 = 1e-5;

/// `|a − n| / max(|a|, |n|, floor)`.
///
/// The floor keeps gradients that are zero up to round-off from being judged
/// relatively; below it the comparison is effectively absolute.
pub fn relative_error(analytic: f64, numeric: f64, floor: f64) -> f64 {
    let denom = analytic.abs().max(numeric.abs()).max(floor);
    (analytic - numeric).abs() / denom
}

/// Differentiates `f` with respect to every parameter of the network picked
/// out by `select`, perturbing one entry at a time on a scratch copy.
pub fn numeric_gradient<T: Clone>(
    base: &T,
    select: impl Fn(&mut T) -> &mut MlpState,
    f: impl Fn(&T) -> f64,
    step: f64,
) -> Vec<f64> {
    let mut probe = base.clone();
    let count = select(&mut probe).param_count();
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let orig = select(&mut probe).param(i);
        select(&mut probe).set_param(i, orig + step);
        let up = f(&probe);
        select(&mut probe).set_param(i, orig - step);
        let down = f(&probe);
        select(&mut probe).set_param(i, orig);
        out.push((up - down) / (2.0 * step));
    }
    out
}

/// Largest relative error between two gradient vectors; NaN counts as
/// infinitely wrong.
pub fn max_relative_error(analytic: &[f64], numeric: &[f64], floor: f64) -> f64 {
    assert_eq!(analytic.len(), numeric.len());
    analytic
        .iter()
        .zip(numeric)
        .map(|(&a, &n)| relative_error(a, n, floor))
        .fold(0.0, |acc, e| {
            if e.is_nan() {
                f64::INFINITY
            } else {
                acc.max(e)
            }
        })
}
