//! Scalar losses and their gradients with respect to the prediction.
//!
//! Both losses are means: `mse` over every entry, `cross_entropy` over rows.

use crate::numkit::Matrix;
use crate::{Error, Result};

/// Floor applied to probabilities before taking the log.
pub const LOG_FLOOR: f64 = 1e-12;

fn same_shape(context: &'static str, a: &Matrix, b: &Matrix) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::Shape {
            context,
            expected: a.shape(),
            actual: b.shape(),
        });
    }
    Ok(())
}

pub fn mse(pred: &Matrix, target: &Matrix) -> Result<f64> {
    same_shape("mse", pred, target)?;
    let n = pred.as_slice().len();
    if n == 0 {
        return Ok(0.0);
    }
    let sum: f64 = pred
        .as_slice()
        .iter()
        .zip(target.as_slice())
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok(sum / n as f64)
}

/// `∂ mse / ∂ pred`
pub fn mse_grad(pred: &Matrix, target: &Matrix) -> Result<Matrix> {
    same_shape("mse_grad", pred, target)?;
    let n = pred.as_slice().len().max(1) as f64;
    pred.zip_map(target, |p, t| 2.0 * (p - t) / n)
}

/// `-mean_rows Σ_j t_j ln max(p_j, LOG_FLOOR)`
pub fn cross_entropy(prob: &Matrix, onehot: &Matrix) -> Result<f64> {
    same_shape("cross_entropy", prob, onehot)?;
    if prob.rows() == 0 {
        return Ok(0.0);
    }
    let sum: f64 = prob
        .as_slice()
        .iter()
        .zip(onehot.as_slice())
        .filter(|(_, &t)| t != 0.0)
        .map(|(&p, &t)| -t * libm::log(p.max(LOG_FLOOR)))
        .sum();
    Ok(sum / prob.rows() as f64)
}

/// `∂ cross_entropy / ∂ prob`; zero wherever the floor is active.
pub fn cross_entropy_grad(prob: &Matrix, onehot: &Matrix) -> Result<Matrix> {
    same_shape("cross_entropy_grad", prob, onehot)?;
    let n = prob.rows().max(1) as f64;
    prob.zip_map(onehot, |p, t| {
        if t == 0.0 || p < LOG_FLOOR {
            0.0
        } else {
            -t / (p * n)
        }
    })
}
