//! Two-tailed paired t-test at the 0.05 level.

use alloc::format;

use crate::{Error, Result};

/// Two-tailed 0.05 critical values of Student's t for df = 1..=100.
const T_CRIT_05: [f64; 100] = [
    12.706205, 4.302653, 3.182446, 2.776445, 2.570582, 2.446912, 2.364624, 2.306004, 2.262157,
    2.228139, 2.200985, 2.178813, 2.160369, 2.144787, 2.131450, 2.119905, 2.109816, 2.100922,
    2.093024, 2.085963, 2.079614, 2.073873, 2.068658, 2.063899, 2.059539, 2.055529, 2.051831,
    2.048407, 2.045230, 2.042272, 2.039513, 2.036933, 2.034515, 2.032245, 2.030108, 2.028094,
    2.026192, 2.024394, 2.022691, 2.021075, 2.019541, 2.018082, 2.016692, 2.015368, 2.014103,
    2.012896, 2.011741, 2.010635, 2.009575, 2.008559, 2.007584, 2.006647, 2.005746, 2.004879,
    2.004045, 2.003241, 2.002465, 2.001717, 2.000995, 2.000298, 1.999624, 1.998972, 1.998341,
    1.997730, 1.997138, 1.996564, 1.996008, 1.995469, 1.994945, 1.994437, 1.993943, 1.993464,
    1.992997, 1.992543, 1.992102, 1.991673, 1.991254, 1.990847, 1.990450, 1.990063, 1.989686,
    1.989319, 1.988960, 1.988610, 1.988268, 1.987934, 1.987608, 1.987290, 1.986979, 1.986675,
    1.986377, 1.986086, 1.985802, 1.985523, 1.985251, 1.984984, 1.984723, 1.984467, 1.984217,
    1.983972,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Verdict {
    Win,
    Tie,
    Loss,
}

impl Verdict {
    pub fn mirrored(self) -> Verdict {
        match self {
            Verdict::Win => Verdict::Loss,
            Verdict::Tie => Verdict::Tie,
            Verdict::Loss => Verdict::Win,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::Win => "win",
            Verdict::Tie => "tie",
            Verdict::Loss => "loss",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTest {
    pub verdict: Verdict,
    /// `mean(d) / (sd(d) / √n)` for `d = a − b`. Infinite when the
    /// differences are constant and nonzero, `None` when they are all zero.
    pub t: Option<f64>,
    pub df: usize,
    pub critical: f64,
}

/// Critical value for `df` degrees of freedom. Beyond the table the df = 100
/// entry is used, which is slightly conservative.
pub fn t_critical(df: usize, level: f64) -> Result<f64> {
    if level != 0.05 {
        return Err(Error::UnsupportedLevel);
    }
    if df == 0 {
        return Err(Error::InvalidData(
            "t-test needs at least one degree of freedom".into(),
        ));
    }
    Ok(T_CRIT_05[df.min(100) - 1])
}

/// Verdict is from `a`'s point of view: win when `a` is significantly higher.
pub fn paired_t_test(a: &[f64], b: &[f64], level: f64) -> Result<TTest> {
    if a.len() != b.len() {
        return Err(Error::InvalidData(format!(
            "paired samples differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::InvalidData(
            "paired t-test needs at least 2 pairs".into(),
        ));
    }
    let critical = t_critical(n - 1, level)?;
    let nf = n as f64;
    let mean = a.iter().zip(b).map(|(x, y)| x - y).sum::<f64>() / nf;
    let ss: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            let e = (x - y) - mean;
            e * e
        })
        .sum();
    let sd = libm::sqrt(ss / (nf - 1.0));
    let t = if sd > 0.0 {
        Some(mean / (sd / libm::sqrt(nf)))
    } else if mean != 0.0 {
        Some(if mean > 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        })
    } else {
        None
    };
    let verdict = match t {
        Some(t) if t > critical => Verdict::Win,
        Some(t) if t < -critical => Verdict::Loss,
        _ => Verdict::Tie,
    };
    Ok(TTest {
        verdict,
        t,
        df: n - 1,
        critical,
    })
}
