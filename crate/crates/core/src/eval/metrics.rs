use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Metric {
    Accuracy,
    /// Fraction of predictions whose class, read as an integer age, is
    /// strictly fewer than `years` away from the truth.
    MaeWithin(u32),
}

impl Metric {
    pub fn name(&self) -> String {
        match self {
            Metric::Accuracy => "accuracy".into(),
            Metric::MaeWithin(y) => format!("mae{y}"),
        }
    }

    pub fn parse(s: &str) -> Option<Metric> {
        if s == "accuracy" {
            return Some(Metric::Accuracy);
        }
        s.strip_prefix("mae")?.parse().ok().map(Metric::MaeWithin)
    }
}

fn check_lengths(preds: &[usize], truths: &[usize]) -> Result<()> {
    if preds.len() != truths.len() || preds.is_empty() {
        return Err(Error::InvalidData(format!(
            "need equal nonempty prediction and truth lists, got {} and {}",
            preds.len(),
            truths.len()
        )));
    }
    Ok(())
}

pub fn accuracy(preds: &[usize], truths: &[usize]) -> Result<f64> {
    check_lengths(preds, truths)?;
    let hits = preds.iter().zip(truths).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / preds.len() as f64)
}

/// Refuses class names that are not integers.
pub fn mae_within(
    preds: &[usize],
    truths: &[usize],
    class_names: &[String],
    years: u32,
) -> Result<f64> {
    check_lengths(preds, truths)?;
    let ages: Vec<i64> = class_names
        .iter()
        .map(|n| {
            n.trim()
                .parse::<i64>()
                .map_err(|_| Error::InvalidData(format!("class name {n:?} is not an integer age")))
        })
        .collect::<Result<_>>()?;
    let age = |c: usize| {
        ages.get(c)
            .copied()
            .ok_or_else(|| Error::InvalidData(format!("class {c} has no name")))
    };
    let mut hits = 0usize;
    for (&p, &t) in preds.iter().zip(truths) {
        if (age(p)? - age(t)?).unsigned_abs() < years as u64 {
            hits += 1;
        }
    }
    Ok(hits as f64 / preds.len() as f64)
}

pub fn score(
    metric: Metric,
    preds: &[usize],
    truths: &[usize],
    class_names: &[String],
) -> Result<f64> {
    match metric {
        Metric::Accuracy => accuracy(preds, truths),
        Metric::MaeWithin(y) => mae_within(preds, truths, class_names, y),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[0, 1, 2], &[0, 1, 2]).unwrap(), 1.0);
        assert_eq!(accuracy(&[1, 0], &[0, 1]).unwrap(), 0.0);
        assert_eq!(accuracy(&[0, 1, 1, 1], &[0, 1, 1, 0]).unwrap(), 0.75);
        assert!(accuracy(&[], &[]).is_err());
        assert!(accuracy(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn mae_is_strict() {
        let names: Vec<String> = ["25", "27", "28"].iter().map(|s| s.to_string()).collect();
        assert_eq!(mae_within(&[0], &[1], &names, 3).unwrap(), 1.0);
        assert_eq!(mae_within(&[0], &[2], &names, 3).unwrap(), 0.0);
        let bad = vec!["young".to_string(), "27".to_string()];
        assert!(mae_within(&[0], &[1], &bad, 3).is_err());
    }

    #[test]
    fn metric_names_round_trip() {
        for m in [Metric::Accuracy, Metric::MaeWithin(3), Metric::MaeWithin(5)] {
            assert_eq!(Metric::parse(&m.name()), Some(m));
        }
        assert_eq!(Metric::parse("mae"), None);
    }
}
