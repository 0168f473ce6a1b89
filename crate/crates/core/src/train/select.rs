use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{train, AblationVariant, TrainConfig};
use crate::mgpll::MgpllConfig;
use crate::pldata::PlDataset;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SearchStrategy {
    /// Every point of grid³.
    FullGrid,
    /// One pass over alpha, then beta, then gamma, each swept with the others
    /// held at their current best (starting from the smallest grid value).
    CoordinateDescent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Final-epoch training classification loss.
    pub l_c: f64,
}

impl GridPoint {
    fn key(&self) -> (f64, f64, f64) {
        (self.alpha, self.beta, self.gamma)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Every trained point, in evaluation order.
    pub evaluated: Vec<GridPoint>,
}

impl Selection {
    pub fn trainings(&self) -> usize {
        self.evaluated.len()
    }
}

/// Smaller loss first, then lexicographically smaller (alpha, beta, gamma).
fn better(a: &GridPoint, b: &GridPoint) -> bool {
    match a.l_c.total_cmp(&b.l_c) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => {
            let (ka, kb) = (a.key(), b.key());
            (ka.0, ka.1, ka.2).partial_cmp(&(kb.0, kb.1, kb.2)) == Some(Ordering::Less)
        }
    }
}

struct Evaluator<'a> {
    ds: &'a PlDataset,
    variant: AblationVariant,
    cfg: &'a TrainConfig,
    mcfg: &'a MgpllConfig,
    evaluated: Vec<GridPoint>,
}

impl Evaluator<'_> {
    fn eval(&mut self, alpha: f64, beta: f64, gamma: f64) -> Result<GridPoint> {
        if let Some(p) = self
            .evaluated
            .iter()
            .find(|p| p.key() == (alpha, beta, gamma))
        {
            return Ok(*p);
        }
        let mcfg = MgpllConfig {
            alpha,
            beta,
            gamma,
            ..self.mcfg.clone()
        };
        let (_, log) = train(self.ds, self.variant, self.cfg, &mcfg)?;
        let p = GridPoint {
            alpha,
            beta,
            gamma,
            l_c: log.final_l_c().unwrap_or(f64::INFINITY),
        };
        self.evaluated.push(p);
        Ok(p)
    }
}

/// Picks `(alpha, beta, gamma)` from `cfg.grid` by final training
/// classification loss.
pub fn select_hyperparameters(
    ds: &PlDataset,
    variant: AblationVariant,
    cfg: &TrainConfig,
    mcfg: &MgpllConfig,
) -> Result<Selection> {
    cfg.validate()?;
    let mut grid = cfg.grid.clone();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let Some(&first) = grid.first() else {
        return Err(Error::InvalidConfig("hyperparameter grid is empty".into()));
    };
    if grid.len() == 1 {
        return Ok(Selection {
            alpha: first,
            beta: first,
            gamma: first,
            evaluated: Vec::new(),
        });
    }

    let mut ev = Evaluator {
        ds,
        variant,
        cfg,
        mcfg,
        evaluated: Vec::new(),
    };
    let consider = |p: GridPoint, best: &mut Option<GridPoint>| {
        if best.as_ref().is_none_or(|b| better(&p, b)) {
            *best = Some(p);
        }
    };
    match cfg.search {
        SearchStrategy::FullGrid => {
            for &a in &grid {
                for &b in &grid {
                    for &g in &grid {
                        ev.eval(a, b, g)?;
                    }
                }
            }
        }
        SearchStrategy::CoordinateDescent => {
            let mut cur = [first; 3];
            for axis in 0..3 {
                let mut axis_best: Option<GridPoint> = None;
                for &v in &grid {
                    let mut q = cur;
                    q[axis] = v;
                    let p = ev.eval(q[0], q[1], q[2])?;
                    consider(p, &mut axis_best);
                }
                let b = axis_best.expect("grid is nonempty");
                cur = [b.alpha, b.beta, b.gamma];
            }
        }
    }
    let mut best = None;
    for p in &ev.evaluated {
        consider(*p, &mut best);
    }
    let b = best.expect("grid is nonempty");
    Ok(Selection {
        alpha: b.alpha,
        beta: b.beta,
        gamma: b.gamma,
        evaluated: ev.evaluated,
    })
}
