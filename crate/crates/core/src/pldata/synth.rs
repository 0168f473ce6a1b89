//! Controlled corruption of a clean, singly-labeled dataset into a PL dataset.
//!
//! Random mode adds `r` distinct false positives, drawn uniformly from the
//! non-true labels, to a seeded `round_half_even(p·n)`-sized subset of the
//! instances. Coupled mode adds exactly one false positive to every instance:
//! the true class's designated coupled label with probability `epsilon`,
//! otherwise a uniform pick from the remaining labels.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::PlDataset;
use crate::rng::{rng_for, stream};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseMode {
    Random,
    Coupled,
}

/// How each class picks its coupled label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    /// Class `j` couples to `(j + 1) mod L`.
    Successor,
    /// A seeded random cyclic permutation (so no class couples to itself).
    Derangement,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    /// Proportion of instances that receive false positives.
    pub p: f64,
    /// False positives per corrupted instance.
    pub r: usize,
    /// Co-occurrence probability of the coupled label (Coupled mode only).
    pub epsilon: f64,
    pub mode: NoiseMode,
    pub coupling: Coupling,
    pub seed: u64,
}

impl SynthConfig {
    pub fn random(p: f64, r: usize, seed: u64) -> Self {
        SynthConfig {
            p,
            r,
            epsilon: 0.0,
            mode: NoiseMode::Random,
            coupling: Coupling::Successor,
            seed,
        }
    }

    /// Label-dependent noise: `p = 1`, `r = 1`.
    pub fn coupled(epsilon: f64, seed: u64) -> Self {
        SynthConfig {
            p: 1.0,
            r: 1,
            epsilon,
            mode: NoiseMode::Coupled,
            coupling: Coupling::Successor,
            seed,
        }
    }

    pub fn validate(&self, num_classes: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidConfig(format!(
                "p must be in [0,1], got {}",
                self.p
            )));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be in [0,1], got {}",
                self.epsilon
            )));
        }
        if self.r < 1 || self.r + 1 > num_classes {
            return Err(Error::InvalidConfig(format!(
                "r must be in [1, L-1] = [1, {}], got {}",
                num_classes.saturating_sub(1),
                self.r
            )));
        }
        if self.mode == NoiseMode::Coupled && (self.p != 1.0 || self.r != 1) {
            return Err(Error::InvalidConfig(
                "coupled noise requires p = 1 and r = 1".into(),
            ));
        }
        Ok(())
    }
}

/// Coupled label of every class. Depends only on `L`, the coupling rule and
/// the seed, so every fold of a run sees the same map.
pub fn coupling_map(num_classes: usize, coupling: Coupling, seed: u64) -> Vec<usize> {
    match coupling {
        Coupling::Successor => (0..num_classes).map(|j| (j + 1) % num_classes).collect(),
        Coupling::Derangement => {
            // Sattolo: uniform over cyclic permutations.
            let mut perm: Vec<usize> = (0..num_classes).collect();
            let mut rng = rng_for(seed, stream::COUPLING);
            for i in (1..num_classes).rev() {
                let j = rng.gen_range(0..i);
                perm.swap(i, j);
            }
            perm
        }
    }
}

pub fn synthesize(clean: &PlDataset, cfg: &SynthConfig) -> Result<PlDataset> {
    let l = clean.num_classes();
    cfg.validate(l)?;
    let truth = clean
        .true_labels()
        .ok_or_else(|| Error::InvalidData("synthesis needs ground-truth labels".into()))?;
    for (i, &t) in truth.iter().enumerate() {
        if clean.candidate_set(i) != [t] {
            return Err(Error::InvalidData(format!(
                "row {i} of the clean dataset is not singly labeled"
            )));
        }
    }

    let n = clean.len();
    let mut rng = rng_for(cfg.seed, stream::SYNTH);
    let mut candidates = clean.candidates().clone();

    match cfg.mode {
        NoiseMode::Random => {
            let count = libm::rint(cfg.p * n as f64) as usize;
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            for &i in &order[..count.min(n)] {
                let t = truth[i];
                let mut others: Vec<usize> = (0..l).filter(|&c| c != t).collect();
                let (picked, _) = others.partial_shuffle(&mut rng, cfg.r);
                for &c in picked.iter() {
                    candidates[(i, c)] = 1.0;
                }
            }
        }
        NoiseMode::Coupled => {
            let map = coupling_map(l, cfg.coupling, cfg.seed);
            for (i, &t) in truth.iter().enumerate() {
                let coupled = map[t];
                let rest: Vec<usize> = (0..l).filter(|&c| c != t && c != coupled).collect();
                let noise = if rest.is_empty() || rng.gen_bool(cfg.epsilon) {
                    coupled
                } else {
                    rest[rng.gen_range(0..rest.len())]
                };
                candidates[(i, noise)] = 1.0;
            }
        }
    }

    let name = match cfg.mode {
        NoiseMode::Random => format!("{}-p{}-r{}", clean.name(), cfg.p, cfg.r),
        NoiseMode::Coupled => format!("{}-eps{}", clean.name(), cfg.epsilon),
    };
    clean.with_candidates(candidates, name)
}
