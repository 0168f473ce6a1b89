//! Finite-difference verification of every loss term's analytic gradients.

use alloc::vec::Vec;

use super::model::{MgpllModel, Network};
use super::terms::{self, TermOutput};
use crate::numkit::gradcheck::{max_relative_error, numeric_gradient};
use crate::numkit::Matrix;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Term {
    Classification,
    LabelCritic,
    LabelGenerator,
    FeatureCritic,
    FeatureGenerator,
    Generation,
    Auxiliary,
}

impl Term {
    pub const ALL: [Term; 7] = [
        Term::Classification,
        Term::LabelCritic,
        Term::LabelGenerator,
        Term::FeatureCritic,
        Term::FeatureGenerator,
        Term::Generation,
        Term::Auxiliary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Term::Classification => "classification",
            Term::LabelCritic => "label critic",
            Term::LabelGenerator => "label generator",
            Term::FeatureCritic => "feature critic",
            Term::FeatureGenerator => "feature generator",
            Term::Generation => "generation",
            Term::Auxiliary => "auxiliary",
        }
    }
}

/// Fixed inputs for a gradient check.
#[derive(Debug, Clone)]
pub struct CheckBatch {
    pub x: Matrix,
    pub y: Matrix,
    pub z: Matrix,
    pub eps: Matrix,
    pub eps_bar: Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckResult {
    pub term: Term,
    pub network: Network,
    pub max_rel_err: f64,
    pub params: usize,
}

fn evaluate(
    term: Term,
    m: &MgpllModel,
    b: &CheckBatch,
    condition: Option<&Matrix>,
) -> Result<TermOutput> {
    match term {
        Term::Classification => terms::classification(m, &b.x, &b.y, &b.eps, condition),
        Term::LabelCritic => terms::label_critic(m, &b.y, &b.z, &b.eps),
        Term::LabelGenerator => terms::label_generator(m, &b.z, &b.eps),
        Term::FeatureCritic => terms::feature_critic(m, &b.x, &b.z, &b.eps),
        Term::FeatureGenerator => terms::feature_generator(m, &b.z, &b.eps_bar),
        Term::Generation => terms::generation(m, &b.x, &b.y, &b.eps, &b.eps_bar),
        Term::Auxiliary => terms::auxiliary(m, &b.z, &b.eps_bar),
    }
}

/// Compares analytic and central-difference gradients for every network a
/// term routes gradient to. The classification term is differentiated with
/// the noise generator's condition held at its base value, matching the
/// analytic routing.
pub fn check_term(
    model: &MgpllModel,
    batch: &CheckBatch,
    term: Term,
    step: f64,
    floor: f64,
) -> Result<Vec<CheckResult>> {
    let condition = match term {
        Term::Classification => Some(model.predict(&batch.x)?),
        _ => None,
    };
    let analytic = evaluate(term, model, batch, None)?;
    let mut out = Vec::new();
    for network in Network::ALL {
        let Some(g) = analytic.grads.get(network) else {
            continue;
        };
        let numeric = numeric_gradient(
            model,
            |m| m.network_mut(network),
            |m| {
                evaluate(term, m, batch, condition.as_ref())
                    .map(|o| o.value)
                    .unwrap_or(f64::NAN)
            },
            step,
        );
        let flat = g.flat();
        out.push(CheckResult {
            term,
            network,
            max_rel_err: max_relative_error(&flat, &numeric, floor),
            params: flat.len(),
        });
    }
    Ok(out)
}

/// Runs [`check_term`] over every term.
pub fn check_all(
    model: &MgpllModel,
    batch: &CheckBatch,
    step: f64,
    floor: f64,
) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for term in Term::ALL {
        out.extend(check_term(model, batch, term, step, floor)?);
    }
    Ok(out)
}
