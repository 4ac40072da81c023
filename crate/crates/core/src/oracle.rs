//! Brute-force reference solver: materialize the joint valuation and scan
//! every configuration. Exists for differential testing and the `check`
//! command; deliberately has no pruning so its answers are ground truth by
//! construction.

use crate::algebra::{Algebra, Value};
use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::valuation::Valuation;
use crate::variables::Configuration;

pub const DEFAULT_MAX_JOINT: usize = 1 << 24;

/// Exhaustive solve output: the exact optimum and the complete set of
/// configurations achieving it, in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub optimum: Value,
    pub argopt: Vec<Configuration>,
    /// Number of configurations scanned.
    pub joint_size: usize,
}

/// Left-fold combination of all factors onto the union of their scopes.
/// Errors when the union frame exceeds `max_joint` entries.
pub fn joint(factors: &[Valuation], alg: &Algebra, max_joint: usize) -> Result<Valuation> {
    let mut iter = factors.iter();
    let first = iter.next().ok_or(Error::NoFactors)?;
    let union = factors
        .iter()
        .fold(first.domain().clone(), |acc, f| acc.union(f.domain()));
    let size = union.frame_size_saturating();
    if size > max_joint as u128 {
        return Err(Error::JointTooLarge {
            size,
            cap: max_joint,
        });
    }
    let mut total = first.clone();
    for f in iter {
        total = total.combine(f, alg)?;
    }
    Ok(total)
}

/// Scan every configuration of the problem's universe.
pub fn brute_solve(problem: &Problem, max_joint: usize) -> Result<OracleResult> {
    let alg = problem.algebra();
    let factors: Vec<Valuation> = problem.factor_valuations().cloned().collect();
    let joint = joint(&factors, &alg, max_joint)?;
    // every variable appears in some factor, so the joint covers the universe
    debug_assert_eq!(joint.domain(), &problem.universe());

    let mut optimum = alg.worst();
    for &v in joint.values() {
        optimum = alg.better(optimum, v);
    }
    let argopt = joint
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| **v == optimum)
        .map(|(i, _)| Configuration::from_index(joint.domain(), i))
        .collect();
    Ok(OracleResult {
        optimum,
        argopt,
        joint_size: joint.len(),
    })
}
