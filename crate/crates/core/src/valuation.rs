//! Valuations: dense tables of values over the frame of a variable set,
//! with combination, marginalization, and single-variable elimination.
//!
//! Tables are row-major over the canonical variable order (last variable
//! varies fastest). All operations are pure; valuations are immutable after
//! construction and freely shareable across threads.

use crate::algebra::{Algebra, Value};
use crate::error::{Error, Result};
use crate::variables::{Configuration, VarSet, Variable};

/// A function from the frame of a variable set to values, stored densely.
#[derive(Clone, PartialEq, Debug)]
pub struct Valuation {
    domain: VarSet,
    values: Vec<Value>,
}

impl Valuation {
    /// A valuation from its domain and full table. The table length must
    /// equal the domain's frame size; a valuation for the empty set has
    /// exactly one entry.
    pub fn new(domain: VarSet, values: Vec<Value>) -> Result<Self> {
        let expected = domain.frame_size()?;
        if values.len() != expected {
            return Err(Error::TableSizeMismatch {
                expected,
                got: values.len(),
            });
        }
        Ok(Valuation { domain, values })
    }

    /// The valuation whose entries all equal the algebra's identity.
    pub fn vacuous(domain: VarSet, alg: &Algebra) -> Result<Self> {
        let size = domain.frame_size()?;
        Ok(Valuation {
            domain,
            values: vec![alg.identity(); size],
        })
    }

    /// A valuation for the empty set holding a single value.
    pub fn constant(value: Value) -> Self {
        Valuation {
            domain: VarSet::empty(),
            values: vec![value],
        }
    }

    pub fn domain(&self) -> &VarSet {
        &self.domain
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The value at a configuration whose domain covers this valuation's
    /// domain; extra coordinates are ignored.
    pub fn evaluate(&self, x: &Configuration) -> Result<Value> {
        if !self.domain.is_subset_of(x.domain()) {
            return Err(Error::DomainNotCovered {
                needed: self.domain.clone(),
                given: x.domain().clone(),
            });
        }
        let strides = self.domain.strides();
        let mut idx = 0usize;
        for (pos, v) in self.domain.iter().enumerate() {
            idx += x.state_of(v).unwrap() as usize * strides[pos];
        }
        Ok(self.values[idx])
    }

    /// Pointwise combination over the union of the two domains:
    /// `result(x) = combine(self(x↓g), other(x↓h))`.
    pub fn combine(&self, other: &Valuation, alg: &Algebra) -> Result<Valuation> {
        let domain = self.domain.union(&other.domain);
        let size = domain.frame_size()?;
        let cards: Vec<usize> = domain.iter().map(|v| v.cardinality()).collect();
        let left = self.domain.strides_within(&domain);
        let right = other.domain.strides_within(&domain);

        let mut values = Vec::with_capacity(size);
        let mut digits = vec![0usize; domain.len()];
        let (mut li, mut ri) = (0usize, 0usize);
        for _ in 0..size {
            values.push(alg.combine(self.values[li], other.values[ri]));
            for pos in (0..digits.len()).rev() {
                digits[pos] += 1;
                li += left[pos];
                ri += right[pos];
                if digits[pos] < cards[pos] {
                    break;
                }
                digits[pos] = 0;
                li -= left[pos] * cards[pos];
                ri -= right[pos] * cards[pos];
            }
        }
        Ok(Valuation { domain, values })
    }

    /// Reduce to a subset of the domain by taking, for each target
    /// configuration, the best value over all extensions.
    pub fn marginalize(&self, target: &VarSet, alg: &Algebra) -> Result<Valuation> {
        if !target.is_subset_of(&self.domain) {
            return Err(Error::NotSubset {
                sub: target.clone(),
                sup: self.domain.clone(),
            });
        }
        if *target == self.domain {
            return Ok(self.clone());
        }
        let out_size = target.frame_size()?;
        let cards: Vec<usize> = self.domain.iter().map(|v| v.cardinality()).collect();
        let tstrides = target.strides_within(&self.domain);

        let mut out = vec![alg.worst(); out_size];
        let mut digits = vec![0usize; self.domain.len()];
        let mut ti = 0usize;
        for &v in &self.values {
            out[ti] = alg.better(out[ti], v);
            for pos in (0..digits.len()).rev() {
                digits[pos] += 1;
                ti += tstrides[pos];
                if digits[pos] < cards[pos] {
                    break;
                }
                digits[pos] = 0;
                ti -= tstrides[pos] * cards[pos];
            }
        }
        Valuation::new(target.clone(), out)
    }

    /// Marginalize a single variable away, recording for every remaining
    /// configuration the optimizing state(s) of that variable. The first
    /// component equals `marginalize(domain − {var})`; the canonical pick is
    /// the tied state with the smallest frame index.
    pub fn eliminate(&self, var: Variable, alg: &Algebra) -> Result<(Valuation, SolutionTable)> {
        let pos = self
            .domain
            .position(var)
            .ok_or(Error::VariableNotInDomain {
                var,
                domain: self.domain.clone(),
            })?;
        let target = self.domain.remove(var);
        let out_size = target.frame_size()?;
        let cards: Vec<usize> = self.domain.iter().map(|v| v.cardinality()).collect();
        let tstrides = target.strides_within(&self.domain);

        let mut best = vec![alg.worst(); out_size];
        let mut ties: Vec<Vec<u32>> = vec![Vec::new(); out_size];
        let mut digits = vec![0usize; self.domain.len()];
        let mut ti = 0usize;
        for &v in &self.values {
            let state = digits[pos] as u32;
            if ties[ti].is_empty() || alg.improves(v, best[ti]) {
                best[ti] = v;
                ties[ti].clear();
                ties[ti].push(state);
            } else if v == best[ti] {
                // states are visited in ascending order per target entry,
                // so ties stay sorted and ties[0] is the canonical pick
                ties[ti].push(state);
            }
            for p in (0..digits.len()).rev() {
                digits[p] += 1;
                ti += tstrides[p];
                if digits[p] < cards[p] {
                    break;
                }
                digits[p] = 0;
                ti -= tstrides[p] * cards[p];
            }
        }

        let marginal = Valuation::new(target.clone(), best)?;
        let table = SolutionTable {
            variable: var,
            domain: target,
            ties,
        };
        Ok((marginal, table))
    }
}

/// The record left behind by [`Valuation::eliminate`]: for each
/// configuration of the remaining variables, the states of the eliminated
/// variable that achieve the marginal value.
#[derive(Clone, PartialEq, Debug)]
pub struct SolutionTable {
    variable: Variable,
    domain: VarSet,
    ties: Vec<Vec<u32>>,
}

impl SolutionTable {
    /// The eliminated variable.
    pub fn variable(&self) -> Variable {
        self.variable
    }

    /// The remaining variables the table is indexed by.
    pub fn domain(&self) -> &VarSet {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.ties.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ties.is_empty()
    }

    /// Canonical optimizing state at a configuration covering the domain.
    pub fn pick(&self, c: &Configuration) -> Result<u32> {
        Ok(self.ties(c)?[0])
    }

    /// All tied optimizing states, ascending; the first is the canonical pick.
    pub fn ties(&self, c: &Configuration) -> Result<&[u32]> {
        if !self.domain.is_subset_of(c.domain()) {
            return Err(Error::DomainNotCovered {
                needed: self.domain.clone(),
                given: c.domain().clone(),
            });
        }
        let idx = c.project(&self.domain)?.to_index();
        Ok(&self.ties[idx])
    }

    pub fn pick_at(&self, idx: usize) -> u32 {
        self.ties[idx][0]
    }

    pub fn ties_at(&self, idx: usize) -> &[u32] {
        &self.ties[idx]
    }
}
