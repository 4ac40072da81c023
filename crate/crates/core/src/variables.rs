//! Variables, variable sets, and configurations.
//!
//! A [`Variable`] is a lightweight handle: an index into the owning problem's
//! declaration order plus its frame cardinality. Sets and tables order
//! variables canonically (by declaration index), and tables are laid out
//! row-major with the last variable varying fastest.

use std::fmt;

use crate::error::{Error, Result};

/// A problem variable: declaration index plus frame cardinality.
/// Names and state labels live on the owning `Problem`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    index: u32,
    cardinality: u32,
}

impl Variable {
    pub fn new(index: usize, cardinality: usize) -> Self {
        assert!(cardinality >= 1, "a variable needs a non-empty frame");
        Variable {
            index: index as u32,
            cardinality: cardinality as u32,
        }
    }

    pub fn index(&self) -> usize {
        self.index as usize
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality as usize
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.index)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.index)
    }
}

/// A set of variables in canonical (declaration) order. The empty set is
/// valid and has frame size 1.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct VarSet {
    vars: Vec<Variable>,
}

impl VarSet {
    pub fn empty() -> Self {
        VarSet { vars: Vec::new() }
    }

    pub fn singleton(var: Variable) -> Self {
        VarSet { vars: vec![var] }
    }

    pub fn new(vars: impl IntoIterator<Item = Variable>) -> Self {
        let mut vars: Vec<Variable> = vars.into_iter().collect();
        vars.sort_by_key(|v| v.index);
        vars.dedup_by_key(|v| v.index);
        VarSet { vars }
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = Variable> + ExactSizeIterator + '_ {
        self.vars.iter().copied()
    }

    pub fn as_slice(&self) -> &[Variable] {
        &self.vars
    }

    pub fn contains(&self, var: Variable) -> bool {
        self.position(var).is_some()
    }

    /// Position of `var` in canonical order, if present.
    pub fn position(&self, var: Variable) -> Option<usize> {
        self.vars.binary_search_by_key(&var.index, |v| v.index).ok()
    }

    pub fn union(&self, other: &VarSet) -> VarSet {
        let mut merged = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.vars.len() && j < other.vars.len() {
            match self.vars[i].index.cmp(&other.vars[j].index) {
                std::cmp::Ordering::Less => {
                    merged.push(self.vars[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    merged.push(other.vars[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    merged.push(self.vars[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        merged.extend_from_slice(&self.vars[i..]);
        merged.extend_from_slice(&other.vars[j..]);
        VarSet { vars: merged }
    }

    pub fn intersect(&self, other: &VarSet) -> VarSet {
        VarSet {
            vars: self
                .vars
                .iter()
                .copied()
                .filter(|v| other.contains(*v))
                .collect(),
        }
    }

    pub fn minus(&self, other: &VarSet) -> VarSet {
        VarSet {
            vars: self
                .vars
                .iter()
                .copied()
                .filter(|v| !other.contains(*v))
                .collect(),
        }
    }

    pub fn remove(&self, var: Variable) -> VarSet {
        VarSet {
            vars: self
                .vars
                .iter()
                .copied()
                .filter(|v| v.index != var.index)
                .collect(),
        }
    }

    pub fn is_subset_of(&self, other: &VarSet) -> bool {
        self.vars.iter().all(|v| other.contains(*v))
    }

    pub fn is_disjoint_from(&self, other: &VarSet) -> bool {
        !self.vars.iter().any(|v| other.contains(*v))
    }

    /// Number of configurations of this set; 1 for the empty set.
    /// Errors when the product overflows the address space.
    pub fn frame_size(&self) -> Result<usize> {
        let mut size: usize = 1;
        for v in &self.vars {
            size =
                size.checked_mul(v.cardinality as usize)
                    .ok_or_else(|| Error::FrameOverflow {
                        domain: self.clone(),
                    })?;
        }
        Ok(size)
    }

    /// Frame size with saturation, for comparing candidate sets without
    /// failing on overflow.
    pub fn frame_size_saturating(&self) -> u128 {
        self.vars
            .iter()
            .fold(1u128, |acc, v| acc.saturating_mul(v.cardinality as u128))
    }

    /// Row-major strides: the last variable varies fastest.
    pub(crate) fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.vars.len()];
        for i in (0..self.vars.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.vars[i + 1].cardinality as usize;
        }
        strides
    }

    /// For each position of `sup`, the stride of that variable inside `self`,
    /// or 0 when `self` does not contain it. Requires `self ⊆ sup`.
    pub(crate) fn strides_within(&self, sup: &VarSet) -> Vec<usize> {
        let own = self.strides();
        sup.vars
            .iter()
            .map(|v| self.position(*v).map_or(0, |p| own[p]))
            .collect()
    }
}

impl FromIterator<Variable> for VarSet {
    fn from_iter<T: IntoIterator<Item = Variable>>(iter: T) -> Self {
        VarSet::new(iter)
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.vars.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// One state per variable of a domain, in canonical order. The unique
/// configuration of the empty set is [`Configuration::empty`].
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Configuration {
    domain: VarSet,
    states: Vec<u32>,
}

impl Configuration {
    /// The distinguished configuration of the empty set.
    pub fn empty() -> Self {
        Configuration {
            domain: VarSet::empty(),
            states: Vec::new(),
        }
    }

    pub fn new(domain: VarSet, states: Vec<u32>) -> Result<Self> {
        if states.len() != domain.len() {
            return Err(Error::TableSizeMismatch {
                expected: domain.len(),
                got: states.len(),
            });
        }
        for (v, s) in domain.iter().zip(&states) {
            if *s >= v.cardinality {
                return Err(Error::VariableNotInDomain {
                    var: v,
                    domain: domain.clone(),
                });
            }
        }
        Ok(Configuration { domain, states })
    }

    /// The configuration of `domain` at row-major index `idx`.
    pub fn from_index(domain: &VarSet, idx: usize) -> Self {
        let mut states = vec![0u32; domain.len()];
        let mut rest = idx;
        for (pos, v) in domain.iter().enumerate().rev() {
            let card = v.cardinality as usize;
            states[pos] = (rest % card) as u32;
            rest /= card;
        }
        debug_assert_eq!(rest, 0, "index beyond the frame of {domain}");
        Configuration {
            domain: domain.clone(),
            states,
        }
    }

    /// Row-major index of this configuration within its own domain's frame.
    pub fn to_index(&self) -> usize {
        let strides = self.domain.strides();
        self.states
            .iter()
            .zip(&strides)
            .map(|(s, st)| *s as usize * st)
            .sum()
    }

    pub fn domain(&self) -> &VarSet {
        &self.domain
    }

    pub fn states(&self) -> &[u32] {
        &self.states
    }

    pub fn state_of(&self, var: Variable) -> Option<u32> {
        self.domain.position(var).map(|p| self.states[p])
    }

    /// Drop the coordinates outside `target`. Errors unless `target` is a
    /// subset of this configuration's domain.
    pub fn project(&self, target: &VarSet) -> Result<Configuration> {
        if !target.is_subset_of(&self.domain) {
            return Err(Error::NotSubset {
                sub: target.clone(),
                sup: self.domain.clone(),
            });
        }
        let states = target
            .iter()
            .map(|v| self.states[self.domain.position(v).unwrap()])
            .collect();
        Ok(Configuration {
            domain: target.clone(),
            states,
        })
    }

    /// Merge with a configuration over a disjoint domain; coordinates end up
    /// in canonical order. Concatenating with the empty configuration is the
    /// identity.
    pub fn concat(&self, other: &Configuration) -> Result<Configuration> {
        if !self.domain.is_disjoint_from(&other.domain) {
            return Err(Error::OverlappingDomains {
                left: self.domain.clone(),
                right: other.domain.clone(),
            });
        }
        let domain = self.domain.union(&other.domain);
        let states = domain
            .iter()
            .map(|v| {
                self.state_of(v)
                    .or_else(|| other.state_of(v))
                    .expect("union member comes from one side")
            })
            .collect();
        Ok(Configuration { domain, states })
    }
}
