//! The value algebra: how factor values combine and which of two values is better.
//!
//! An [`Algebra`] bundles a combination operator, its identity, and an
//! optimization sense. The built-in instances are [`Algebra::min_sum`] and
//! [`Algebra::max_sum`]; custom operators can be supplied through
//! [`Algebra::new`] as long as they are commutative, associative, and
//! distribute over the better-of selection (see the property tests below).

use std::cmp::Ordering;
use std::fmt;

/// Objective values. Small integers are exact; `inf` entries encode
/// forbidden configurations under a minimizing algebra (`-inf` under a
/// maximizing one). Tie detection compares stored values exactly, so inputs
/// that round may under-report ties.
pub type Value = f64;

/// Whether smaller or larger values win.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Minimize,
    Maximize,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sense::Minimize => write!(f, "min"),
            Sense::Maximize => write!(f, "max"),
        }
    }
}

/// A combination operator, its identity, and an optimization sense.
#[derive(Clone, Copy)]
pub struct Algebra {
    combine: fn(Value, Value) -> Value,
    identity: Value,
    sense: Sense,
}

fn add(a: Value, b: Value) -> Value {
    a + b
}

impl Algebra {
    /// Additive combination, smaller is better. The usual algebra for
    /// additively factored cost functions.
    pub fn min_sum() -> Self {
        Algebra {
            combine: add,
            identity: 0.0,
            sense: Sense::Minimize,
        }
    }

    /// Additive combination, larger is better.
    pub fn max_sum() -> Self {
        Algebra {
            combine: add,
            identity: 0.0,
            sense: Sense::Maximize,
        }
    }

    /// A custom algebra. `combine` must be commutative and associative,
    /// `identity` must be neutral for it, and it must distribute over the
    /// better-of selection implied by `sense`.
    pub fn new(combine: fn(Value, Value) -> Value, identity: Value, sense: Sense) -> Self {
        Algebra {
            combine,
            identity,
            sense,
        }
    }

    pub fn for_sense(sense: Sense) -> Self {
        match sense {
            Sense::Minimize => Algebra::min_sum(),
            Sense::Maximize => Algebra::max_sum(),
        }
    }

    #[inline]
    pub fn combine(&self, a: Value, b: Value) -> Value {
        (self.combine)(a, b)
    }

    #[inline]
    pub fn identity(&self) -> Value {
        self.identity
    }

    #[inline]
    pub fn sense(&self) -> Sense {
        self.sense
    }

    /// True when `candidate` is strictly better than `incumbent`.
    #[inline]
    pub fn improves(&self, candidate: Value, incumbent: Value) -> bool {
        match self.sense {
            Sense::Minimize => candidate.total_cmp(&incumbent) == Ordering::Less,
            Sense::Maximize => candidate.total_cmp(&incumbent) == Ordering::Greater,
        }
    }

    /// The better of two values; `a` wins ties.
    #[inline]
    pub fn better(&self, a: Value, b: Value) -> Value {
        if self.improves(b, a) {
            b
        } else {
            a
        }
    }

    /// The value no input can be worse than; the seed for best-of folds.
    #[inline]
    pub fn worst(&self) -> Value {
        match self.sense {
            Sense::Minimize => Value::INFINITY,
            Sense::Maximize => Value::NEG_INFINITY,
        }
    }
}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Algebra")
            .field("identity", &self.identity)
            .field("sense", &self.sense)
            .finish()
    }
}
