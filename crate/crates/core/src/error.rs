//! Error types shared across the crate.

use std::fmt;

use crate::variables::{VarSet, Variable};

/// Errors produced by algebra operations, tree construction, propagation,
/// the oracle, and problem parsing.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A projection or marginalization target is not contained in the source domain.
    NotSubset { sub: VarSet, sup: VarSet },
    /// Concatenation of two configurations whose domains overlap.
    OverlappingDomains { left: VarSet, right: VarSet },
    /// A variable was required to be a member of a domain but is not.
    VariableNotInDomain { var: Variable, domain: VarSet },
    /// A configuration does not cover the domain it is evaluated against.
    DomainNotCovered { needed: VarSet, given: VarSet },
    /// A valuation table whose length does not match its domain's frame size.
    TableSizeMismatch { expected: usize, got: usize },
    /// The frame of a variable set is too large to index.
    FrameOverflow { domain: VarSet },
    /// An elimination order that is not a permutation of the hypergraph's universe.
    OrderMismatch { detail: String },
    /// A factor whose scope is not a vertex of the tree it is attached to.
    ScopeNotInTree { scope: VarSet },
    /// A non-root tree vertex with no assigned valuation during propagation.
    MissingValuation { vertex: VarSet },
    /// A vertex that drops more than one variable toward its parent.
    UnsupportedTreeShape { vertex: VarSet, dropped: VarSet },
    /// No solution table was recorded for a variable during the inward pass.
    MissingSolutionTable { var: Variable },
    /// Tie enumeration exceeded the configured maximum number of optima.
    TooManyOptima { cap: usize },
    /// The joint frame exceeds the configured size limit.
    JointTooLarge { size: u128, cap: usize },
    /// An operation that requires at least one factor received none.
    NoFactors,
    /// A problem assembled programmatically that breaks a structural rule.
    InvalidProblem { detail: String },
    /// A problem file that failed to parse; carries the offending line number.
    Parse(ParseError),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotSubset { sub, sup } => {
                write!(f, "{sub} is not a subset of {sup}")
            }
            Error::OverlappingDomains { left, right } => {
                write!(f, "domains {left} and {right} overlap")
            }
            Error::VariableNotInDomain { var, domain } => {
                write!(f, "variable {var} is not in domain {domain}")
            }
            Error::DomainNotCovered { needed, given } => {
                write!(f, "configuration of {given} does not cover {needed}")
            }
            Error::TableSizeMismatch { expected, got } => {
                write!(f, "table has {got} entries, frame requires {expected}")
            }
            Error::FrameOverflow { domain } => {
                write!(f, "frame of {domain} is too large to index")
            }
            Error::OrderMismatch { detail } => {
                write!(f, "elimination order mismatch: {detail}")
            }
            Error::ScopeNotInTree { scope } => {
                write!(f, "factor scope {scope} is not a vertex of the tree")
            }
            Error::MissingValuation { vertex } => {
                write!(f, "tree vertex {vertex} has no assigned valuation")
            }
            Error::UnsupportedTreeShape { vertex, dropped } => {
                write!(
                    f,
                    "vertex {vertex} drops {dropped} toward its parent; only single-variable drops are supported"
                )
            }
            Error::MissingSolutionTable { var } => {
                write!(f, "no solution table recorded for variable {var}")
            }
            Error::TooManyOptima { cap } => {
                write!(
                    f,
                    "more than {cap} optimal configurations; raise the cap to enumerate them"
                )
            }
            Error::JointTooLarge { size, cap } => {
                write!(f, "joint frame has {size} configurations, limit is {cap}")
            }
            Error::NoFactors => write!(f, "at least one factor is required"),
            Error::InvalidProblem { detail } => write!(f, "invalid problem: {detail}"),
            Error::Parse(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::Parse(e)
    }
}

/// A problem-file syntax or consistency error, located by line number.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

pub type Result<T> = std::result::Result<T, Error>;
