//! Discrete optimization over additively (or otherwise) factored objective
//! functions, solved by local computation on a rooted Markov tree.
//!
//! A problem is a set of variables with finite frames plus factor
//! [`Valuation`]s over subsets of them. Solving arranges the factor scopes
//! in a rooted [`MarkovTree`], sends valuation messages toward the root to
//! obtain the optimum, and sends configuration messages back out to recover
//! one or all optimizing configurations. A brute-force [`oracle`] provides
//! an independent reference for differential testing.
//!
//! ```
//! use vbsolve::{solve, Problem, SolveOptions};
//!
//! let problem = Problem::parse(
//!     "variable X off on\n\
//!      variable Y off on\n\
//!      valuation F X Y\n\
//!      off off 3\n\
//!      off on 1\n\
//!      on off 4\n\
//!      on on 2\n\
//!      end\n",
//! )
//! .unwrap();
//! let result = solve(&problem, &SolveOptions::default()).unwrap();
//! assert_eq!(result.optimum, 1.0);
//! ```

pub mod algebra;
pub mod cli;
pub mod error;
pub mod oracle;
pub mod problem;
pub mod propagation;
pub mod tree;
pub mod valuation;
pub mod variables;

pub use algebra::{Algebra, Sense, Value};
pub use error::{Error, ParseError, Result};
pub use oracle::{brute_solve, joint, OracleResult, DEFAULT_MAX_JOINT};
pub use problem::{Factor, Problem, VariableDecl};
pub use propagation::{
    enumerate_optima, inward_pass, outward_pass, solve, InwardPass, InwardStep, OutwardPass,
    OutwardStep, SolveOptions, SolveResult, Trace, DEFAULT_MAX_OPTIMA,
};
pub use tree::{build_tree, osla_order, Hypergraph, MarkovTree, VertexId, Violation};
pub use valuation::{SolutionTable, Valuation};
pub use variables::{Configuration, VarSet, Variable};
