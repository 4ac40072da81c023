//! Two-phase local computation on an attached Markov tree.
//!
//! The inward pass sends valuation messages toward the root: each vertex
//! combines its own valuation with its children's messages and marginalizes
//! to the intersection with its parent. A vertex that drops exactly one
//! variable toward its parent performs a single-variable elimination and
//! stores the resulting solution table. The value reaching the root is the
//! marginal of the joint valuation for the empty set: the optimum.
//!
//! The outward pass sends configuration messages from the root back down,
//! extending each by the stored optimizing state as it passes a vertex with
//! a solution table. The collected states form one optimizing configuration;
//! branching over tie sets instead enumerates them all.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::algebra::{Algebra, Value};
use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::tree::{build_tree, osla_order, MarkovTree, VertexId};
use crate::valuation::{SolutionTable, Valuation};
use crate::variables::{Configuration, VarSet, Variable};

/// One inward message: the sending vertex, its parent, the combined table
/// at the vertex, the marginalized payload, and the solution table when a
/// variable was eliminated here.
#[derive(Clone, Debug)]
pub struct InwardStep {
    pub vertex: VarSet,
    pub parent: VarSet,
    pub combined: Valuation,
    pub message: Valuation,
    pub solution: Option<SolutionTable>,
}

/// One outward message: edge endpoints and the configuration payload over
/// their intersection.
#[derive(Clone, Debug)]
pub struct OutwardStep {
    pub from: VarSet,
    pub to: VarSet,
    pub config: Configuration,
}

/// Result of the inward pass: the optimum plus the per-vertex solution
/// tables needed to reconstruct optimizing configurations.
#[derive(Clone, Debug)]
pub struct InwardPass {
    pub optimum: Value,
    pub tables: BTreeMap<VertexId, SolutionTable>,
    pub steps: Vec<InwardStep>,
}

/// Result of the outward pass.
#[derive(Clone, Debug)]
pub struct OutwardPass {
    pub solution: Configuration,
    pub steps: Vec<OutwardStep>,
}

/// All messages of a solve, in deterministic order.
#[derive(Clone, Debug)]
pub struct Trace {
    pub inward: Vec<InwardStep>,
    pub outward: Vec<OutwardStep>,
}

/// Knobs for [`solve`].
#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Explicit elimination order; the one-step-look-ahead heuristic is used
    /// when absent.
    pub order: Option<Vec<Variable>>,
    /// Also enumerate the complete set of tied optima.
    pub all_optima: bool,
    /// Cap for the enumeration; exceeding it is an error.
    pub max_optima: usize,
    /// Keep all messages for inspection.
    pub trace: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            order: None,
            all_optima: false,
            max_optima: DEFAULT_MAX_OPTIMA,
            trace: false,
        }
    }
}

pub const DEFAULT_MAX_OPTIMA: usize = 1024;

/// What [`solve`] returns: the optimum, one optimizing configuration over
/// the full universe, optionally all of them, and optionally the message
/// trace.
#[derive(Clone, Debug)]
pub struct SolveResult {
    pub optimum: Value,
    pub solution: Configuration,
    pub all_optima: Option<Vec<Configuration>>,
    pub trace: Option<Trace>,
}

/// Send valuation messages rootward in children-before-parent order. Every
/// non-root vertex must carry an assigned valuation and may drop at most one
/// variable toward its parent. Returns the root's incoming value together
/// with the solution tables stored along the way.
pub fn inward_pass(tree: &MarkovTree, alg: &Algebra) -> Result<InwardPass> {
    let mut messages: Vec<Option<Valuation>> = vec![None; tree.vertex_count()];
    let mut tables = BTreeMap::new();
    let mut steps = Vec::new();

    for id in tree.post_order() {
        let Some(parent) = tree.parent(id) else {
            continue; // the root only receives
        };
        let own = tree.valuation(id).ok_or_else(|| Error::MissingValuation {
            vertex: tree.set(id).clone(),
        })?;
        let mut combined = own.clone();
        for &child in tree.children(id) {
            let child_message = messages[child].as_ref().expect("children precede parents");
            combined = combined.combine(child_message, alg)?;
        }
        let dropped = tree.set(id).minus(tree.set(parent));
        let (message, solution) = match dropped.len() {
            0 => (combined.clone(), None),
            1 => {
                let var = dropped.as_slice()[0];
                let (marginal, table) = combined.eliminate(var, alg)?;
                tables.insert(id, table.clone());
                (marginal, Some(table))
            }
            _ => {
                return Err(Error::UnsupportedTreeShape {
                    vertex: tree.set(id).clone(),
                    dropped,
                })
            }
        };
        debug_assert_eq!(*message.domain(), tree.set(id).intersect(tree.set(parent)));
        steps.push(InwardStep {
            vertex: tree.set(id).clone(),
            parent: tree.set(parent).clone(),
            combined,
            message: message.clone(),
            solution,
        });
        messages[id] = Some(message);
    }

    // combining the root's incoming messages (each over the empty set)
    // yields the marginal of the joint valuation at the empty configuration
    let mut optimum = alg.identity();
    for &child in tree.children(tree.root()) {
        let m = messages[child].as_ref().expect("root children processed");
        optimum = alg.combine(optimum, m.values()[0]);
    }
    Ok(InwardPass {
        optimum,
        tables,
        steps,
    })
}

fn single_state(var: Variable, state: u32) -> Configuration {
    Configuration::new(VarSet::singleton(var), vec![state]).expect("state within frame")
}

/// Send configuration messages from the root toward the leaves, extending
/// by the canonical pick at each vertex holding a solution table. The
/// assembled picks form a configuration achieving the optimum.
pub fn outward_pass(
    tree: &MarkovTree,
    tables: &BTreeMap<VertexId, SolutionTable>,
) -> Result<OutwardPass> {
    let mut incoming: Vec<Option<Configuration>> = vec![None; tree.vertex_count()];
    incoming[tree.root()] = Some(Configuration::empty());
    let mut steps = Vec::new();
    let mut solution = Configuration::empty();

    for id in tree.pre_order() {
        let received = incoming[id].clone().expect("parents precede children");
        let extended = match tables.get(&id) {
            Some(table) => {
                let state = table.pick(&received)?;
                solution = solution.concat(&single_state(table.variable(), state))?;
                received.concat(&single_state(table.variable(), state))?
            }
            None => received,
        };
        for &child in tree.children(id) {
            let payload = extended.project(&tree.set(id).intersect(tree.set(child)))?;
            steps.push(OutwardStep {
                from: tree.set(id).clone(),
                to: tree.set(child).clone(),
                config: payload.clone(),
            });
            incoming[child] = Some(payload);
        }
    }

    let universe = tree.universe();
    if solution.domain() != &universe {
        let missing = universe.minus(solution.domain());
        return Err(Error::MissingSolutionTable {
            var: missing.as_slice()[0],
        });
    }
    Ok(OutwardPass { solution, steps })
}

/// Depth-first branching over every tie set met during the outward
/// recursion. Every returned configuration achieves the optimum; the result
/// is duplicate-free, sorted, and contains the canonical solution of
/// [`outward_pass`]. Errors once more than `max_optima` configurations
/// accumulate.
pub fn enumerate_optima(
    tree: &MarkovTree,
    tables: &BTreeMap<VertexId, SolutionTable>,
    max_optima: usize,
) -> Result<Vec<Configuration>> {
    let order = tree.pre_order();
    let universe = tree.universe();
    let mut incoming: Vec<Option<Configuration>> = vec![None; tree.vertex_count()];
    incoming[tree.root()] = Some(Configuration::empty());
    let mut picks: Vec<(Variable, u32)> = Vec::new();
    let mut found: BTreeSet<Vec<u32>> = BTreeSet::new();

    branch(
        tree,
        tables,
        &order,
        0,
        &universe,
        &mut incoming,
        &mut picks,
        &mut found,
        max_optima,
    )?;

    Ok(found
        .into_iter()
        .map(|states| Configuration::new(universe.clone(), states).expect("states in frame"))
        .collect())
}

#[allow(clippy::too_many_arguments)]
fn branch(
    tree: &MarkovTree,
    tables: &BTreeMap<VertexId, SolutionTable>,
    order: &[VertexId],
    step: usize,
    universe: &VarSet,
    incoming: &mut Vec<Option<Configuration>>,
    picks: &mut Vec<(Variable, u32)>,
    found: &mut BTreeSet<Vec<u32>>,
    max_optima: usize,
) -> Result<()> {
    if step == order.len() {
        let mut solution = Configuration::empty();
        for (var, state) in picks.iter() {
            solution = solution.concat(&single_state(*var, *state))?;
        }
        if solution.domain() != universe {
            let missing = universe.minus(solution.domain());
            return Err(Error::MissingSolutionTable {
                var: missing.as_slice()[0],
            });
        }
        found.insert(solution.states().to_vec());
        if found.len() > max_optima {
            return Err(Error::TooManyOptima { cap: max_optima });
        }
        return Ok(());
    }

    let id = order[step];
    let received = incoming[id].clone().expect("parents precede children");
    match tables.get(&id) {
        Some(table) => {
            let ties = table.ties(&received)?.to_vec();
            for state in ties {
                let extended = received.concat(&single_state(table.variable(), state))?;
                for &child in tree.children(id) {
                    incoming[child] =
                        Some(extended.project(&tree.set(id).intersect(tree.set(child)))?);
                }
                picks.push((table.variable(), state));
                let result = branch(
                    tree,
                    tables,
                    order,
                    step + 1,
                    universe,
                    incoming,
                    picks,
                    found,
                    max_optima,
                );
                picks.pop();
                result?;
            }
        }
        None => {
            for &child in tree.children(id) {
                incoming[child] = Some(received.project(&tree.set(id).intersect(tree.set(child)))?);
            }
            branch(
                tree,
                tables,
                order,
                step + 1,
                universe,
                incoming,
                picks,
                found,
                max_optima,
            )?;
        }
    }
    Ok(())
}

/// Order, arrange, attach, and propagate: the full pipeline from a problem
/// to its optimum and optimizing configuration(s).
pub fn solve(problem: &Problem, options: &SolveOptions) -> Result<SolveResult> {
    let alg = problem.algebra();
    let hypergraph = problem.hypergraph();
    let order = match &options.order {
        Some(order) => order.clone(),
        None => osla_order(&hypergraph),
    };
    let tree = build_tree(&hypergraph, &order)?;
    let attached = tree.attach_valuations(problem.factor_valuations(), &alg)?;

    let inward = inward_pass(&attached, &alg)?;
    let outward = outward_pass(&attached, &inward.tables)?;
    debug_assert_eq!(problem.evaluate(&outward.solution)?, inward.optimum);

    let all_optima = if options.all_optima {
        Some(enumerate_optima(
            &attached,
            &inward.tables,
            options.max_optima,
        )?)
    } else {
        None
    };
    let trace = options.trace.then_some(Trace {
        inward: inward.steps,
        outward: outward.steps,
    });
    Ok(SolveResult {
        optimum: inward.optimum,
        solution: outward.solution,
        all_optima,
        trace,
    })
}
