//! Shared generators for the randomized integration suites. Everything is
//! driven by a caller-supplied RNG so runs are reproducible from a seed.

#![allow(dead_code)]

use rand::prelude::IndexedRandom;
use rand::seq::SliceRandom;
use rand::Rng;
use vbsolve::{Hypergraph, Problem, Sense, Valuation, VarSet, Variable, VariableDecl};

pub const FIVE_VARS: &str = include_str!("../fixtures/five_vars.vbs");

/// A random problem: up to `max_vars` variables with frames of size 1..=3,
/// up to `max_factors` factors with integer tables, every variable covered.
pub fn random_problem(
    rng: &mut impl Rng,
    max_vars: usize,
    max_factors: usize,
    sense: Sense,
) -> Problem {
    let n_vars = rng.random_range(1..=max_vars);
    let cards: Vec<usize> = (0..n_vars).map(|_| rng.random_range(1..=3)).collect();
    let decls: Vec<VariableDecl> = cards
        .iter()
        .enumerate()
        .map(|(i, c)| VariableDecl {
            name: format!("V{i}"),
            states: (0..*c).map(|s| format!("s{s}")).collect(),
        })
        .collect();
    let vars: Vec<Variable> = cards
        .iter()
        .enumerate()
        .map(|(i, c)| Variable::new(i, *c))
        .collect();

    let n_factors = rng.random_range(1..=max_factors);
    let mut factors = Vec::new();
    for fi in 0..n_factors {
        let mut members: Vec<Variable> = vars
            .iter()
            .copied()
            .filter(|_| rng.random_bool(0.45))
            .collect();
        if members.is_empty() {
            members.push(*vars.choose(rng).unwrap());
        }
        let scope = VarSet::new(members);
        factors.push((format!("F{fi}"), random_table(rng, scope)));
    }
    // cover any variable not yet in a scope
    let covered = factors
        .iter()
        .fold(VarSet::empty(), |acc, (_, v)| acc.union(v.domain()));
    let missing: Vec<Variable> = vars
        .iter()
        .copied()
        .filter(|v| !covered.contains(*v))
        .collect();
    if !missing.is_empty() {
        factors.push((
            "Fcover".to_string(),
            random_table(rng, VarSet::new(missing)),
        ));
    }
    Problem::new(sense, decls, factors).unwrap()
}

pub fn random_table(rng: &mut impl Rng, scope: VarSet) -> Valuation {
    let size = scope.frame_size().unwrap();
    let values: Vec<f64> = (0..size)
        .map(|_| rng.random_range(-20i64..=20) as f64)
        .collect();
    Valuation::new(scope, values).unwrap()
}

pub fn random_order(rng: &mut impl Rng, problem: &Problem) -> Vec<Variable> {
    let mut order = problem.variables().to_vec();
    order.shuffle(rng);
    order
}

/// A random connected hypergraph over 2..=6 binary variables. Scopes are
/// chained through a shared variable so the arranged tree keeps a single
/// root child.
pub fn random_connected_hypergraph(rng: &mut impl Rng) -> (Vec<Variable>, Hypergraph) {
    let n = rng.random_range(2..=6);
    let vars: Vec<Variable> = (0..n).map(|i| Variable::new(i, 2)).collect();
    let n_edges = rng.random_range(1..=5);
    let mut scopes: Vec<VarSet> = (0..n_edges)
        .map(|_| {
            let mut members: Vec<Variable> = vars
                .iter()
                .copied()
                .filter(|_| rng.random_bool(0.4))
                .collect();
            if members.is_empty() {
                members.push(*vars.choose(rng).unwrap());
            }
            VarSet::new(members)
        })
        .collect();
    let covered = scopes.iter().fold(VarSet::empty(), |a, s| a.union(s));
    let missing: Vec<Variable> = vars
        .iter()
        .copied()
        .filter(|v| !covered.contains(*v))
        .collect();
    if !missing.is_empty() {
        scopes.push(VarSet::new(missing));
    }
    for i in 1..scopes.len() {
        let link = scopes[i - 1].as_slice()[0];
        scopes[i] = scopes[i].union(&VarSet::singleton(link));
    }
    (vars, Hypergraph::new(scopes).unwrap())
}
