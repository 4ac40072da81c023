//! Arranging factor scopes in a rooted Markov tree.
//!
//! The tree's vertices are variable sets, the root is the empty set, and all
//! edges point rootward. Construction follows a marking loop over an
//! elimination order: at each step the union `g` of the working hyperedges
//! containing the marked variable is parented to `f = g − {X}`, the touched
//! hyperedges are parented to `g`, and `f` replaces them in the working set.
//! Any variable shared by two vertices then appears on every vertex of the
//! connecting path, which is what makes local propagation sound.

use std::collections::HashMap;

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::valuation::Valuation;
use crate::variables::{VarSet, Variable};

/// The collection of factor scopes, deduplicated. Its universe is the union
/// of all hyperedges, so every variable is covered by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Hypergraph {
    edges: Vec<VarSet>,
}

impl Hypergraph {
    /// Build from scopes, dropping duplicates and rejecting empty sets.
    pub fn new(scopes: impl IntoIterator<Item = VarSet>) -> Result<Self> {
        let mut edges: Vec<VarSet> = Vec::new();
        for s in scopes {
            if s.is_empty() {
                return Err(Error::InvalidProblem {
                    detail: "hyperedges must be non-empty".into(),
                });
            }
            if !edges.contains(&s) {
                edges.push(s);
            }
        }
        Ok(Hypergraph { edges })
    }

    pub fn edges(&self) -> &[VarSet] {
        &self.edges
    }

    pub fn universe(&self) -> VarSet {
        self.edges
            .iter()
            .fold(VarSet::empty(), |acc, e| acc.union(e))
    }
}

/// Vertex handle into a [`MarkovTree`].
pub type VertexId = usize;

#[derive(Clone, Debug)]
struct Vertex {
    set: VarSet,
    parent: Option<VertexId>,
    children: Vec<VertexId>,
    eliminated: Option<Variable>,
    valuation: Option<Valuation>,
}

/// A tree of variable subsets rooted at the empty set, with edges directed
/// toward the root. After [`MarkovTree::attach_valuations`], every non-empty
/// vertex carries exactly one valuation.
#[derive(Clone, Debug)]
pub struct MarkovTree {
    vertices: Vec<Vertex>,
    root: VertexId,
}

impl MarkovTree {
    /// Assemble a tree from explicit vertices and parent pointers, for
    /// hand-built structures. Structural properties are not enforced here;
    /// run [`MarkovTree::validate`] to check them. Panics unless indices are
    /// in range and some vertex is parentless.
    pub fn from_parents(sets: Vec<VarSet>, parents: Vec<Option<VertexId>>) -> Self {
        assert_eq!(sets.len(), parents.len());
        let mut vertices: Vec<Vertex> = sets
            .into_iter()
            .map(|set| Vertex {
                set,
                parent: None,
                children: Vec::new(),
                eliminated: None,
                valuation: None,
            })
            .collect();
        let mut root = None;
        for (id, p) in parents.iter().enumerate() {
            match p {
                Some(pid) => {
                    assert!(*pid < vertices.len(), "parent index out of range");
                    vertices[id].parent = Some(*pid);
                }
                None => root = Some(id),
            }
        }
        let root = root.expect("a tree needs a parentless vertex");
        for id in 0..vertices.len() {
            if let Some(pid) = vertices[id].parent {
                vertices[pid].children.push(id);
            }
        }
        MarkovTree { vertices, root }
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        0..self.vertices.len()
    }

    pub fn set(&self, id: VertexId) -> &VarSet {
        &self.vertices[id].set
    }

    pub fn parent(&self, id: VertexId) -> Option<VertexId> {
        self.vertices[id].parent
    }

    pub fn children(&self, id: VertexId) -> &[VertexId] {
        &self.vertices[id].children
    }

    /// The variable dropped at this vertex toward its parent, when the drop
    /// is a singleton.
    pub fn eliminated(&self, id: VertexId) -> Option<Variable> {
        self.vertices[id].eliminated
    }

    pub fn valuation(&self, id: VertexId) -> Option<&Valuation> {
        self.vertices[id].valuation.as_ref()
    }

    /// All variables appearing in some vertex.
    pub fn universe(&self) -> VarSet {
        self.vertices
            .iter()
            .fold(VarSet::empty(), |acc, v| acc.union(&v.set))
    }

    /// Frame size of the largest vertex, the usual cost measure of an
    /// arrangement.
    pub fn max_vertex_frame(&self) -> u128 {
        self.vertices
            .iter()
            .map(|v| v.set.frame_size_saturating())
            .max()
            .unwrap_or(1)
    }

    pub fn find_vertex(&self, set: &VarSet) -> Option<VertexId> {
        self.vertices.iter().position(|v| &v.set == set)
    }

    /// Vertices in children-before-parent order, children in construction
    /// order; the deterministic schedule used by propagation.
    pub fn post_order(&self) -> Vec<VertexId> {
        let mut out = Vec::with_capacity(self.vertices.len());
        // stack of (vertex, expanded)
        let mut stack = vec![(self.root, false)];
        while let Some((id, expanded)) = stack.pop() {
            if expanded {
                out.push(id);
            } else {
                stack.push((id, true));
                for &c in self.vertices[id].children.iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    pub fn pre_order(&self) -> Vec<VertexId> {
        let mut out = Vec::with_capacity(self.vertices.len());
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            out.push(id);
            for &c in self.vertices[id].children.iter().rev() {
                stack.push(c);
            }
        }
        out
    }

    /// Check the structural properties: a unique empty-set root, rootward
    /// parent pointers, the running-intersection property, and a single
    /// root child. Violations are data, not errors.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();

        let parentless: Vec<VertexId> = self
            .vertex_ids()
            .filter(|&id| self.vertices[id].parent.is_none())
            .collect();
        for &id in &parentless {
            if id != self.root {
                violations.push(Violation::ExtraRoot {
                    vertex: self.vertices[id].set.clone(),
                });
            }
        }
        if !self.vertices[self.root].set.is_empty() {
            violations.push(Violation::RootNotEmpty {
                vertex: self.vertices[self.root].set.clone(),
            });
        }

        // orientation: every vertex must reach the root without revisiting
        let mut reaches = vec![false; self.vertices.len()];
        reaches[self.root] = true;
        for order_id in self.pre_order() {
            if let Some(p) = self.vertices[order_id].parent {
                if reaches[p] {
                    reaches[order_id] = true;
                }
            }
        }
        for id in self.vertex_ids() {
            if !reaches[id] {
                violations.push(Violation::Unreachable {
                    vertex: self.vertices[id].set.clone(),
                });
            }
        }

        if self.vertices[self.root].children.len() != 1 {
            violations.push(Violation::RootChildCount {
                count: self.vertices[self.root].children.len(),
            });
        }

        // running intersection: the vertices containing a variable form a
        // connected subtree, so checking each variable of the universe is
        // enough; path walks need a sound structure first
        let structurally_sound = violations.iter().all(|v| {
            !matches!(
                v,
                Violation::Unreachable { .. } | Violation::ExtraRoot { .. }
            )
        });
        if structurally_sound {
            for var in self.universe().iter() {
                self.check_variable_path(var, &mut violations);
            }
        }
        violations
    }

    fn check_variable_path(&self, var: Variable, violations: &mut Vec<Violation>) {
        let holders: Vec<VertexId> = self
            .vertex_ids()
            .filter(|&id| self.vertices[id].set.contains(var))
            .collect();
        if holders.len() <= 1 {
            return;
        }
        // The spanning subtree of the holders is the union of their paths to
        // the deepest common ancestor; every vertex on it must contain var.
        let path_to_root = |mut id: VertexId| -> Vec<VertexId> {
            let mut path = vec![id];
            while let Some(p) = self.vertices[id].parent {
                path.push(p);
                id = p;
            }
            path
        };
        let first = path_to_root(holders[0]);
        let mut lca_candidates: Vec<VertexId> = first.clone();
        let mut spanning: Vec<Vec<VertexId>> = vec![first];
        for &h in &holders[1..] {
            let path = path_to_root(h);
            lca_candidates.retain(|id| path.contains(id));
            spanning.push(path);
        }
        let lca = lca_candidates[0];
        let mut offenders: Vec<VertexId> = Vec::new();
        for path in &spanning {
            for &id in path.iter().take_while(|&&id| id != lca).chain([&lca]) {
                if !self.vertices[id].set.contains(var) && !offenders.contains(&id) {
                    offenders.push(id);
                }
            }
        }
        for id in offenders {
            violations.push(Violation::BrokenPath {
                var,
                vertex: self.vertices[id].set.clone(),
            });
        }
    }

    /// A copy of the tree in which every non-empty vertex carries one
    /// valuation: the combination of the factors with that exact scope, or
    /// the vacuous valuation when none apply.
    pub fn attach_valuations<'a>(
        &self,
        factors: impl IntoIterator<Item = &'a Valuation>,
        alg: &Algebra,
    ) -> Result<MarkovTree> {
        let mut tree = self.clone();
        let mut by_vertex: Vec<Option<Valuation>> = vec![None; tree.vertices.len()];
        for factor in factors {
            let id = tree
                .find_vertex(factor.domain())
                .ok_or(Error::ScopeNotInTree {
                    scope: factor.domain().clone(),
                })?;
            by_vertex[id] = Some(match by_vertex[id].take() {
                Some(existing) => existing.combine(factor, alg)?,
                None => factor.clone(),
            });
        }
        for id in tree.vertex_ids() {
            if id == tree.root {
                continue;
            }
            let set = tree.vertices[id].set.clone();
            tree.vertices[id].valuation = Some(match by_vertex[id].take() {
                Some(v) => v,
                None => Valuation::vacuous(set, alg)?,
            });
        }
        Ok(tree)
    }

    /// Graphviz rendering; edges run child to parent. `name` maps variables
    /// to display labels.
    pub fn to_dot<F: Fn(Variable) -> String>(&self, name: F) -> String {
        let label = |id: VertexId| -> String { render_set(&self.vertices[id].set, &name) };
        let mut out = String::from("digraph rooted_markov_tree {\n");
        for id in self.vertex_ids() {
            out.push_str(&format!("  \"{}\";\n", label(id)));
        }
        for id in self.vertex_ids() {
            if let Some(p) = self.vertices[id].parent {
                out.push_str(&format!("  \"{}\" -> \"{}\";\n", label(id), label(p)));
            }
        }
        out.push_str("}\n");
        out
    }

    /// Indented text rendering, root first.
    pub fn render_text<F: Fn(Variable) -> String>(&self, name: F) -> String {
        let mut out = String::new();
        self.render_vertex(self.root, "", "", &name, &mut out);
        out
    }

    fn render_vertex<F: Fn(Variable) -> String>(
        &self,
        id: VertexId,
        lead: &str,
        cont: &str,
        name: &F,
        out: &mut String,
    ) {
        out.push_str(lead);
        out.push_str(&render_set(&self.vertices[id].set, name));
        out.push('\n');
        let children = &self.vertices[id].children;
        for (i, &c) in children.iter().enumerate() {
            let last = i + 1 == children.len();
            let branch = if last { "`- " } else { "+- " };
            let next_cont = if last { "   " } else { "|  " };
            self.render_vertex(
                c,
                &format!("{cont}{branch}"),
                &format!("{cont}{next_cont}"),
                name,
                out,
            );
        }
    }
}

pub(crate) fn render_set<F: Fn(Variable) -> String>(set: &VarSet, name: &F) -> String {
    let names: Vec<String> = set.iter().map(name).collect();
    format!("{{{}}}", names.join(","))
}

/// A failed structural check, reported by [`MarkovTree::validate`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    /// A parentless vertex other than the designated root.
    ExtraRoot { vertex: VarSet },
    /// The root vertex is not the empty set.
    RootNotEmpty { vertex: VarSet },
    /// A vertex whose parent chain does not reach the root.
    Unreachable { vertex: VarSet },
    /// The root does not have exactly one child.
    RootChildCount { count: usize },
    /// `var` is shared by two vertices but missing from `vertex` on the
    /// path between them.
    BrokenPath { var: Variable, vertex: VarSet },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::ExtraRoot { vertex } => write!(f, "extra root {vertex}"),
            Violation::RootNotEmpty { vertex } => write!(f, "root {vertex} is not the empty set"),
            Violation::Unreachable { vertex } => {
                write!(f, "vertex {vertex} does not reach the root")
            }
            Violation::RootChildCount { count } => {
                write!(f, "root has {count} children, expected 1")
            }
            Violation::BrokenPath { var, vertex } => {
                write!(f, "variable {var} missing from path vertex {vertex}")
            }
        }
    }
}

/// Run the marking loop over `order`, which must be a permutation of the
/// hypergraph's universe. Every original hyperedge becomes a vertex; the
/// added vertices are the `g`/`f` sets of each step. The vertex where a
/// variable is dropped records it as its eliminated variable.
pub fn build_tree(hypergraph: &Hypergraph, order: &[Variable]) -> Result<MarkovTree> {
    let universe = hypergraph.universe();
    check_order(&universe, order)?;

    let mut vertices: Vec<Vertex> = Vec::new();
    let mut by_set: HashMap<VarSet, VertexId> = HashMap::new();
    let mut intern = |set: VarSet, vertices: &mut Vec<Vertex>| -> VertexId {
        if let Some(&id) = by_set.get(&set) {
            return id;
        }
        let id = vertices.len();
        by_set.insert(set.clone(), id);
        vertices.push(Vertex {
            set,
            parent: None,
            children: Vec::new(),
            eliminated: None,
            valuation: None,
        });
        id
    };

    let mut working: Vec<VertexId> = Vec::new();
    for edge in hypergraph.edges() {
        let id = intern(edge.clone(), &mut vertices);
        if !working.contains(&id) {
            working.push(id);
        }
    }

    for &var in order {
        let members: Vec<VertexId> = working
            .iter()
            .copied()
            .filter(|&id| vertices[id].set.contains(var))
            .collect();
        debug_assert!(!members.is_empty(), "order variables stay covered");
        let g_set = members
            .iter()
            .fold(VarSet::empty(), |acc, &id| acc.union(&vertices[id].set));
        let f_set = g_set.remove(var);
        let g = intern(g_set, &mut vertices);
        let f = intern(f_set, &mut vertices);
        for &m in &members {
            if m != g {
                vertices[m].parent = Some(g);
                vertices[g].children.push(m);
            }
        }
        vertices[g].parent = Some(f);
        vertices[f].children.push(g);
        vertices[g].eliminated = Some(var);

        working.retain(|&id| !vertices[id].set.contains(var));
        if !working.contains(&f) {
            working.push(f);
        }
    }

    let root = *by_set
        .get(&VarSet::empty())
        .expect("final drop adds the root");
    Ok(MarkovTree { vertices, root })
}

fn check_order(universe: &VarSet, order: &[Variable]) -> Result<()> {
    let order_set = VarSet::new(order.iter().copied());
    if order_set.len() != order.len() {
        return Err(Error::OrderMismatch {
            detail: "order repeats a variable".into(),
        });
    }
    if order_set != *universe {
        return Err(Error::OrderMismatch {
            detail: format!("order covers {order_set}, universe is {universe}"),
        });
    }
    Ok(())
}

/// Greedy one-step-look-ahead ordering: repeatedly mark the variable whose
/// next added subset `f` has the smallest frame, updating the working
/// hyperedges exactly as [`build_tree`] does. Ties go to the variable with
/// the smallest declaration index, so the result is deterministic.
pub fn osla_order(hypergraph: &Hypergraph) -> Vec<Variable> {
    let mut working: Vec<VarSet> = hypergraph.edges().to_vec();
    let mut remaining: Vec<Variable> = hypergraph.universe().iter().collect();
    let mut order = Vec::with_capacity(remaining.len());

    while !remaining.is_empty() {
        let mut best: Option<(u128, Variable, VarSet)> = None;
        for &var in &remaining {
            let g = working
                .iter()
                .filter(|h| h.contains(var))
                .fold(VarSet::empty(), |acc, h| acc.union(h));
            let f = g.remove(var);
            let cost = f.frame_size_saturating();
            let candidate_wins = match &best {
                None => true,
                Some((c, v, _)) => cost < *c || (cost == *c && var.index() < v.index()),
            };
            if candidate_wins {
                best = Some((cost, var, f));
            }
        }
        let (_, var, f) = best.expect("remaining is non-empty");
        order.push(var);
        remaining.retain(|v| *v != var);
        working.retain(|h| !h.contains(var));
        if !f.is_empty() && !working.contains(&f) {
            working.push(f);
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variables::Configuration;
    use proptest::prelude::*;

    fn vars() -> Vec<Variable> {
        (0..5).map(|i| Variable::new(i, 2)).collect()
    }

    fn five_var_scopes() -> (Vec<Variable>, Hypergraph) {
        let v = vars();
        let h = Hypergraph::new([
            VarSet::new([v[0], v[2], v[4]]),
            VarSet::new([v[0], v[1]]),
            VarSet::new([v[1], v[3], v[4]]),
        ])
        .unwrap();
        (v, h)
    }

    #[test]
    fn builds_the_expected_eight_vertex_tree() {
        let (v, h) = five_var_scopes();
        // explicit order C,D,E,B,A
        let order = [v[2], v[3], v[4], v[1], v[0]];
        let tree = build_tree(&h, &order).unwrap();

        let expect: Vec<VarSet> = vec![
            VarSet::new([v[0], v[2], v[4]]),
            VarSet::new([v[0], v[1]]),
            VarSet::new([v[1], v[3], v[4]]),
            VarSet::new([v[0], v[4]]),
            VarSet::new([v[1], v[4]]),
            VarSet::new([v[0], v[1], v[4]]),
            VarSet::new([v[0]]),
            VarSet::empty(),
        ];
        assert_eq!(tree.vertex_count(), 8);
        for set in &expect {
            assert!(tree.find_vertex(set).is_some(), "missing vertex {set}");
        }

        let edge = |a: &VarSet, b: &VarSet| {
            let ia = tree.find_vertex(a).unwrap();
            let ib = tree.find_vertex(b).unwrap();
            assert_eq!(tree.parent(ia), Some(ib), "expected edge {a} -> {b}");
        };
        edge(&expect[0], &expect[3]); // ACE -> AE
        edge(&expect[2], &expect[4]); // BDE -> BE
        edge(&expect[3], &expect[5]); // AE -> ABE
        edge(&expect[4], &expect[5]); // BE -> ABE
        edge(&expect[5], &expect[1]); // ABE -> AB
        edge(&expect[1], &expect[6]); // AB -> A
        edge(&expect[6], &expect[7]); // A -> {}

        assert!(tree.validate().is_empty());

        // the eliminated variables are exactly the universe, at the g vertices
        let mut eliminated: Vec<Variable> = tree
            .vertex_ids()
            .filter_map(|id| tree.eliminated(id))
            .collect();
        eliminated.sort();
        assert_eq!(eliminated, v);
        assert_eq!(
            tree.eliminated(tree.find_vertex(&expect[0]).unwrap()),
            Some(v[2])
        );
        assert_eq!(
            tree.eliminated(tree.find_vertex(&expect[5]).unwrap()),
            Some(v[4])
        );
    }

    #[test]
    fn single_hyperedge_cases() {
        let a = Variable::new(0, 2);
        let b = Variable::new(1, 2);

        let h = Hypergraph::new([VarSet::singleton(a)]).unwrap();
        let tree = build_tree(&h, &[a]).unwrap();
        assert_eq!(tree.vertex_count(), 2);
        assert_eq!(
            tree.parent(tree.find_vertex(&VarSet::singleton(a)).unwrap()),
            Some(tree.root())
        );

        let h = Hypergraph::new([VarSet::new([a, b])]).unwrap();
        let tree = build_tree(&h, &[a, b]).unwrap();
        assert_eq!(tree.vertex_count(), 3);
        let ab = tree.find_vertex(&VarSet::new([a, b])).unwrap();
        let bset = tree.find_vertex(&VarSet::singleton(b)).unwrap();
        assert_eq!(tree.parent(ab), Some(bset));
        assert_eq!(tree.parent(bset), Some(tree.root()));
        assert!(tree.validate().is_empty());
    }

    #[test]
    fn order_must_match_universe() {
        let (v, h) = five_var_scopes();
        assert!(matches!(
            build_tree(&h, &[v[0], v[1]]).unwrap_err(),
            Error::OrderMismatch { .. }
        ));
        assert!(matches!(
            build_tree(&h, &[v[0], v[0], v[1], v[2], v[3]]).unwrap_err(),
            Error::OrderMismatch { .. }
        ));
    }

    #[test]
    fn osla_prefers_small_added_frames() {
        let (v, h) = five_var_scopes();
        let order = osla_order(&h);
        assert_eq!(order, vec![v[2], v[0], v[1], v[3], v[4]]); // C,A,B,D,E
        let tree = build_tree(&h, &order).unwrap();
        assert!(tree.validate().is_empty());
        assert_eq!(tree.max_vertex_frame(), 8);
        // deterministic
        assert_eq!(osla_order(&h), order);
    }

    #[test]
    fn osla_breaks_full_ties_by_declaration_order() {
        let a = Variable::new(0, 2);
        let b = Variable::new(1, 2);
        let h = Hypergraph::new([VarSet::new([a, b])]).unwrap();
        assert_eq!(osla_order(&h), vec![a, b]);
    }

    #[test]
    fn validate_flags_a_broken_path() {
        let v = vars();
        // {A,B} -> {B} -> {A,C} -> {} ; A is missing from {B}
        let sets = vec![
            VarSet::new([v[0], v[1]]),
            VarSet::new([v[1]]),
            VarSet::new([v[0], v[2]]),
            VarSet::empty(),
        ];
        let tree = MarkovTree::from_parents(sets, vec![Some(1), Some(2), Some(3), None]);
        let violations = tree.validate();
        assert_eq!(
            violations,
            vec![Violation::BrokenPath {
                var: v[0],
                vertex: VarSet::new([v[1]]),
            }]
        );
    }

    #[test]
    fn validate_flags_root_shape_problems() {
        let v = vars();
        // chain {A} -> {} is fine
        let chain = MarkovTree::from_parents(
            vec![VarSet::singleton(v[0]), VarSet::empty()],
            vec![Some(1), None],
        );
        assert!(chain.validate().is_empty());

        // non-empty root
        let bad_root = MarkovTree::from_parents(
            vec![VarSet::singleton(v[0]), VarSet::new([v[0], v[1]])],
            vec![Some(1), None],
        );
        assert!(bad_root.validate().contains(&Violation::RootNotEmpty {
            vertex: VarSet::new([v[0], v[1]])
        }));

        // two root children, as a disconnected problem produces
        let h = Hypergraph::new([VarSet::singleton(v[0]), VarSet::singleton(v[1])]).unwrap();
        let tree = build_tree(&h, &[v[0], v[1]]).unwrap();
        assert_eq!(
            tree.validate(),
            vec![Violation::RootChildCount { count: 2 }]
        );
    }

    #[test]
    fn attach_combines_and_fills_vacuous() {
        let (v, h) = five_var_scopes();
        let alg = Algebra::min_sum();
        let order = [v[2], v[3], v[4], v[1], v[0]];
        let tree = build_tree(&h, &order).unwrap();

        let f2 = Valuation::new(VarSet::new([v[0], v[1]]), vec![4.0, 8.0, 0.0, 5.0]).unwrap();
        let f2b = Valuation::new(VarSet::new([v[0], v[1]]), vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        let attached = tree.attach_valuations(&[f2.clone(), f2b], &alg).unwrap();

        let ab = attached.find_vertex(&VarSet::new([v[0], v[1]])).unwrap();
        assert_eq!(
            attached.valuation(ab).unwrap().values(),
            &[5.0, 9.0, 1.0, 6.0]
        );
        let ae = attached.find_vertex(&VarSet::new([v[0], v[4]])).unwrap();
        assert_eq!(attached.valuation(ae).unwrap().values(), &[0.0; 4]);
        assert!(attached.valuation(attached.root()).is_none());

        // a factor whose scope is no vertex is rejected
        let stray = Valuation::new(VarSet::new([v[2], v[3]]), vec![0.0; 4]).unwrap();
        assert!(matches!(
            tree.attach_valuations(&[stray], &alg).unwrap_err(),
            Error::ScopeNotInTree { .. }
        ));
    }

    #[test]
    fn dot_lists_every_vertex_and_rootward_edge() {
        let a = Variable::new(0, 2);
        let b = Variable::new(1, 2);
        let h = Hypergraph::new([VarSet::new([a, b])]).unwrap();
        let tree = build_tree(&h, &[a, b]).unwrap();
        let names = ["A", "B"];
        let dot = tree.to_dot(|v| names[v.index()].to_string());
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("\"{A,B}\" -> \"{B}\";"));
        assert!(dot.contains("\"{B}\" -> \"{}\";"));
        assert!(dot.contains("  \"{}\";\n"));
    }

    // random connected hypergraphs: every order yields a valid tree
    fn arb_connected_hypergraph() -> impl Strategy<Value = (Vec<Variable>, Hypergraph)> {
        (2usize..=6)
            .prop_flat_map(|n| {
                let vars: Vec<Variable> = (0..n).map(|i| Variable::new(i, 2)).collect();
                let edge = proptest::collection::vec(any::<bool>(), n)
                    .prop_filter("non-empty", |m| m.iter().any(|b| *b));
                (Just(vars), proptest::collection::vec(edge, 1..=5))
            })
            .prop_map(|(vars, masks)| {
                let mut scopes: Vec<VarSet> = masks
                    .iter()
                    .map(|m| {
                        vars.iter()
                            .zip(m)
                            .filter(|(_, keep)| **keep)
                            .map(|(v, _)| *v)
                            .collect()
                    })
                    .collect();
                // cover all variables, then chain the scopes so the
                // hypergraph is connected and the root keeps a single child
                let covered: VarSet = scopes.iter().fold(VarSet::empty(), |a, s| a.union(s));
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
                (vars.clone(), Hypergraph::new(scopes).unwrap())
            })
    }

    proptest! {
        #[test]
        fn random_orders_build_valid_markov_trees(
            ((vars, h), seed) in (arb_connected_hypergraph(), any::<u64>())
        ) {
            // derive a permutation from the seed
            let mut order = vars.clone();
            let mut s = seed;
            for i in (1..order.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                order.swap(i, (s >> 33) as usize % (i + 1));
            }
            let tree = build_tree(&h, &order).unwrap();
            prop_assert!(tree.validate().is_empty());
            // every original hyperedge is a vertex
            for e in h.edges() {
                prop_assert!(tree.find_vertex(e).is_some());
            }
            // single-variable drops everywhere
            for id in tree.vertex_ids() {
                if let Some(p) = tree.parent(id) {
                    let dropped = tree.set(id).minus(tree.set(p));
                    prop_assert!(dropped.len() <= 1);
                    prop_assert_eq!(tree.eliminated(id).is_some(), dropped.len() == 1);
                }
            }
            // eliminated variables cover the universe exactly once
            let mut elim: Vec<Variable> =
                tree.vertex_ids().filter_map(|id| tree.eliminated(id)).collect();
            elim.sort();
            prop_assert_eq!(elim, {
                let mut v = vars;
                v.sort();
                v
            });
            // osla produces a permutation and a valid tree too
            let heuristic = osla_order(&h);
            let tree2 = build_tree(&h, &heuristic).unwrap();
            prop_assert!(tree2.validate().is_empty());

            // projecting a configuration along any edge stays consistent
            let _ = Configuration::empty();
        }
    }
}
