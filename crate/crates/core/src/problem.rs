//! The problem model and its text file format.
//!
//! A problem file is line oriented; `#` starts a comment and tokens are
//! whitespace separated:
//!
//! ```text
//! objective min            # optional, min is the default
//! variable A a ~a          # name followed by at least one state label
//! valuation F1 A C E       # name followed by its scope
//! a c e 1                  # one line per configuration: states then value
//! a c ~e 3
//! end                      # closes the valuation; missing rows default to 0
//! ```
//!
//! Values are decimal reals; `inf` marks a forbidden configuration. Every
//! declared variable must appear in some valuation scope.

use std::collections::HashMap;

use crate::algebra::{Algebra, Sense, Value};
use crate::error::{Error, ParseError, Result};
use crate::tree::Hypergraph;
use crate::valuation::Valuation;
use crate::variables::{Configuration, VarSet, Variable};

/// A named variable declaration: display name plus ordered state labels.
#[derive(Clone, Debug, PartialEq)]
pub struct VariableDecl {
    pub name: String,
    pub states: Vec<String>,
}

/// A named factor of the objective.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub name: String,
    pub valuation: Valuation,
}

/// Variables with frames, the factor valuations, and the objective sense.
/// The canonical variable order is the declaration order.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    sense: Sense,
    decls: Vec<VariableDecl>,
    vars: Vec<Variable>,
    factors: Vec<Factor>,
}

impl Problem {
    pub fn new(
        sense: Sense,
        variables: Vec<VariableDecl>,
        factors: Vec<(String, Valuation)>,
    ) -> Result<Self> {
        let invalid = |detail: &str| Error::InvalidProblem {
            detail: detail.to_string(),
        };
        if variables.is_empty() {
            return Err(invalid("a problem needs at least one variable"));
        }
        if factors.is_empty() {
            return Err(Error::NoFactors);
        }
        let mut seen_names = HashMap::new();
        for (i, d) in variables.iter().enumerate() {
            if seen_names.insert(d.name.clone(), i).is_some() {
                return Err(invalid(&format!("duplicate variable '{}'", d.name)));
            }
            if d.states.is_empty() {
                return Err(invalid(&format!(
                    "variable '{}' has an empty frame",
                    d.name
                )));
            }
            let mut labels = d.states.clone();
            labels.sort();
            labels.dedup();
            if labels.len() != d.states.len() {
                return Err(invalid(&format!(
                    "variable '{}' repeats a state label",
                    d.name
                )));
            }
        }
        let vars: Vec<Variable> = variables
            .iter()
            .enumerate()
            .map(|(i, d)| Variable::new(i, d.states.len()))
            .collect();
        let mut used = vec![false; vars.len()];
        for (name, valuation) in &factors {
            for v in valuation.domain().iter() {
                let matches_decl = vars
                    .get(v.index())
                    .is_some_and(|decl| decl.cardinality() == v.cardinality());
                if !matches_decl {
                    return Err(invalid(&format!(
                        "factor '{name}' uses a variable that is not declared"
                    )));
                }
                used[v.index()] = true;
            }
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(invalid(&format!(
                "variable '{}' is not used by any valuation",
                variables[i].name
            )));
        }
        Ok(Problem {
            sense,
            decls: variables,
            vars,
            factors: factors
                .into_iter()
                .map(|(name, valuation)| Factor { name, valuation })
                .collect(),
        })
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn algebra(&self) -> Algebra {
        Algebra::for_sense(self.sense)
    }

    /// Variable handles in declaration order.
    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn factor_valuations(&self) -> impl Iterator<Item = &Valuation> {
        self.factors.iter().map(|f| &f.valuation)
    }

    pub fn universe(&self) -> VarSet {
        VarSet::new(self.vars.iter().copied())
    }

    /// The factor scopes, deduplicated.
    pub fn hypergraph(&self) -> Hypergraph {
        Hypergraph::new(self.factors.iter().map(|f| f.valuation.domain().clone()))
            .expect("factor scopes are non-empty")
    }

    /// The joint objective at a full configuration: the combination of all
    /// factor values there.
    pub fn evaluate(&self, x: &Configuration) -> Result<Value> {
        let alg = self.algebra();
        let mut total = alg.identity();
        for f in &self.factors {
            total = alg.combine(total, f.valuation.evaluate(x)?);
        }
        Ok(total)
    }

    pub fn variable_named(&self, name: &str) -> Option<Variable> {
        self.decls
            .iter()
            .position(|d| d.name == name)
            .map(|i| self.vars[i])
    }

    pub fn var_name(&self, var: Variable) -> &str {
        &self.decls[var.index()].name
    }

    pub fn state_label(&self, var: Variable, state: u32) -> &str {
        &self.decls[var.index()].states[state as usize]
    }

    pub fn state_index(&self, var: Variable, label: &str) -> Option<u32> {
        self.decls[var.index()]
            .states
            .iter()
            .position(|s| s == label)
            .map(|i| i as u32)
    }

    /// State labels in canonical order, space separated; `<>` for the empty
    /// configuration.
    pub fn render_configuration(&self, c: &Configuration) -> String {
        if c.domain().is_empty() {
            return "<>".to_string();
        }
        c.domain()
            .iter()
            .zip(c.states())
            .map(|(v, s)| self.state_label(v, *s).to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Resolve a comma-separated list of variable names into an elimination
    /// order.
    pub fn parse_order(&self, text: &str) -> Result<Vec<Variable>> {
        text.split(',')
            .map(|name| {
                let name = name.trim();
                self.variable_named(name).ok_or(Error::OrderMismatch {
                    detail: format!("unknown variable '{name}'"),
                })
            })
            .collect()
    }

    /// Parse the problem file format. Errors carry the offending line number.
    pub fn parse(text: &str) -> Result<Problem> {
        Parser::default().run(text)
    }

    /// Canonical text form; reparsing yields an identical problem.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("objective {}\n", self.sense));
        for d in &self.decls {
            out.push_str(&format!("variable {} {}\n", d.name, d.states.join(" ")));
        }
        for f in &self.factors {
            let scope: Vec<&str> = f
                .valuation
                .domain()
                .iter()
                .map(|v| self.var_name(v))
                .collect();
            out.push_str(&format!("valuation {} {}\n", f.name, scope.join(" ")));
            for idx in 0..f.valuation.len() {
                let c = Configuration::from_index(f.valuation.domain(), idx);
                out.push_str(&format!(
                    "{} {}\n",
                    self.render_configuration(&c),
                    f.valuation.values()[idx]
                ));
            }
            out.push_str("end\n");
        }
        out
    }
}

#[derive(Default)]
struct Parser {
    sense: Option<Sense>,
    decls: Vec<VariableDecl>,
    decl_lines: Vec<usize>,
    names: HashMap<String, usize>,
    factors: Vec<(String, Valuation)>,
    block: Option<Block>,
}

struct Block {
    name: String,
    scope_in_file_order: Vec<Variable>,
    domain: VarSet,
    index_strides: Vec<usize>,
    values: Vec<Value>,
    seen: Vec<bool>,
}

impl Parser {
    fn run(mut self, text: &str) -> Result<Problem> {
        let mut last_line = 0;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            last_line = line;
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if tokens.is_empty() {
                continue;
            }
            if self.block.is_some() {
                self.block_line(line, &tokens)?;
            } else {
                self.top_line(line, &tokens)?;
            }
        }
        if let Some(block) = &self.block {
            return Err(ParseError::new(
                last_line,
                format!("valuation '{}' is missing its 'end' line", block.name),
            )
            .into());
        }
        if self.decls.is_empty() {
            return Err(ParseError::new(last_line, "no variables declared").into());
        }
        if self.factors.is_empty() {
            return Err(ParseError::new(last_line, "no valuations declared").into());
        }
        // every variable must appear in some scope
        let mut used = vec![false; self.decls.len()];
        for (_, v) in &self.factors {
            for var in v.domain().iter() {
                used[var.index()] = true;
            }
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(ParseError::new(
                self.decl_lines[i],
                format!(
                    "variable '{}' is not used by any valuation",
                    self.decls[i].name
                ),
            )
            .into());
        }
        Problem::new(
            self.sense.unwrap_or(Sense::Minimize),
            self.decls,
            self.factors,
        )
    }

    fn var_handle(&self, idx: usize) -> Variable {
        Variable::new(idx, self.decls[idx].states.len())
    }

    fn top_line(&mut self, line: usize, tokens: &[&str]) -> Result<()> {
        match tokens[0] {
            "objective" => {
                if self.sense.is_some() {
                    return Err(ParseError::new(line, "duplicate 'objective' line").into());
                }
                match tokens {
                    [_, "min"] => self.sense = Some(Sense::Minimize),
                    [_, "max"] => self.sense = Some(Sense::Maximize),
                    _ => {
                        return Err(ParseError::new(
                            line,
                            "expected 'objective min' or 'objective max'",
                        )
                        .into())
                    }
                }
            }
            "variable" => {
                if tokens.len() < 2 {
                    return Err(ParseError::new(line, "variable needs a name").into());
                }
                let name = tokens[1].to_string();
                if self.names.contains_key(&name) {
                    return Err(
                        ParseError::new(line, format!("duplicate variable '{name}'")).into(),
                    );
                }
                let states: Vec<String> = tokens[2..].iter().map(|s| s.to_string()).collect();
                if states.is_empty() {
                    return Err(ParseError::new(
                        line,
                        format!("variable '{name}' declares an empty frame"),
                    )
                    .into());
                }
                for (i, s) in states.iter().enumerate() {
                    if states[..i].contains(s) {
                        return Err(ParseError::new(
                            line,
                            format!("variable '{name}' repeats state '{s}'"),
                        )
                        .into());
                    }
                }
                self.names.insert(name.clone(), self.decls.len());
                self.decl_lines.push(line);
                self.decls.push(VariableDecl { name, states });
            }
            "valuation" => {
                if tokens.len() < 2 {
                    return Err(ParseError::new(line, "valuation needs a name").into());
                }
                let name = tokens[1].to_string();
                if tokens.len() < 3 {
                    return Err(ParseError::new(
                        line,
                        format!("valuation '{name}' needs at least one variable"),
                    )
                    .into());
                }
                let mut scope = Vec::new();
                for t in &tokens[2..] {
                    let idx = *self
                        .names
                        .get(*t)
                        .ok_or_else(|| ParseError::new(line, format!("unknown variable '{t}'")))?;
                    let var = self.var_handle(idx);
                    if scope.contains(&var) {
                        return Err(ParseError::new(
                            line,
                            format!("variable '{t}' listed twice in scope"),
                        )
                        .into());
                    }
                    scope.push(var);
                }
                let domain = VarSet::new(scope.iter().copied());
                let size = domain.frame_size()?;
                let strides = domain.strides();
                let index_strides = scope
                    .iter()
                    .map(|v| strides[domain.position(*v).unwrap()])
                    .collect();
                self.block = Some(Block {
                    name,
                    scope_in_file_order: scope,
                    domain,
                    index_strides,
                    values: vec![0.0; size],
                    seen: vec![false; size],
                });
            }
            "end" => {
                return Err(ParseError::new(line, "'end' outside a valuation block").into());
            }
            other => {
                return Err(ParseError::new(line, format!("unknown directive '{other}'")).into());
            }
        }
        Ok(())
    }

    fn block_line(&mut self, line: usize, tokens: &[&str]) -> Result<()> {
        if tokens == ["end"] {
            let block = self.block.take().unwrap();
            let valuation = Valuation::new(block.domain, block.values)?;
            self.factors.push((block.name, valuation));
            return Ok(());
        }
        let block = self.block.as_mut().unwrap();
        let arity = block.scope_in_file_order.len();
        if tokens.len() != arity + 1 {
            return Err(ParseError::new(
                line,
                format!(
                    "expected {} state(s) and a value, found {} token(s)",
                    arity,
                    tokens.len()
                ),
            )
            .into());
        }
        let mut idx = 0usize;
        for (pos, token) in tokens[..arity].iter().enumerate() {
            let var = block.scope_in_file_order[pos];
            let decl = &self.decls[var.index()];
            let state = decl.states.iter().position(|s| s == token).ok_or_else(|| {
                ParseError::new(
                    line,
                    format!("unknown state '{}' for variable '{}'", token, decl.name),
                )
            })?;
            idx += state * block.index_strides[pos];
        }
        let value: Value = tokens[arity]
            .parse()
            .map_err(|_| ParseError::new(line, format!("invalid value '{}'", tokens[arity])))?;
        if value.is_nan() {
            return Err(ParseError::new(line, "value may not be NaN").into());
        }
        if block.seen[idx] {
            return Err(ParseError::new(line, "duplicate row").into());
        }
        block.seen[idx] = true;
        block.values[idx] = value;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const FIVE_VARS: &str = "\
# five binary variables, three additive factors
objective min
variable A a ~a
variable B b ~b
variable C c ~c
variable D d ~d
variable E e ~e

valuation F1 A C E
a c e 1
a c ~e 3
a ~c e 5
a ~c ~e 8
~a c e 2
~a c ~e 6
~a ~c e 2
~a ~c ~e 4
end

valuation F2 A B
a b 4
a ~b 8
~a b 0
~a ~b 5
end

valuation F3 B D E
b d e 0
b d ~e 5
b ~d e 6
b ~d ~e 3
~b d e 5
~b d ~e 1
~b ~d e 4
~b ~d ~e 3
end
";

    #[test]
    fn parses_the_bundled_example() {
        let p = Problem::parse(FIVE_VARS).unwrap();
        assert_eq!(p.sense(), Sense::Minimize);
        assert_eq!(p.variables().len(), 5);
        let f = p.factors();
        assert_eq!(f.len(), 3);
        assert_eq!(f[0].name, "F1");
        assert_eq!(
            f[0].valuation.values(),
            &[1.0, 3.0, 5.0, 8.0, 2.0, 6.0, 2.0, 4.0]
        );
        assert_eq!(f[1].valuation.values(), &[4.0, 8.0, 0.0, 5.0]);
        assert_eq!(
            f[2].valuation.values(),
            &[0.0, 5.0, 6.0, 3.0, 5.0, 1.0, 4.0, 3.0]
        );
        assert_eq!(p.hypergraph().edges().len(), 3);
    }

    #[test]
    fn one_variable_problem() {
        let p = Problem::parse("variable A a\nvaluation F A\na 0\nend\n").unwrap();
        assert_eq!(p.variables().len(), 1);
        assert_eq!(p.factors()[0].valuation.values(), &[0.0]);
    }

    #[test]
    fn scope_order_in_file_may_differ_from_declaration() {
        let p = Problem::parse(
            "variable A a ~a\nvariable B b ~b\nvaluation F B A\nb a 1\nb ~a 2\n~b a 3\n~b ~a 4\nend\n",
        )
        .unwrap();
        // canonical layout is over {A,B}
        assert_eq!(p.factors()[0].valuation.values(), &[1.0, 3.0, 2.0, 4.0]);
    }

    #[test]
    fn missing_rows_default_to_identity_and_inf_is_accepted() {
        let p = Problem::parse("variable A a ~a\nvaluation F A\n~a inf\nend\n").unwrap();
        assert_eq!(p.factors()[0].valuation.values(), &[0.0, f64::INFINITY]);
    }

    fn parse_err(text: &str) -> ParseError {
        match Problem::parse(text).unwrap_err() {
            Error::Parse(e) => e,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn error_lines_are_reported() {
        // arity mismatch: two states under a three-variable scope
        let e = parse_err(
            "variable A a ~a\nvariable C c ~c\nvariable E e ~e\nvaluation F A C E\na c 7\nend\n",
        );
        assert_eq!(e.line, 5);
        assert!(e.message.contains("expected 3 state(s)"));

        let e = parse_err("variable A a ~a\nvariable A a ~a\n");
        assert_eq!(e.line, 2);

        let e = parse_err("variable A\n");
        assert!(e.message.contains("empty frame"));

        let e = parse_err("variable A a ~a\nvaluation F A\na 1\na 2\nend\n");
        assert_eq!(e.line, 4);
        assert!(e.message.contains("duplicate row"));

        let e = parse_err("variable A a ~a\nvaluation F B\nend\n");
        assert!(e.message.contains("unknown variable 'B'"));

        let e = parse_err("variable A a ~a\nvaluation F A\nq 1\nend\n");
        assert!(e.message.contains("unknown state 'q'"));

        let e = parse_err("variable A a ~a\nvariable B b\nvaluation F A\na 1\nend\n");
        assert_eq!(e.line, 2);
        assert!(e.message.contains("not used"));

        let e = parse_err("variable A a ~a\nvaluation F A\na 1\n");
        assert!(e.message.contains("missing its 'end'"));

        let e = parse_err("variable A a ~a\nvaluation F A\na nan\nend\n");
        assert!(e.message.contains("NaN"));
    }

    #[test]
    fn objective_is_optional_and_unique() {
        let p = Problem::parse("objective max\nvariable A a\nvaluation F A\na 1\nend\n").unwrap();
        assert_eq!(p.sense(), Sense::Maximize);
        let e = parse_err("objective min\nobjective max\nvariable A a\nvaluation F A\na 1\nend\n");
        assert_eq!(e.line, 2);
    }

    #[test]
    fn serialize_reparses_to_an_identical_problem() {
        let p = Problem::parse(FIVE_VARS).unwrap();
        let text = p.serialize();
        let q = Problem::parse(&text).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn evaluate_combines_all_factors() {
        let p = Problem::parse(FIVE_VARS).unwrap();
        // (~a, b, c, d, e) = 2 + 0 + 0
        let x = Configuration::new(p.universe(), vec![1, 0, 0, 0, 0]).unwrap();
        assert_eq!(p.evaluate(&x).unwrap(), 2.0);
    }

    #[test]
    fn order_strings_resolve_by_name() {
        let p = Problem::parse(FIVE_VARS).unwrap();
        let order = p.parse_order("C,D,E,B,A").unwrap();
        let names: Vec<&str> = order.iter().map(|v| p.var_name(*v)).collect();
        assert_eq!(names, ["C", "D", "E", "B", "A"]);
        assert!(p.parse_order("C,Q").is_err());
    }

    prop_compose! {
        fn arb_problem()(n_vars in 1usize..=5)(
            cards in proptest::collection::vec(1usize..=3, n_vars),
            scopes in proptest::collection::vec(
                proptest::collection::vec(any::<bool>(), n_vars), 1..=4),
            tables in proptest::collection::vec(
                proptest::collection::vec(-50i64..=50, 0..=243), 1..=4),
            sense in prop_oneof![Just(Sense::Minimize), Just(Sense::Maximize)],
        ) -> Problem {
            let decls: Vec<VariableDecl> = (0..cards.len())
                .map(|i| VariableDecl {
                    name: format!("V{i}"),
                    states: (0..cards[i]).map(|s| format!("s{s}")).collect(),
                })
                .collect();
            let vars: Vec<Variable> =
                cards.iter().enumerate().map(|(i, c)| Variable::new(i, *c)).collect();
            let mut factors = Vec::new();
            for (fi, mask) in scopes.iter().enumerate() {
                let mut scope: VarSet = vars
                    .iter()
                    .zip(mask)
                    .filter(|(_, keep)| **keep)
                    .map(|(v, _)| *v)
                    .collect();
                if scope.is_empty() {
                    scope = VarSet::singleton(vars[fi % vars.len()]);
                }
                let size = scope.frame_size().unwrap();
                let ints = &tables[fi % tables.len()];
                let values: Vec<Value> = (0..size)
                    .map(|i| ints.get(i % ints.len().max(1)).copied().unwrap_or(0) as Value)
                    .collect();
                factors.push((format!("F{fi}"), Valuation::new(scope, values).unwrap()));
            }
            // cover any untouched variables with one extra factor
            let covered = factors
                .iter()
                .fold(VarSet::empty(), |acc, (_, v)| acc.union(v.domain()));
            let missing: Vec<Variable> =
                vars.iter().copied().filter(|v| !covered.contains(*v)).collect();
            if !missing.is_empty() {
                let scope = VarSet::new(missing);
                let size = scope.frame_size().unwrap();
                factors.push(("Fcover".to_string(), Valuation::new(scope, vec![1.0; size]).unwrap()));
            }
            Problem::new(sense, decls, factors).unwrap()
        }
    }

    proptest! {
        #[test]
        fn round_trip_any_problem(p in arb_problem()) {
            let text = p.serialize();
            let q = Problem::parse(&text).unwrap();
            prop_assert_eq!(p, q);
        }
    }
}
