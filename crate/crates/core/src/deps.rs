//! Predicate dependency graphs, strongly connected components and the
//! splitting conditions.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write;

use crate::error::Result;
use crate::formula::{symbols_of, Formula, Predicate, PredicateList};
use crate::herbrand::{all_extensions, object_assignments, SearchConfig, SmChecker};
use crate::polarity::{is_negative_on, rules_of, strictly_positive_predicates, strictly_positive_witness};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependencyGraph {
    pub vertices: PredicateList,
    pub edges: BTreeSet<(Predicate, Predicate)>,
}

/// Positive occurrences of vertices in `g` that are not inside a
/// subformula negative on the vertex list.
fn positive_body_predicates(g: &Formula, vertices: &PredicateList, out: &mut BTreeSet<Predicate>) {
    fn walk(g: &Formula, vertices: &PredicateList, odd: bool, out: &mut BTreeSet<Predicate>) {
        if is_negative_on(g, vertices) {
            return;
        }
        match g {
            Formula::Atom(a) => {
                if !odd && vertices.contains(&a.predicate) {
                    out.insert(a.predicate.clone());
                }
            }
            Formula::Equal(..) | Formula::Falsity => {}
            Formula::And(a, b) | Formula::Or(a, b) => {
                walk(a, vertices, odd, out);
                walk(b, vertices, odd, out);
            }
            Formula::Implies(a, b) => {
                walk(a, vertices, !odd, out);
                walk(b, vertices, odd, out);
            }
            Formula::Forall(_, body) | Formula::Exists(_, body) => walk(body, vertices, odd, out),
        }
    }
    walk(g, vertices, false, out);
}

pub fn dependency_graph(f: &Formula, p: &PredicateList) -> DependencyGraph {
    let mut edges = BTreeSet::new();
    for rule in rules_of(f) {
        let Formula::Implies(body, head) = rule else {
            continue;
        };
        let heads: Vec<Predicate> = strictly_positive_predicates(head)
            .into_iter()
            .filter(|h| p.contains(h))
            .collect();
        if heads.is_empty() {
            continue;
        }
        let mut bodies = BTreeSet::new();
        positive_body_predicates(body, p, &mut bodies);
        for h in &heads {
            for b in &bodies {
                edges.insert((h.clone(), b.clone()));
            }
        }
    }
    DependencyGraph {
        vertices: p.clone(),
        edges,
    }
}

impl DependencyGraph {
    pub fn successors<'a>(&'a self, v: &'a Predicate) -> impl Iterator<Item = &'a Predicate> + 'a {
        self.edges
            .iter()
            .filter(move |(a, _)| a == v)
            .map(|(_, b)| b)
    }

    /// Components with sorted members, ordered by smallest member.
    pub fn strongly_connected_components(&self) -> Vec<Vec<Predicate>> {
        let sorted = self.vertices.sorted();
        let vertices: Vec<&Predicate> = sorted.iter().collect();
        let index_of: BTreeMap<&Predicate, usize> =
            vertices.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        let adjacency: Vec<Vec<usize>> = vertices
            .iter()
            .map(|v| {
                self.successors(v)
                    .filter_map(|w| index_of.get(w).copied())
                    .collect()
            })
            .collect();
        let mut tarjan = Tarjan {
            adjacency: &adjacency,
            index: alloc::vec![None; vertices.len()],
            low: alloc::vec![0; vertices.len()],
            on_stack: alloc::vec![false; vertices.len()],
            stack: Vec::new(),
            next: 0,
            components: Vec::new(),
        };
        for v in 0..vertices.len() {
            if tarjan.index[v].is_none() {
                tarjan.visit(v);
            }
        }
        let mut out: Vec<Vec<Predicate>> = tarjan
            .components
            .into_iter()
            .map(|c| {
                let mut c: Vec<Predicate> = c.into_iter().map(|i| vertices[i].clone()).collect();
                c.sort();
                c
            })
            .collect();
        out.sort();
        out
    }

    /// Graphviz rendering, one node per vertex.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph dependencies {\n");
        for v in self.vertices.sorted().iter() {
            let _ = writeln!(s, "  \"{}\";", v.qualified());
        }
        for (a, b) in &self.edges {
            let _ = writeln!(s, "  \"{}\" -> \"{}\";", a.qualified(), b.qualified());
        }
        s.push_str("}\n");
        s
    }
}

struct Tarjan<'a> {
    adjacency: &'a [Vec<usize>],
    index: Vec<Option<usize>>,
    low: Vec<usize>,
    on_stack: Vec<bool>,
    stack: Vec<usize>,
    next: usize,
    components: Vec<Vec<usize>>,
}

impl Tarjan<'_> {
    fn visit(&mut self, v: usize) {
        self.index[v] = Some(self.next);
        self.low[v] = self.next;
        self.next += 1;
        self.stack.push(v);
        self.on_stack[v] = true;
        for k in 0..self.adjacency[v].len() {
            let w = self.adjacency[v][k];
            match self.index[w] {
                None => {
                    self.visit(w);
                    self.low[v] = self.low[v].min(self.low[w]);
                }
                Some(iw) if self.on_stack[w] => self.low[v] = self.low[v].min(iw),
                Some(_) => {}
            }
        }
        if Some(self.low[v]) == self.index[v] {
            let mut component = Vec::new();
            loop {
                let w = self.stack.pop().expect("v is on the stack");
                self.on_stack[w] = false;
                component.push(w);
                if w == v {
                    break;
                }
            }
            self.components.push(component);
        }
    }
}

pub fn strongly_connected_components(g: &DependencyGraph) -> Vec<Vec<Predicate>> {
    g.strongly_connected_components()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitCondition {
    /// Every component lies within p or within q.
    Components,
    /// F is negative on q.
    FirstNegative,
    /// G is negative on p.
    SecondNegative,
}

impl fmt::Display for SplitCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitCondition::Components => "(a)",
            SplitCondition::FirstNegative => "(b)",
            SplitCondition::SecondNegative => "(c)",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitReport {
    pub p: PredicateList,
    pub q: PredicateList,
    pub graph: DependencyGraph,
    pub components: Vec<Vec<Predicate>>,
    /// A component meeting both sides outside their intersection.
    pub mixed_component: Option<Vec<Predicate>>,
    /// A member of q strictly positive in F.
    pub first_witness: Option<Predicate>,
    /// A member of p strictly positive in G.
    pub second_witness: Option<Predicate>,
}

impl SplitReport {
    pub fn holds(&self) -> bool {
        self.first_failure().is_none()
    }

    pub fn first_failure(&self) -> Option<SplitCondition> {
        if self.mixed_component.is_some() {
            Some(SplitCondition::Components)
        } else if self.first_witness.is_some() {
            Some(SplitCondition::FirstNegative)
        } else if self.second_witness.is_some() {
            Some(SplitCondition::SecondNegative)
        } else {
            None
        }
    }
}

impl fmt::Display for SplitReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(a) every strongly connected component is within {} or {}: ", self.p, self.q)?;
        match &self.mixed_component {
            None => writeln!(f, "yes")?,
            Some(c) => writeln!(f, "no, component {} mixes both", PredicateList::dedup_from(c.iter().cloned()))?,
        }
        write!(f, "(b) F is negative on {}: ", self.q)?;
        match &self.first_witness {
            None => writeln!(f, "yes")?,
            Some(w) => writeln!(f, "no, {} occurs strictly positively", w.qualified())?,
        }
        write!(f, "(c) G is negative on {}: ", self.p)?;
        match &self.second_witness {
            None => writeln!(f, "yes")?,
            Some(w) => writeln!(f, "no, {} occurs strictly positively", w.qualified())?,
        }
        match self.first_failure() {
            None => write!(f, "verdict: splittable"),
            Some(c) => write!(f, "verdict: not splittable, condition {c} fails"),
        }
    }
}

/// Conditions under which `SM[F ∧ G ∧ H; pq]` splits into
/// `SM[F ∧ H; p] ∧ SM[G ∧ H; q]`. With `H = ⊤` this is plain splitting.
pub fn check_split(
    f: &Formula,
    g: &Formula,
    h: &Formula,
    p: &PredicateList,
    q: &PredicateList,
) -> SplitReport {
    let pq = p.union(q);
    let whole = Formula::conjunction([f.clone(), g.clone(), h.clone()]);
    let graph = dependency_graph(&whole, &pq);
    let components = graph.strongly_connected_components();
    let mixed_component = components
        .iter()
        .find(|c| !c.iter().all(|x| p.contains(x)) && !c.iter().all(|x| q.contains(x)))
        .cloned();
    SplitReport {
        p: p.clone(),
        q: q.clone(),
        first_witness: strictly_positive_witness(f, q),
        second_witness: strictly_positive_witness(g, p),
        graph,
        components,
        mixed_component,
    }
}

/// Checks on every interpretation of size `1..=bound` (all constant
/// assignments and extents) that the split and unsplit forms agree.
pub fn verify_split_equivalence(
    f: &Formula,
    g: &Formula,
    h: &Formula,
    p: &PredicateList,
    q: &PredicateList,
    bound: usize,
    config: SearchConfig,
) -> Result<bool> {
    Ok(split_counterexample(f, g, h, p, q, bound, config)?.is_none())
}

/// The first interpretation on which the two sides disagree.
pub fn split_counterexample(
    f: &Formula,
    g: &Formula,
    h: &Formula,
    p: &PredicateList,
    q: &PredicateList,
    bound: usize,
    config: SearchConfig,
) -> Result<Option<crate::herbrand::PartialInterpretation>> {
    let whole = Formula::conjunction([f.clone(), g.clone(), h.clone()]);
    let left = Formula::conjunction([f.clone(), h.clone()]);
    let right = Formula::conjunction([g.clone(), h.clone()]);
    let pq = p.union(q);
    let sig = symbols_of(&whole);
    if let Some((name, _)) = sig.functions.iter().next() {
        return Err(crate::Error::FunctionSymbols(name.clone()));
    }
    let predicates: Vec<Predicate> = sig
        .predicates
        .iter()
        .cloned()
        .chain(pq.iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    for size in 1..=bound {
        for base in object_assignments(&sig.objects, size, config)? {
            let all = SmChecker::new(&whole, &pq, &base, config)?;
            let first = SmChecker::new(&left, p, &base, config)?;
            let second = SmChecker::new(&right, q, &base, config)?;
            for i in all_extensions(&base, &predicates, config)? {
                let split = first.check(&i)? && second.check(&i)?;
                if all.check(&i)? != split {
                    return Ok(Some(i));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;
    use alloc::string::ToString;

    fn list(names: &[(&str, usize)]) -> PredicateList {
        PredicateList::new(names.iter().map(|(n, a)| Predicate::new(*n, *a)).collect()).unwrap()
    }

    fn edge(a: (&str, usize), b: (&str, usize)) -> (Predicate, Predicate) {
        (Predicate::new(a.0, a.1), Predicate::new(b.0, b.1))
    }

    fn formula_one() -> Formula {
        parse_formula("p(a) & q(b) & forall x (p(x) & ~q(x) -> r(x))").unwrap()
    }

    #[test]
    fn graph_of_formula_one_has_one_edge() {
        let g = dependency_graph(&formula_one(), &list(&[("p", 1), ("q", 1), ("r", 1)]));
        assert_eq!(g.edges, [edge(("r", 1), ("p", 1))].into_iter().collect());
        let sccs = g.strongly_connected_components();
        assert_eq!(sccs.len(), 3);
        assert!(sccs.iter().all(|c| c.len() == 1));
    }

    #[test]
    fn graphs_of_small_formulas() {
        let facts = parse_formula("p(a) & q(b)").unwrap();
        assert!(dependency_graph(&facts, &list(&[("p", 1), ("q", 1)])).edges.is_empty());
        let f = parse_formula("(r -> p | q) & s & t").unwrap();
        let g = dependency_graph(&f, &list(&[("p", 0), ("q", 0), ("s", 0), ("t", 0), ("r", 0)]));
        assert_eq!(
            g.edges,
            [edge(("p", 0), ("r", 0)), edge(("q", 0), ("r", 0))].into_iter().collect()
        );
        // a double negation is negative on the vertices, so it adds nothing
        let nn = parse_formula("~~p -> p").unwrap();
        assert!(dependency_graph(&nn, &list(&[("p", 0)])).edges.is_empty());
        // the body is negative on {p, q} since only r is strictly positive in it
        let mixed = parse_formula("((q -> r) -> r) -> p").unwrap();
        assert!(dependency_graph(&mixed, &list(&[("p", 0), ("q", 0)])).edges.is_empty());
        let g = dependency_graph(&mixed, &list(&[("p", 0), ("q", 0), ("r", 0)]));
        assert_eq!(
            g.edges,
            [edge(("p", 0), ("q", 0)), edge(("p", 0), ("r", 0))].into_iter().collect()
        );
    }

    #[test]
    fn components() {
        let empty = DependencyGraph {
            vertices: PredicateList::empty(),
            edges: BTreeSet::new(),
        };
        assert!(empty.strongly_connected_components().is_empty());
        let cyc = DependencyGraph {
            vertices: list(&[("b", 0), ("a", 0)]),
            edges: [edge(("a", 0), ("b", 0)), edge(("b", 0), ("a", 0))].into_iter().collect(),
        };
        assert_eq!(
            cyc.strongly_connected_components(),
            [[Predicate::new("a", 0), Predicate::new("b", 0)]]
        );
        let chain = DependencyGraph {
            vertices: list(&[("c", 0), ("b", 0), ("a", 0)]),
            edges: [edge(("a", 0), ("b", 0)), edge(("b", 0), ("c", 0)), edge(("c", 0), ("b", 0))]
                .into_iter()
                .collect(),
        };
        let sccs = chain.strongly_connected_components();
        assert_eq!(sccs.len(), 2);
        assert_eq!(sccs[0], [Predicate::new("a", 0)]);
    }

    #[test]
    fn split_reports() {
        let f = parse_formula("p(a) & q(b)").unwrap();
        let g = parse_formula("forall x (p(x) & ~q(x) -> r(x))").unwrap();
        let r = check_split(&f, &g, &Formula::top(), &list(&[("p", 1), ("q", 1)]), &list(&[("r", 1)]));
        assert!(r.holds(), "{r}");

        let pq = (list(&[("p", 0), ("s", 0)]), list(&[("q", 0), ("t", 0)]));
        let h = parse_formula("r -> p | q").unwrap();
        let s = parse_formula("s").unwrap();
        let t = parse_formula("t").unwrap();
        assert!(check_split(&s, &t, &h, &pq.0, &pq.1).holds());

        let f5 = Formula::and(h.clone(), s.clone());
        let g5 = Formula::and(h.clone(), t.clone());
        let r = check_split(&f5, &g5, &Formula::top(), &pq.0, &pq.1);
        assert_eq!(r.first_failure(), Some(SplitCondition::FirstNegative));
        assert_eq!(r.first_witness, Some(Predicate::new("q", 0)));
        assert!(r.to_string().ends_with("condition (b) fails"));
    }

    #[test]
    fn split_equivalence_holds_on_examples() {
        let cfg = SearchConfig::default();
        let f = parse_formula("p(a) & q(b)").unwrap();
        let g = parse_formula("forall x (p(x) & ~q(x) -> r(x))").unwrap();
        let p = list(&[("p", 1), ("q", 1)]);
        let q = list(&[("r", 1)]);
        assert!(verify_split_equivalence(&f, &g, &Formula::top(), &p, &q, 2, cfg).unwrap());
        let h = parse_formula("r -> p | q").unwrap();
        let s = parse_formula("s").unwrap();
        let t = parse_formula("t").unwrap();
        let (p, q) = (list(&[("p", 0), ("s", 0)]), list(&[("q", 0), ("t", 0)]));
        assert!(verify_split_equivalence(&s, &t, &h, &p, &q, 1, cfg).unwrap());
        let top = Formula::top();
        let none = PredicateList::empty();
        assert!(verify_split_equivalence(&top, &top, &top, &none, &none, 1, cfg).unwrap());
    }

    #[test]
    fn failing_split_has_a_counterexample() {
        // p and q depend on each other; splitting them apart is unsound
        let f = parse_formula("q -> p").unwrap();
        let g = parse_formula("p -> q").unwrap();
        let r = check_split(&f, &g, &Formula::top(), &list(&[("p", 0)]), &list(&[("q", 0)]));
        assert_eq!(r.first_failure(), Some(SplitCondition::Components));
        let cx = split_counterexample(
            &f,
            &g,
            &Formula::top(),
            &list(&[("p", 0)]),
            &list(&[("q", 0)]),
            1,
            SearchConfig::default(),
        )
        .unwrap();
        assert_eq!(cx.unwrap().to_string(), "{p, q}");
    }

    #[test]
    fn dot_output() {
        let g = dependency_graph(&formula_one(), &list(&[("p", 1), ("q", 1), ("r", 1)]));
        let dot = g.to_dot();
        assert!(dot.contains("\"r/1\" -> \"p/1\";"));
        assert!(dot.starts_with("digraph"));
    }
}
