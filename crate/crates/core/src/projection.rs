//! Ontology to graph transformation and the single-relation walk graph.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use indexmap::IndexSet;

use crate::error::{Error, Result};
use crate::ontology::{mapping_parts, Axiom, ClassExpr, Ontology};
use crate::rdf::{Iri, Term, Triple};
use crate::vocab::{self, iri};

/// Rule propagation (sub-properties, inverses, chains) stops after this many
/// rounds even if new edges keep appearing.
pub const MAX_PROPAGATION_ROUNDS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// W3C OWL-to-RDF mapping, blank nodes included.
    Mapping,
    /// Projection rules.
    Rules,
    /// Projection rules plus an inverse edge for every subsumption and
    /// membership edge.
    RulesInverse,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mapping" => Ok(Strategy::Mapping),
            "rules" => Ok(Strategy::Rules),
            "rules+r" => Ok(Strategy::RulesInverse),
            other => Err(Error::Config(format!(
                "unknown projection {other:?} (expected mapping, rules or rules+r)"
            ))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Mapping => "mapping",
            Strategy::Rules => "rules",
            Strategy::RulesInverse => "rules+r",
        })
    }
}

/// A directed labelled multigraph. Annotation edges are kept apart: they
/// feed the lexical document but never the walker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectedGraph {
    pub strategy: Strategy,
    pub edges: Vec<Triple>,
    pub annotation_edges: Vec<Triple>,
    /// Axioms or residue triples no projection rule applies to.
    pub skipped: usize,
}

impl ProjectedGraph {
    pub fn vertices(&self) -> BTreeSet<&Term> {
        self.edges
            .iter()
            .flat_map(|t| [&t.subject, &t.object])
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

pub fn project(onto: &Ontology, strategy: Strategy) -> ProjectedGraph {
    match strategy {
        Strategy::Mapping => project_mapping(onto),
        Strategy::Rules => project_rules(onto, false),
        Strategy::RulesInverse => project_rules(onto, true),
    }
}

pub fn project_mapping(onto: &Ontology) -> ProjectedGraph {
    let (edges, annotation_edges) = mapping_parts(onto);
    ProjectedGraph {
        strategy: Strategy::Mapping,
        edges,
        annotation_edges,
        skipped: 0,
    }
}

pub fn project_rules(onto: &Ontology, inverse: bool) -> ProjectedGraph {
    let mut p = Projector::new(onto, inverse);
    p.run();
    let annotation_edges = onto
        .annotations()
        .iter()
        .flat_map(|(e, list)| {
            list.iter()
                .map(move |a| Triple::new(e.clone(), a.property.clone(), a.value.clone()))
        })
        .collect();
    ProjectedGraph {
        strategy: if inverse {
            Strategy::RulesInverse
        } else {
            Strategy::Rules
        },
        edges: p.edges.into_iter().collect(),
        annotation_edges,
        skipped: p.skipped + onto.residue().len(),
    }
}

/// Subclass and superclass of every GCI after splitting equivalences into
/// two directions, superclass intersections into conjuncts and subclass
/// unions into disjuncts.
pub fn normalized_gcis(onto: &Ontology) -> Vec<(&ClassExpr, &ClassExpr)> {
    fn split<'a>(sub: &'a ClassExpr, sup: &'a ClassExpr, out: &mut Vec<(&'a ClassExpr, &'a ClassExpr)>) {
        match (sub, sup) {
            (_, ClassExpr::Intersection(ops)) => ops.iter().for_each(|op| split(sub, op, out)),
            (ClassExpr::Union(ops), _) => ops.iter().for_each(|op| split(op, sup, out)),
            _ => out.push((sub, sup)),
        }
    }
    let mut out = Vec::new();
    for ax in onto.axioms() {
        match ax {
            Axiom::SubClassOf { sub, sup } => split(sub, sup, &mut out),
            Axiom::EquivalentClasses(a, b) => {
                split(a, b, &mut out);
                split(b, a, &mut out);
            }
            _ => {}
        }
    }
    out
}

/// Named members of a union or intersection made only of named classes.
fn all_named(ops: &[ClassExpr]) -> Option<Vec<Iri>> {
    ops.iter().map(|op| op.as_named().cloned()).collect()
}

struct Projector<'a> {
    onto: &'a Ontology,
    inverse: bool,
    edges: IndexSet<Triple>,
    skipped: usize,
    /// Named class -> classes it is declared equivalent to, or the named
    /// members of an equivalent union / intersection.
    expansions: HashMap<Iri, Vec<Iri>>,
}

impl<'a> Projector<'a> {
    fn new(onto: &'a Ontology, inverse: bool) -> Self {
        let mut expansions: HashMap<Iri, Vec<Iri>> = HashMap::new();
        for ax in onto.axioms() {
            if let Axiom::EquivalentClasses(a, b) = ax {
                for (x, y) in [(a, b), (b, a)] {
                    if let ClassExpr::Named(d) = x {
                        let named = match y {
                            ClassExpr::Named(b) => Some(vec![b.clone()]),
                            ClassExpr::Union(ops) | ClassExpr::Intersection(ops) => all_named(ops),
                            _ => None,
                        };
                        if let Some(named) = named {
                            expansions.entry(d.clone()).or_default().extend(named);
                        }
                    }
                }
            }
        }
        Projector {
            onto,
            inverse,
            edges: IndexSet::new(),
            skipped: 0,
            expansions,
        }
    }

    /// Named classes a restriction filler stands for.
    fn targets(&self, filler: &ClassExpr) -> Vec<Iri> {
        match filler {
            ClassExpr::Named(d) => {
                let mut out = vec![d.clone()];
                if let Some(more) = self.expansions.get(d) {
                    out.extend(more.iter().cloned());
                }
                out
            }
            ClassExpr::Union(ops) | ClassExpr::Intersection(ops) => {
                all_named(ops).unwrap_or_default()
            }
            _ => Vec::new(),
        }
    }

    fn edge(&mut self, s: &Iri, p: &Iri, o: &Iri) {
        self.edges
            .insert(Triple::new(s.clone(), p.clone(), o.clone()));
    }

    fn with_inverse(&mut self, s: &Iri, p: &str, o: &Iri) {
        let p = iri(p);
        self.edge(s, &p, o);
        if self.inverse {
            self.edge(o, &vocab::inverse_of(&p), s);
        }
    }

    fn run(&mut self) {
        let onto = self.onto;
        let mut members: HashMap<&Iri, Vec<&Iri>> = HashMap::new();
        for ax in onto.axioms() {
            if let Some((ind, class)) = ax.as_named_membership() {
                members.entry(ind).or_default().push(class);
            }
        }

        for (sub, sup) in normalized_gcis(onto) {
            let before = self.edges.len();
            match (sub, sup) {
                (ClassExpr::Named(a), ClassExpr::Named(b)) => {
                    self.with_inverse(a, vocab::RDFS_SUBCLASS_OF, b)
                }
                (ClassExpr::Named(a), ClassExpr::HasValue { property, value }) => {
                    for class in members.get(value).into_iter().flatten() {
                        self.edge(a, property, class);
                    }
                }
                (ClassExpr::Named(a), r) | (r, ClassExpr::Named(a)) => {
                    if let Some((property, filler)) = quantified(r) {
                        for b in self.targets(filler) {
                            self.edge(a, property, &b);
                        }
                    }
                }
                _ => {}
            }
            if self.edges.len() == before && !matches!((sub, sup), (ClassExpr::Named(_), ClassExpr::Named(_))) {
                self.skipped += 1;
            }
        }

        let mut domains: BTreeMap<&Iri, Vec<Iri>> = BTreeMap::new();
        let mut ranges: BTreeMap<&Iri, Vec<Iri>> = BTreeMap::new();
        for ax in onto.axioms() {
            match ax {
                Axiom::Domain { property, class } => {
                    let t = self.targets(class);
                    domains.entry(property).or_default().extend(t);
                }
                Axiom::Range { property, class } => {
                    let t = self.targets(class);
                    ranges.entry(property).or_default().extend(t);
                }
                _ => {}
            }
        }
        for (property, ds) in &domains {
            for a in ds {
                for b in ranges.get(property).into_iter().flatten() {
                    self.edge(a, property, b);
                }
            }
        }

        for ax in onto.axioms() {
            match ax {
                Axiom::ClassAssertion { class, individual } => match class {
                    ClassExpr::Named(c) => self.with_inverse(individual, vocab::RDF_TYPE, c),
                    _ => self.skipped += 1,
                },
                Axiom::ObjectAssertion {
                    subject,
                    property,
                    object,
                } => self.edge(subject, property, object),
                Axiom::DataAssertion {
                    subject,
                    property,
                    value,
                } => {
                    self.edges
                        .insert(Triple::new(subject.clone(), property.clone(), value.clone()));
                }
                _ => {}
            }
        }

        self.propagate();
    }

    /// Sub-property, inverse and chain rows over already projected edges.
    fn propagate(&mut self) {
        let mut sub_props: Vec<(&Iri, &Iri)> = Vec::new();
        let mut inverses: Vec<(&Iri, &Iri)> = Vec::new();
        let mut chains: Vec<(&[Iri], &Iri)> = Vec::new();
        for ax in self.onto.axioms() {
            match ax {
                Axiom::SubPropertyOf { sub, sup } => sub_props.push((sub, sup)),
                Axiom::InverseOf(a, b) => inverses.push((a, b)),
                Axiom::PropertyChain { chain, sup } => chains.push((chain, sup)),
                _ => {}
            }
        }
        if sub_props.is_empty() && inverses.is_empty() && chains.is_empty() {
            return;
        }

        for _ in 0..MAX_PROPAGATION_ROUNDS {
            // (predicate, subject) -> objects, over entity-to-entity edges
            let mut by_pred: HashMap<&Iri, Vec<(&Iri, &Iri)>> = HashMap::new();
            for t in &self.edges {
                if let (Term::Iri(s), Term::Iri(o)) = (&t.subject, &t.object) {
                    by_pred.entry(&t.predicate).or_default().push((s, o));
                }
            }
            let mut fresh: Vec<Triple> = Vec::new();
            for &(r, r2) in &sub_props {
                for &(a, b) in by_pred.get(r2).into_iter().flatten() {
                    fresh.push(Triple::new(a.clone(), r.clone(), b.clone()));
                }
            }
            for &(p1, p2) in &inverses {
                for (from, to) in [(p1, p2), (p2, p1)] {
                    for &(a, b) in by_pred.get(from).into_iter().flatten() {
                        fresh.push(Triple::new(b.clone(), to.clone(), a.clone()));
                    }
                }
            }
            for &(chain, r) in &chains {
                let mut step: HashMap<&Iri, HashMap<&Iri, Vec<&Iri>>> = HashMap::new();
                for p in chain {
                    let entry = step.entry(p).or_default();
                    for &(a, b) in by_pred.get(p).into_iter().flatten() {
                        entry.entry(a).or_default().push(b);
                    }
                }
                for &(start, _) in by_pred.get(&chain[0]).into_iter().flatten() {
                    let mut frontier: BTreeSet<&Iri> = BTreeSet::from([start]);
                    for p in chain {
                        let next = &step[p];
                        frontier = frontier
                            .iter()
                            .flat_map(|n| next.get(n).into_iter().flatten().copied())
                            .collect();
                    }
                    for end in frontier {
                        fresh.push(Triple::new(start.clone(), r.clone(), end.clone()));
                    }
                }
            }
            let before = self.edges.len();
            self.edges.extend(fresh);
            if self.edges.len() == before {
                break;
            }
        }
    }
}

/// Property and filler of an existential, universal or qualified
/// cardinality restriction.
fn quantified(expr: &ClassExpr) -> Option<(&Iri, &ClassExpr)> {
    match expr {
        ClassExpr::Some { property, filler } | ClassExpr::Only { property, filler } => {
            Some((property, filler))
        }
        ClassExpr::Cardinality {
            property,
            filler: Some(filler),
            ..
        } => Some((property, filler)),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexKind {
    Entity,
    Blank,
    Literal,
    /// One instance per projected triple.
    Relation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub kind: VertexKind,
    /// Full IRI for entities and relations, `_:label` for blank nodes, the
    /// lexical form (whitespace replaced by `_`) for literals.
    pub token: String,
    pub term: Term,
}

/// Every triple `<X, r, Y>` becomes the path `X -> r -> Y` where `r` is a
/// fresh vertex for that triple.
#[derive(Clone, Debug, Default)]
pub struct WalkGraph {
    vertices: Vec<Vertex>,
    adjacency: Vec<Vec<u32>>,
    index: HashMap<(VertexKind, String), u32>,
}

/// Corpus token for a literal: its lexical form with whitespace runs turned
/// into underscores so a sentence stays space-separated.
pub fn literal_token(lexical: &str) -> String {
    if lexical.is_empty() {
        return "\"\"".to_string();
    }
    lexical.split_whitespace().collect::<Vec<_>>().join("_")
}

fn vertex_for(term: &Term) -> (VertexKind, String) {
    match term {
        Term::Iri(i) => (VertexKind::Entity, i.as_str().to_string()),
        Term::Blank(b) => (VertexKind::Blank, format!("_:{b}")),
        Term::Literal(l) => (VertexKind::Literal, literal_token(&l.lexical)),
    }
}

impl WalkGraph {
    pub fn from_graph(g: &ProjectedGraph) -> Self {
        to_walk_graph(g)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn vertex(&self, id: u32) -> &Vertex {
        &self.vertices[id as usize]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn neighbors(&self, id: u32) -> &[u32] {
        &self.adjacency[id as usize]
    }

    /// Vertex of an entity IRI, if it occurs in the graph.
    pub fn entity(&self, entity: &Iri) -> Option<u32> {
        self.index
            .get(&(VertexKind::Entity, entity.as_str().to_string()))
            .copied()
    }

    fn intern(&mut self, term: &Term) -> u32 {
        let key = vertex_for(term);
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        self.push(key.0, key.1.clone(), term.clone(), Some(key))
    }

    fn push(&mut self, kind: VertexKind, token: String, term: Term, key: Option<(VertexKind, String)>) -> u32 {
        let id = self.vertices.len() as u32;
        self.vertices.push(Vertex { kind, token, term });
        self.adjacency.push(Vec::new());
        if let Some(key) = key {
            self.index.insert(key, id);
        }
        id
    }
}

pub fn to_walk_graph(g: &ProjectedGraph) -> WalkGraph {
    let mut w = WalkGraph::default();
    for t in &g.edges {
        let s = w.intern(&t.subject);
        let r = w.push(
            VertexKind::Relation,
            t.predicate.as_str().to_string(),
            Term::Iri(t.predicate.clone()),
            None,
        );
        let o = w.intern(&t.object);
        w.adjacency[s as usize].push(r);
        w.adjacency[r as usize].push(o);
    }
    w
}
