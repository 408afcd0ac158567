//! Structural entailment closure: class hierarchy, realisation and
//! sub-property hierarchy.
//!
//! This is not a description-logic reasoner. It closes declared
//! `SubClassOf` / `EquivalentClasses` edges between named classes (looking
//! through intersections on the super side), pushes memberships up the
//! hierarchy and closes `SubPropertyOf`. Cycles collapse into equivalence
//! groups.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use log::warn;

use crate::ontology::{Axiom, ClassExpr, Ontology};
use crate::predictor::Task;
use crate::rdf::Iri;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Closure {
    /// Strict named superclasses of each class.
    pub subsumes: BTreeMap<Iri, BTreeSet<Iri>>,
    /// Named classes of each individual.
    pub member_of: BTreeMap<Iri, BTreeSet<Iri>>,
    /// Strict super-properties of each property.
    pub sub_prop: BTreeMap<Iri, BTreeSet<Iri>>,
    /// Classes that subsume each other through a cycle.
    pub equivalence_groups: Vec<BTreeSet<Iri>>,
}

impl Closure {
    pub fn superclasses(&self, class: &Iri) -> Option<&BTreeSet<Iri>> {
        self.subsumes.get(class)
    }

    pub fn types_of(&self, individual: &Iri) -> Option<&BTreeSet<Iri>> {
        self.member_of.get(individual)
    }

    /// Whether `head` is entailed to be a member of (membership) or a strict
    /// subclass of (subsumption) `tail`. Unknown IRIs are never entailed.
    pub fn is_entailed(&self, head: &Iri, tail: &Iri, task: Task) -> bool {
        let map = match task {
            Task::Membership => &self.member_of,
            Task::Subsumption => &self.subsumes,
        };
        map.get(head).is_some_and(|s| s.contains(tail))
    }

    pub fn is_empty(&self) -> bool {
        self.subsumes.is_empty() && self.member_of.is_empty() && self.sub_prop.is_empty()
    }
}

/// Named classes directly implied by being an instance of `expr`.
fn named_parts(expr: &ClassExpr, out: &mut Vec<Iri>) {
    match expr {
        ClassExpr::Named(c) => out.push(c.clone()),
        ClassExpr::Intersection(ops) => ops.iter().for_each(|op| named_parts(op, out)),
        _ => {}
    }
}

pub fn classify(onto: &Ontology) -> Closure {
    let mut class_edges: BTreeMap<Iri, BTreeSet<Iri>> = BTreeMap::new();
    let mut prop_edges: BTreeMap<Iri, BTreeSet<Iri>> = BTreeMap::new();
    let mut direct_types: BTreeMap<Iri, BTreeSet<Iri>> = BTreeMap::new();

    let add = |edges: &mut BTreeMap<Iri, BTreeSet<Iri>>, a: &Iri, sup: &ClassExpr| {
        let mut parts = Vec::new();
        named_parts(sup, &mut parts);
        for b in parts {
            edges.entry(a.clone()).or_default().insert(b);
        }
    };

    for axiom in onto.axioms() {
        match axiom {
            Axiom::SubClassOf {
                sub: ClassExpr::Named(a),
                sup,
            } => add(&mut class_edges, a, sup),
            Axiom::EquivalentClasses(x, y) => {
                if let ClassExpr::Named(a) = x {
                    add(&mut class_edges, a, y);
                }
                if let ClassExpr::Named(b) = y {
                    add(&mut class_edges, b, x);
                }
            }
            Axiom::ClassAssertion { class, individual } => {
                let mut parts = Vec::new();
                named_parts(class, &mut parts);
                direct_types
                    .entry(individual.clone())
                    .or_default()
                    .extend(parts);
            }
            Axiom::SubPropertyOf { sub, sup } => {
                prop_edges.entry(sub.clone()).or_default().insert(sup.clone());
            }
            _ => {}
        }
    }

    let subsumes = transitive_closure(&class_edges);
    let sub_prop = transitive_closure(&prop_edges);

    let mut member_of = BTreeMap::new();
    for (individual, types) in direct_types {
        let mut all = BTreeSet::new();
        for t in types {
            if let Some(sups) = subsumes.get(&t) {
                all.extend(sups.iter().cloned());
            }
            all.insert(t);
        }
        member_of.insert(individual, all);
    }

    let mut equivalence_groups: Vec<BTreeSet<Iri>> = Vec::new();
    let mut grouped = HashSet::new();
    for (a, sups) in &subsumes {
        if grouped.contains(a) {
            continue;
        }
        let mut group: BTreeSet<Iri> = sups
            .iter()
            .filter(|b| subsumes.get(*b).is_some_and(|s| s.contains(a)))
            .cloned()
            .collect();
        if group.is_empty() {
            continue;
        }
        group.insert(a.clone());
        grouped.extend(group.iter().cloned());
        warn!(
            "subsumption cycle: {} classes treated as equivalent ({})",
            group.len(),
            group.iter().map(Iri::name).collect::<Vec<_>>().join(", ")
        );
        equivalence_groups.push(group);
    }

    Closure {
        subsumes,
        member_of,
        sub_prop,
        equivalence_groups,
    }
}

/// Reachability by breadth-first search from every node, self excluded.
fn transitive_closure(edges: &BTreeMap<Iri, BTreeSet<Iri>>) -> BTreeMap<Iri, BTreeSet<Iri>> {
    let mut out = BTreeMap::new();
    for start in edges.keys() {
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<&Iri> = edges[start].iter().collect();
        while let Some(n) = queue.pop_front() {
            if seen.insert(n.clone()) {
                if let Some(next) = edges.get(n) {
                    queue.extend(next.iter());
                }
            }
        }
        seen.remove(start);
        if !seen.is_empty() {
            out.insert(start.clone(), seen);
        }
    }
    out
}

/// The ontology plus one axiom for every entailed named subsumption or
/// membership that is not already declared.
pub fn materialize(onto: &Ontology, closure: &Closure) -> Ontology {
    let mut declared_sub: HashSet<(Iri, Iri)> = HashSet::new();
    let mut declared_mem: HashSet<(Iri, Iri)> = HashSet::new();
    for ax in onto.axioms() {
        if let Some((a, b)) = ax.as_named_subsumption() {
            declared_sub.insert((a.clone(), b.clone()));
        }
        if let Some((i, c)) = ax.as_named_membership() {
            declared_mem.insert((i.clone(), c.clone()));
        }
    }
    let mut out = onto.clone();
    for (a, sups) in &closure.subsumes {
        for b in sups {
            if !declared_sub.contains(&(a.clone(), b.clone())) {
                out.add_axiom(Axiom::subclass(a.clone(), b.clone()));
            }
        }
    }
    for (i, types) in &closure.member_of {
        for c in types {
            if !declared_mem.contains(&(i.clone(), c.clone())) {
                out.add_axiom(Axiom::membership(c.clone(), i.clone()));
            }
        }
    }
    out
}
