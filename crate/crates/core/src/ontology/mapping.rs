use std::collections::HashSet;

use super::{Axiom, CardinalityKind, ClassExpr, Ontology};
use crate::rdf::{Iri, Literal, Term, Triple};
use crate::vocab::{self, iri};

/// Serialises the ontology back to RDF following the W3C OWL-to-RDF
/// mapping. Complex class expressions get fresh blank nodes; residue
/// triples are appended verbatim.
pub fn serialize_mapping(onto: &Ontology) -> Vec<Triple> {
    let (mut structural, annotations) = mapping_parts(onto);
    structural.extend(annotations);
    structural
}

/// Structural triples (declarations, axioms, non-annotation residue) and
/// annotation triples, kept apart for graph construction.
pub(crate) fn mapping_parts(onto: &Ontology) -> (Vec<Triple>, Vec<Triple>) {
    let taken: HashSet<&str> = onto
        .residue()
        .iter()
        .flat_map(|t| [&t.subject, &t.object])
        .filter_map(Term::as_blank)
        .collect();
    let mut w = Writer {
        out: Vec::new(),
        next_blank: 0,
        taken,
    };

    let rdf_type = iri(vocab::RDF_TYPE);
    for (entity, kind) in onto.declarations() {
        w.emit(entity.clone(), rdf_type.clone(), iri(kind.type_iri()));
    }
    for axiom in onto.axioms() {
        w.axiom(axiom);
    }

    let mut annotations = Vec::new();
    for (entity, list) in onto.annotations() {
        for a in list {
            annotations.push(Triple::new(
                entity.clone(),
                a.property.clone(),
                a.value.clone(),
            ));
        }
    }
    for t in onto.residue() {
        if onto.is_annotation_property(&t.predicate) {
            annotations.push(t.clone());
        } else {
            w.out.push(t.clone());
        }
    }
    (w.out, annotations)
}

struct Writer<'a> {
    out: Vec<Triple>,
    next_blank: usize,
    taken: HashSet<&'a str>,
}

impl Writer<'_> {
    fn emit(&mut self, s: impl Into<Term>, p: Iri, o: impl Into<Term>) {
        self.out.push(Triple::new(s, p, o));
    }

    fn fresh(&mut self) -> Term {
        loop {
            let label = format!("g{}", self.next_blank);
            self.next_blank += 1;
            if !self.taken.contains(label.as_str()) {
                return Term::Blank(label);
            }
        }
    }

    fn axiom(&mut self, axiom: &Axiom) {
        match axiom {
            Axiom::SubClassOf { sub, sup } => {
                let s = self.expr(sub);
                let o = self.expr(sup);
                self.emit(s, iri(vocab::RDFS_SUBCLASS_OF), o);
            }
            Axiom::EquivalentClasses(a, b) => {
                let s = self.expr(a);
                let o = self.expr(b);
                self.emit(s, iri(vocab::OWL_EQUIVALENT_CLASS), o);
            }
            Axiom::ClassAssertion { class, individual } => {
                let o = self.expr(class);
                self.emit(individual.clone(), iri(vocab::RDF_TYPE), o);
            }
            Axiom::ObjectAssertion {
                subject,
                property,
                object,
            } => self.emit(subject.clone(), property.clone(), object.clone()),
            Axiom::DataAssertion {
                subject,
                property,
                value,
            } => self.emit(subject.clone(), property.clone(), value.clone()),
            Axiom::SubPropertyOf { sub, sup } => {
                self.emit(sub.clone(), iri(vocab::RDFS_SUBPROPERTY_OF), sup.clone())
            }
            Axiom::InverseOf(a, b) => self.emit(a.clone(), iri(vocab::OWL_INVERSE_OF), b.clone()),
            Axiom::PropertyChain { chain, sup } => {
                let items: Vec<Term> = chain.iter().cloned().map(Term::Iri).collect();
                let head = self.list(items);
                self.emit(sup.clone(), iri(vocab::OWL_PROPERTY_CHAIN_AXIOM), head);
            }
            Axiom::Domain { property, class } => {
                let o = self.expr(class);
                self.emit(property.clone(), iri(vocab::RDFS_DOMAIN), o);
            }
            Axiom::Range { property, class } => {
                let o = self.expr(class);
                self.emit(property.clone(), iri(vocab::RDFS_RANGE), o);
            }
        }
    }

    fn expr(&mut self, expr: &ClassExpr) -> Term {
        match expr {
            ClassExpr::Named(c) => Term::Iri(c.clone()),
            ClassExpr::Intersection(ops) | ClassExpr::Union(ops) => {
                let node = self.fresh();
                let key = if matches!(expr, ClassExpr::Intersection(_)) {
                    vocab::OWL_INTERSECTION_OF
                } else {
                    vocab::OWL_UNION_OF
                };
                self.emit(node.clone(), iri(vocab::RDF_TYPE), iri(vocab::OWL_CLASS));
                let items: Vec<Term> = ops.iter().map(|op| self.expr(op)).collect();
                let head = self.list(items);
                self.emit(node.clone(), iri(key), head);
                node
            }
            ClassExpr::Some { property, filler } => {
                self.restriction(property, vocab::OWL_SOME_VALUES_FROM, filler)
            }
            ClassExpr::Only { property, filler } => {
                self.restriction(property, vocab::OWL_ALL_VALUES_FROM, filler)
            }
            ClassExpr::HasValue { property, value } => {
                let node = self.restriction_head(property);
                self.emit(node.clone(), iri(vocab::OWL_HAS_VALUE), value.clone());
                node
            }
            ClassExpr::Cardinality {
                kind,
                n,
                property,
                filler,
            } => {
                let node = self.restriction_head(property);
                let key = match (kind, filler.is_some()) {
                    (CardinalityKind::Min, false) => vocab::OWL_MIN_CARDINALITY,
                    (CardinalityKind::Max, false) => vocab::OWL_MAX_CARDINALITY,
                    (CardinalityKind::Exact, false) => vocab::OWL_CARDINALITY,
                    (CardinalityKind::Min, true) => vocab::OWL_MIN_QUALIFIED_CARDINALITY,
                    (CardinalityKind::Max, true) => vocab::OWL_MAX_QUALIFIED_CARDINALITY,
                    (CardinalityKind::Exact, true) => vocab::OWL_QUALIFIED_CARDINALITY,
                };
                let count = Literal::typed(n.to_string(), iri(vocab::XSD_NON_NEGATIVE_INTEGER));
                self.emit(node.clone(), iri(key), count);
                if let Some(f) = filler {
                    let o = self.expr(f);
                    self.emit(node.clone(), iri(vocab::OWL_ON_CLASS), o);
                }
                node
            }
        }
    }

    fn restriction_head(&mut self, property: &Iri) -> Term {
        let node = self.fresh();
        self.emit(node.clone(), iri(vocab::RDF_TYPE), iri(vocab::OWL_RESTRICTION));
        self.emit(node.clone(), iri(vocab::OWL_ON_PROPERTY), property.clone());
        node
    }

    fn restriction(&mut self, property: &Iri, key: &str, filler: &ClassExpr) -> Term {
        let node = self.restriction_head(property);
        let o = self.expr(filler);
        self.emit(node.clone(), iri(key), o);
        node
    }

    fn list(&mut self, items: Vec<Term>) -> Term {
        let mut tail = Term::Iri(iri(vocab::RDF_NIL));
        let nodes: Vec<Term> = items.iter().map(|_| self.fresh()).collect();
        for (node, item) in nodes.iter().zip(items).rev() {
            self.emit(node.clone(), iri(vocab::RDF_FIRST), item);
            self.emit(node.clone(), iri(vocab::RDF_REST), tail);
            tail = node.clone();
        }
        tail
    }
}
