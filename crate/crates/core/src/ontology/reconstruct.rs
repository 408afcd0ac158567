use std::collections::{HashMap, HashSet};

use log::warn;

use super::{Axiom, CardinalityKind, ClassExpr, EntityKind, Ontology};
use crate::rdf::{Iri, Literal, Term, Triple};
use crate::vocab;

/// Inverts the OWL-to-RDF mapping for the supported subset.
///
/// Every recognised pattern becomes exactly one axiom, declaration or
/// annotation. Anything else, including blank-node structures that do not
/// form a complete class expression, lands in the residue list untouched.
pub fn reconstruct_axioms(triples: &[Triple]) -> Ontology {
    Reconstructor::new(triples).run()
}

struct Reconstructor<'a> {
    triples: &'a [Triple],
    consumed: Vec<bool>,
    by_blank: HashMap<&'a str, Vec<usize>>,
    blank_refs: HashMap<&'a str, usize>,
    onto: Ontology,
}

impl<'a> Reconstructor<'a> {
    fn new(triples: &'a [Triple]) -> Self {
        let mut by_blank: HashMap<&str, Vec<usize>> = HashMap::new();
        let mut blank_refs: HashMap<&str, usize> = HashMap::new();
        for (i, t) in triples.iter().enumerate() {
            if let Some(b) = t.subject.as_blank() {
                by_blank.entry(b).or_default().push(i);
            }
            if let Some(b) = t.object.as_blank() {
                *blank_refs.entry(b).or_default() += 1;
            }
        }
        Reconstructor {
            triples,
            consumed: vec![false; triples.len()],
            by_blank,
            blank_refs,
            onto: Ontology::new(),
        }
    }

    fn run(mut self) -> Ontology {
        // declarations first, so later passes can tell property kinds apart
        for (i, t) in self.triples.iter().enumerate() {
            if let (Term::Iri(s), vocab::RDF_TYPE, Term::Iri(o)) =
                (&t.subject, t.predicate.as_str(), &t.object)
            {
                if let Some(kind) = EntityKind::from_type_iri(o.as_str()) {
                    self.onto.declare(s.clone(), kind);
                    self.consumed[i] = true;
                }
            }
        }

        for i in 0..self.triples.len() {
            if self.consumed[i] {
                continue;
            }
            let t = &self.triples[i];
            // blank subjects are only roots of general class axioms
            if let Some(b) = t.subject.as_blank() {
                if self.blank_refs.get(b).copied().unwrap_or(0) > 0 {
                    continue;
                }
                if !matches!(
                    t.predicate.as_str(),
                    vocab::RDFS_SUBCLASS_OF | vocab::OWL_EQUIVALENT_CLASS
                ) {
                    continue;
                }
            }
            self.triple(i);
        }

        for (i, t) in self.triples.iter().enumerate() {
            if !self.consumed[i] {
                self.onto.add_residue(t.clone());
            }
        }
        self.onto
    }

    fn triple(&mut self, i: usize) {
        let t = &self.triples[i];
        let pred = t.predicate.as_str();
        match pred {
            vocab::RDFS_SUBCLASS_OF | vocab::OWL_EQUIVALENT_CLASS => {
                let Some((sub, mut used)) = self.class_expr(&t.subject) else {
                    return self.incomplete(i);
                };
                let Some((sup, used2)) = self.class_expr(&t.object) else {
                    return self.incomplete(i);
                };
                used.extend(used2);
                let axiom = if pred == vocab::RDFS_SUBCLASS_OF {
                    Axiom::SubClassOf { sub, sup }
                } else {
                    Axiom::EquivalentClasses(sub, sup)
                };
                self.accept(i, used, axiom);
            }
            vocab::RDF_TYPE => {
                let Term::Iri(individual) = &t.subject else {
                    return;
                };
                if let Term::Iri(o) = &t.object {
                    if vocab::is_builtin(o) && o.as_str() != vocab::OWL_THING {
                        return;
                    }
                }
                let Some((class, used)) = self.class_expr(&t.object) else {
                    return self.incomplete(i);
                };
                let axiom = Axiom::ClassAssertion {
                    class,
                    individual: individual.clone(),
                };
                self.accept(i, used, axiom);
            }
            vocab::RDFS_SUBPROPERTY_OF | vocab::OWL_INVERSE_OF => {
                if let (Term::Iri(a), Term::Iri(b)) = (&t.subject, &t.object) {
                    let axiom = if pred == vocab::OWL_INVERSE_OF {
                        Axiom::InverseOf(a.clone(), b.clone())
                    } else {
                        Axiom::SubPropertyOf {
                            sub: a.clone(),
                            sup: b.clone(),
                        }
                    };
                    self.accept(i, Vec::new(), axiom);
                }
            }
            vocab::OWL_PROPERTY_CHAIN_AXIOM => {
                let Term::Iri(sup) = &t.subject else { return };
                let mut used = Vec::new();
                let Some(items) = self.list(&t.object, &mut used) else {
                    return self.incomplete(i);
                };
                let chain: Option<Vec<Iri>> = items
                    .iter()
                    .map(|term| term.as_iri().filter(|p| !vocab::is_builtin(p)).cloned())
                    .collect();
                match chain {
                    Some(chain) if chain.len() >= 2 => {
                        let axiom = Axiom::PropertyChain {
                            chain,
                            sup: sup.clone(),
                        };
                        self.accept(i, used, axiom);
                    }
                    _ => self.incomplete(i),
                }
            }
            vocab::RDFS_DOMAIN | vocab::RDFS_RANGE => {
                let Term::Iri(property) = &t.subject else { return };
                if self.onto.data_properties().contains(property) {
                    return;
                }
                let Some((class, used)) = self.class_expr(&t.object) else {
                    return;
                };
                let axiom = if pred == vocab::RDFS_DOMAIN {
                    Axiom::Domain {
                        property: property.clone(),
                        class,
                    }
                } else {
                    Axiom::Range {
                        property: property.clone(),
                        class,
                    }
                };
                self.accept(i, used, axiom);
            }
            _ => self.assertion(i),
        }
    }

    /// Property assertions and entity annotations.
    fn assertion(&mut self, i: usize) {
        let t = &self.triples[i];
        let Term::Iri(subject) = &t.subject else { return };
        let property = &t.predicate;
        let is_annotation = self.onto.is_annotation_property(property);
        if vocab::is_builtin(property) && !is_annotation {
            return;
        }
        match &t.object {
            Term::Literal(lit) => {
                let data = self.onto.data_properties().contains(property)
                    || (!is_annotation && !lit.is_textual());
                if data {
                    let axiom = Axiom::DataAssertion {
                        subject: subject.clone(),
                        property: property.clone(),
                        value: lit.clone(),
                    };
                    self.accept(i, Vec::new(), axiom);
                } else {
                    self.onto
                        .add_annotation(subject.clone(), property.clone(), lit.clone());
                    self.consumed[i] = true;
                }
            }
            Term::Iri(object) if !is_annotation && !self.onto.data_properties().contains(property) => {
                let axiom = Axiom::ObjectAssertion {
                    subject: subject.clone(),
                    property: property.clone(),
                    object: object.clone(),
                };
                self.accept(i, Vec::new(), axiom);
            }
            _ => {}
        }
    }

    fn accept(&mut self, i: usize, used: Vec<usize>, axiom: Axiom) {
        self.consumed[i] = true;
        for j in used {
            self.consumed[j] = true;
        }
        self.onto.add_axiom(axiom);
    }

    fn incomplete(&self, i: usize) {
        warn!(
            "triple {} ({}): incomplete class expression, kept as residue",
            i + 1,
            self.triples[i]
        );
    }

    /// Parses a class expression rooted at `term`, returning the indices of
    /// the blank-node triples it spans.
    fn class_expr(&self, term: &Term) -> Option<(ClassExpr, Vec<usize>)> {
        let mut used = Vec::new();
        let mut visiting = HashSet::new();
        let expr = self.expr(term, &mut used, &mut visiting)?;
        if used.iter().any(|&j| self.consumed[j]) {
            return None;
        }
        Some((expr, used))
    }

    fn expr<'s>(
        &'s self,
        term: &'s Term,
        used: &mut Vec<usize>,
        visiting: &mut HashSet<&'s str>,
    ) -> Option<ClassExpr> {
        match term {
            Term::Iri(iri) => {
                if vocab::is_builtin(iri) && iri.as_str() != vocab::OWL_THING {
                    None
                } else {
                    Some(ClassExpr::Named(iri.clone()))
                }
            }
            Term::Literal(_) => None,
            Term::Blank(b) => {
                if !visiting.insert(b.as_str()) || self.blank_refs.get(b.as_str()).copied().unwrap_or(0) > 1 {
                    return None;
                }
                let rows = self.by_blank.get(b.as_str())?;
                let mut fields: HashMap<&str, &Term> = HashMap::new();
                for &j in rows {
                    let t = &self.triples[j];
                    // a root blank node also carries its own axiom triples
                    if matches!(
                        t.predicate.as_str(),
                        vocab::RDFS_SUBCLASS_OF | vocab::OWL_EQUIVALENT_CLASS
                    ) {
                        continue;
                    }
                    if fields.insert(t.predicate.as_str(), &t.object).is_some() {
                        return None;
                    }
                    used.push(j);
                }
                let type_of = fields.remove(vocab::RDF_TYPE).and_then(Term::as_iri);
                match type_of.map(Iri::as_str) {
                    Some(vocab::OWL_RESTRICTION) => self.restriction(fields, used, visiting),
                    Some(vocab::OWL_CLASS) if fields.len() == 1 => {
                        let (key, list) = fields.into_iter().next()?;
                        let mut ops = Vec::new();
                        for item in self.list(list, used)? {
                            ops.push(self.expr(item, used, visiting)?);
                        }
                        if ops.len() < 2 {
                            return None;
                        }
                        match key {
                            vocab::OWL_INTERSECTION_OF => Some(ClassExpr::Intersection(ops)),
                            vocab::OWL_UNION_OF => Some(ClassExpr::Union(ops)),
                            _ => None,
                        }
                    }
                    _ => None,
                }
            }
        }
    }

    fn restriction<'s>(
        &'s self,
        mut fields: HashMap<&str, &'s Term>,
        used: &mut Vec<usize>,
        visiting: &mut HashSet<&'s str>,
    ) -> Option<ClassExpr> {
        let property = fields
            .remove(vocab::OWL_ON_PROPERTY)?
            .as_iri()
            .filter(|p| !vocab::is_builtin(p))?
            .clone();
        let on_class = fields.remove(vocab::OWL_ON_CLASS);
        if fields.len() != 1 {
            return None;
        }
        let (key, value) = fields.into_iter().next()?;
        let qualified = matches!(
            key,
            vocab::OWL_MIN_QUALIFIED_CARDINALITY
                | vocab::OWL_MAX_QUALIFIED_CARDINALITY
                | vocab::OWL_QUALIFIED_CARDINALITY
        );
        if qualified != on_class.is_some() {
            return None;
        }
        let expr = match key {
            vocab::OWL_SOME_VALUES_FROM => ClassExpr::Some {
                property,
                filler: Box::new(self.expr(value, used, visiting)?),
            },
            vocab::OWL_ALL_VALUES_FROM => ClassExpr::Only {
                property,
                filler: Box::new(self.expr(value, used, visiting)?),
            },
            vocab::OWL_HAS_VALUE => ClassExpr::HasValue {
                property,
                value: value.as_iri()?.clone(),
            },
            _ => {
                let kind = match key {
                    vocab::OWL_MIN_CARDINALITY | vocab::OWL_MIN_QUALIFIED_CARDINALITY => {
                        CardinalityKind::Min
                    }
                    vocab::OWL_MAX_CARDINALITY | vocab::OWL_MAX_QUALIFIED_CARDINALITY => {
                        CardinalityKind::Max
                    }
                    vocab::OWL_CARDINALITY | vocab::OWL_QUALIFIED_CARDINALITY => {
                        CardinalityKind::Exact
                    }
                    _ => return None,
                };
                let n = cardinality(value.as_literal()?)?;
                let filler = match on_class {
                    Some(c) => Some(Box::new(self.expr(c, used, visiting)?)),
                    None => None,
                };
                ClassExpr::Cardinality {
                    kind,
                    n,
                    property,
                    filler,
                }
            }
        };
        Some(expr)
    }

    /// Walks an `rdf:first` / `rdf:rest` list.
    fn list<'s>(&'s self, head: &'s Term, used: &mut Vec<usize>) -> Option<Vec<&'s Term>> {
        let mut items = Vec::new();
        let mut node = head;
        let mut seen = HashSet::new();
        loop {
            match node {
                Term::Iri(iri) if iri.as_str() == vocab::RDF_NIL => return Some(items),
                Term::Blank(b) => {
                    if !seen.insert(b.as_str()) {
                        return None;
                    }
                    let rows = self.by_blank.get(b.as_str())?;
                    if rows.len() != 2 {
                        return None;
                    }
                    let mut first = None;
                    let mut rest = None;
                    for &j in rows {
                        let t = &self.triples[j];
                        match t.predicate.as_str() {
                            vocab::RDF_FIRST => first = Some(&t.object),
                            vocab::RDF_REST => rest = Some(&t.object),
                            _ => return None,
                        }
                    }
                    items.push(first?);
                    node = rest?;
                    used.extend(rows.iter().copied());
                }
                _ => return None,
            }
        }
    }
}

fn cardinality(lit: &Literal) -> Option<u32> {
    if lit.datatype.as_ref().map(Iri::as_str) != Some(vocab::XSD_NON_NEGATIVE_INTEGER) {
        return None;
    }
    lit.lexical.parse().ok()
}
