//! OWL axiom model for the supported subset, reconstructed from RDF triples.

mod mapping;
mod reconstruct;

use std::collections::{BTreeMap, BTreeSet};

pub use mapping::serialize_mapping;
pub(crate) use mapping::mapping_parts;
pub use reconstruct::reconstruct_axioms;

use crate::rdf::{Iri, Literal, Triple};
use crate::vocab;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CardinalityKind {
    Min,
    Max,
    Exact,
}

impl CardinalityKind {
    pub fn keyword(self) -> &'static str {
        match self {
            CardinalityKind::Min => "min",
            CardinalityKind::Max => "max",
            CardinalityKind::Exact => "exactly",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassExpr {
    Named(Iri),
    Intersection(Vec<ClassExpr>),
    Union(Vec<ClassExpr>),
    Some {
        property: Iri,
        filler: Box<ClassExpr>,
    },
    Only {
        property: Iri,
        filler: Box<ClassExpr>,
    },
    /// Unqualified when `filler` is `None`.
    Cardinality {
        kind: CardinalityKind,
        n: u32,
        property: Iri,
        filler: Option<Box<ClassExpr>>,
    },
    HasValue {
        property: Iri,
        value: Iri,
    },
}

impl ClassExpr {
    pub fn named(iri: Iri) -> Self {
        ClassExpr::Named(iri)
    }

    pub fn some(property: Iri, filler: ClassExpr) -> Self {
        ClassExpr::Some {
            property,
            filler: Box::new(filler),
        }
    }

    pub fn only(property: Iri, filler: ClassExpr) -> Self {
        ClassExpr::Only {
            property,
            filler: Box::new(filler),
        }
    }

    pub fn as_named(&self) -> Option<&Iri> {
        match self {
            ClassExpr::Named(iri) => Some(iri),
            _ => None,
        }
    }

    /// Every named class mentioned anywhere in the expression.
    pub fn classes(&self, out: &mut Vec<Iri>) {
        match self {
            ClassExpr::Named(iri) => out.push(iri.clone()),
            ClassExpr::Intersection(ops) | ClassExpr::Union(ops) => {
                ops.iter().for_each(|op| op.classes(out))
            }
            ClassExpr::Some { filler, .. } | ClassExpr::Only { filler, .. } => filler.classes(out),
            ClassExpr::Cardinality { filler, .. } => {
                if let Some(f) = filler {
                    f.classes(out)
                }
            }
            ClassExpr::HasValue { .. } => {}
        }
    }

    fn register(&self, onto: &mut Ontology) {
        match self {
            ClassExpr::Named(iri) => {
                onto.classes.insert(iri.clone());
            }
            ClassExpr::Intersection(ops) | ClassExpr::Union(ops) => {
                ops.iter().for_each(|op| op.register(onto))
            }
            ClassExpr::Some { property, filler } | ClassExpr::Only { property, filler } => {
                onto.register_object_property(property);
                filler.register(onto);
            }
            ClassExpr::Cardinality {
                property, filler, ..
            } => {
                onto.register_object_property(property);
                if let Some(f) = filler {
                    f.register(onto);
                }
            }
            ClassExpr::HasValue { property, value } => {
                onto.register_object_property(property);
                onto.instances.insert(value.clone());
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    SubClassOf { sub: ClassExpr, sup: ClassExpr },
    ClassAssertion { class: ClassExpr, individual: Iri },
    ObjectAssertion { subject: Iri, property: Iri, object: Iri },
    DataAssertion { subject: Iri, property: Iri, value: Literal },
    SubPropertyOf { sub: Iri, sup: Iri },
    InverseOf(Iri, Iri),
    /// `chain[0] o chain[1] o ... SubPropertyOf sup`; at least two links.
    PropertyChain { chain: Vec<Iri>, sup: Iri },
    Domain { property: Iri, class: ClassExpr },
    Range { property: Iri, class: ClassExpr },
    EquivalentClasses(ClassExpr, ClassExpr),
}

impl Axiom {
    pub fn subclass(sub: Iri, sup: Iri) -> Self {
        Axiom::SubClassOf {
            sub: ClassExpr::Named(sub),
            sup: ClassExpr::Named(sup),
        }
    }

    pub fn membership(class: Iri, individual: Iri) -> Self {
        Axiom::ClassAssertion {
            class: ClassExpr::Named(class),
            individual,
        }
    }

    /// `(sub, sup)` when this is a subsumption between two named classes.
    pub fn as_named_subsumption(&self) -> Option<(&Iri, &Iri)> {
        match self {
            Axiom::SubClassOf {
                sub: ClassExpr::Named(a),
                sup: ClassExpr::Named(b),
            } => Some((a, b)),
            _ => None,
        }
    }

    /// `(individual, class)` when this is a membership in a named class.
    pub fn as_named_membership(&self) -> Option<(&Iri, &Iri)> {
        match self {
            Axiom::ClassAssertion {
                class: ClassExpr::Named(c),
                individual,
            } => Some((individual, c)),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityKind {
    Class,
    Individual,
    ObjectProperty,
    DataProperty,
    AnnotationProperty,
}

impl EntityKind {
    pub fn type_iri(self) -> &'static str {
        match self {
            EntityKind::Class => vocab::OWL_CLASS,
            EntityKind::Individual => vocab::OWL_NAMED_INDIVIDUAL,
            EntityKind::ObjectProperty => vocab::OWL_OBJECT_PROPERTY,
            EntityKind::DataProperty => vocab::OWL_DATATYPE_PROPERTY,
            EntityKind::AnnotationProperty => vocab::OWL_ANNOTATION_PROPERTY,
        }
    }

    pub fn from_type_iri(iri: &str) -> Option<Self> {
        Some(match iri {
            vocab::OWL_CLASS => EntityKind::Class,
            vocab::OWL_NAMED_INDIVIDUAL => EntityKind::Individual,
            vocab::OWL_OBJECT_PROPERTY => EntityKind::ObjectProperty,
            vocab::OWL_DATATYPE_PROPERTY => EntityKind::DataProperty,
            vocab::OWL_ANNOTATION_PROPERTY => EntityKind::AnnotationProperty,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Annotation {
    pub property: Iri,
    pub value: Literal,
}

/// An ontology: axioms, entity annotations and the entity registry.
///
/// Built once and then only read; the mutating methods are used by the
/// reconstruction, materialisation and dataset-splitting code.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ontology {
    declarations: Vec<(Iri, EntityKind)>,
    axioms: Vec<Axiom>,
    annotations: BTreeMap<Iri, Vec<Annotation>>,
    labels: BTreeMap<Iri, String>,
    classes: BTreeSet<Iri>,
    instances: BTreeSet<Iri>,
    object_properties: BTreeSet<Iri>,
    data_properties: BTreeSet<Iri>,
    annotation_properties: BTreeSet<Iri>,
    residue: Vec<Triple>,
}

impl Ontology {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declarations(&self) -> &[(Iri, EntityKind)] {
        &self.declarations
    }

    pub fn axioms(&self) -> &[Axiom] {
        &self.axioms
    }

    pub fn annotations(&self) -> &BTreeMap<Iri, Vec<Annotation>> {
        &self.annotations
    }

    pub fn annotations_of(&self, entity: &Iri) -> &[Annotation] {
        self.annotations.get(entity).map_or(&[], Vec::as_slice)
    }

    /// The English `rdfs:label`, if any.
    pub fn label(&self, entity: &Iri) -> Option<&str> {
        self.labels.get(entity).map(String::as_str)
    }

    pub fn labels(&self) -> &BTreeMap<Iri, String> {
        &self.labels
    }

    pub fn classes(&self) -> &BTreeSet<Iri> {
        &self.classes
    }

    pub fn instances(&self) -> &BTreeSet<Iri> {
        &self.instances
    }

    pub fn object_properties(&self) -> &BTreeSet<Iri> {
        &self.object_properties
    }

    pub fn data_properties(&self) -> &BTreeSet<Iri> {
        &self.data_properties
    }

    pub fn annotation_properties(&self) -> &BTreeSet<Iri> {
        &self.annotation_properties
    }

    /// Triples that matched no supported pattern.
    pub fn residue(&self) -> &[Triple] {
        &self.residue
    }

    pub fn contains_entity(&self, iri: &Iri) -> bool {
        self.classes.contains(iri)
            || self.instances.contains(iri)
            || self.object_properties.contains(iri)
            || self.data_properties.contains(iri)
            || self.annotation_properties.contains(iri)
    }

    pub fn is_annotation_property(&self, iri: &Iri) -> bool {
        self.annotation_properties.contains(iri)
            || vocab::BUILTIN_ANNOTATION_PROPERTIES.contains(&iri.as_str())
    }

    pub fn declare(&mut self, iri: Iri, kind: EntityKind) {
        match kind {
            EntityKind::Class => self.classes.insert(iri.clone()),
            EntityKind::Individual => self.instances.insert(iri.clone()),
            EntityKind::ObjectProperty => self.object_properties.insert(iri.clone()),
            EntityKind::DataProperty => self.data_properties.insert(iri.clone()),
            EntityKind::AnnotationProperty => self.annotation_properties.insert(iri.clone()),
        };
        if !self.declarations.contains(&(iri.clone(), kind)) {
            self.declarations.push((iri, kind));
        }
    }

    /// Appends an axiom and registers every entity it mentions.
    pub fn add_axiom(&mut self, axiom: Axiom) {
        match &axiom {
            Axiom::SubClassOf { sub, sup } | Axiom::EquivalentClasses(sub, sup) => {
                sub.register(self);
                sup.register(self);
            }
            Axiom::ClassAssertion { class, individual } => {
                class.register(self);
                self.instances.insert(individual.clone());
            }
            Axiom::ObjectAssertion {
                subject,
                property,
                object,
            } => {
                self.instances.insert(subject.clone());
                self.instances.insert(object.clone());
                self.register_object_property(property);
            }
            Axiom::DataAssertion {
                subject, property, ..
            } => {
                self.instances.insert(subject.clone());
                self.data_properties.insert(property.clone());
            }
            Axiom::SubPropertyOf { sub, sup } | Axiom::InverseOf(sub, sup) => {
                self.register_object_property(sub);
                self.register_object_property(sup);
            }
            Axiom::PropertyChain { chain, sup } => {
                chain.iter().for_each(|p| self.register_object_property(p));
                self.register_object_property(sup);
            }
            Axiom::Domain { property, class } | Axiom::Range { property, class } => {
                self.register_object_property(property);
                class.register(self);
            }
        }
        self.axioms.push(axiom);
    }

    pub fn add_annotation(&mut self, entity: Iri, property: Iri, value: Literal) {
        self.annotation_properties.insert(property.clone());
        if property.as_str() == vocab::RDFS_LABEL && value.is_english() {
            // several English labels: keep the lexicographically first
            match self.labels.get(&entity) {
                Some(existing) if existing.as_str() <= value.lexical.as_str() => {}
                _ => {
                    self.labels.insert(entity.clone(), value.lexical.clone());
                }
            }
        }
        self.annotations
            .entry(entity)
            .or_default()
            .push(Annotation { property, value });
    }

    pub fn add_residue(&mut self, triple: Triple) {
        self.residue.push(triple);
    }

    /// A copy keeping only the axioms for which `keep` returns true.
    /// The entity registry is left as is.
    pub fn retain_axioms(&self, mut keep: impl FnMut(&Axiom) -> bool) -> Ontology {
        let mut out = self.clone();
        out.axioms.retain(|ax| keep(ax));
        out
    }

    fn register_object_property(&mut self, iri: &Iri) {
        if !self.data_properties.contains(iri) {
            self.object_properties.insert(iri.clone());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::iri;

    #[test]
    fn english_label_prefers_lexicographic_first() {
        let mut onto = Ontology::new();
        let e = iri("http://ex.org/e");
        let label = iri(vocab::RDFS_LABEL);
        onto.add_annotation(e.clone(), label.clone(), Literal::lang("Zebra", "en"));
        onto.add_annotation(e.clone(), label.clone(), Literal::lang("Ape", "fr"));
        onto.add_annotation(e.clone(), label.clone(), Literal::plain("Beer"));
        assert_eq!(onto.label(&e), Some("Beer"));
        assert_eq!(onto.annotations_of(&e).len(), 3);
    }

    #[test]
    fn axioms_register_entities() {
        let mut onto = Ontology::new();
        let (a, r, b, x) = (
            iri("http://ex.org/A"),
            iri("http://ex.org/r"),
            iri("http://ex.org/B"),
            iri("http://ex.org/x"),
        );
        onto.add_axiom(Axiom::SubClassOf {
            sub: ClassExpr::Named(a.clone()),
            sup: ClassExpr::HasValue {
                property: r.clone(),
                value: x.clone(),
            },
        });
        onto.add_axiom(Axiom::membership(b.clone(), x.clone()));
        assert!(onto.classes().contains(&a) && onto.classes().contains(&b));
        assert!(onto.object_properties().contains(&r));
        assert!(onto.instances().contains(&x));
    }
}
