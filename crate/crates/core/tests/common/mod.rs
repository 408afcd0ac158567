//! Independent oracles shared by the integration tests and the acceptance
//! report. Nothing here calls the code it checks to compute an expected
//! value; each oracle is a separate (usually brute-force) implementation.

#![allow(dead_code, clippy::needless_range_loop, clippy::type_complexity)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use ontovec::corpus::{axiom_sentence, build_combined, build_lexical, CombineStrategy, Provenance, Sentence};
use ontovec::embedder::sgns::loss_and_grad;
use ontovec::embedder::{train, FeatureMode, TrainConfig};
use ontovec::ontology::{
    reconstruct_axioms, serialize_mapping, Axiom, CardinalityKind, ClassExpr, EntityKind, Ontology,
};
use ontovec::pipeline::{load_ontology, run_pipeline, RunConfig, RunOutcome};
use ontovec::predictor::{random_ranking_mrr, EvalReport, Task};
use ontovec::projection::{project_rules, to_walk_graph, ProjectedGraph, Strategy};
use ontovec::rdf::{canonical_form, write_ntriples, Iri, Literal, Triple};
use ontovec::reasoner::{classify, materialize};
use ontovec::synth::{generate, SynthConfig};
use ontovec::vocab::{self, iri};
use ontovec::walker::{generate_walks, stream_rng, Token, Walk, WalkConfig, WalkerKind};
use ontovec::corpus::Documents;

// ---------------------------------------------------------------------------
// checks

#[derive(Clone, Debug)]
pub enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

#[derive(Clone, Debug)]
pub struct Check {
    pub id: u32,
    pub name: &'static str,
    pub outcome: Outcome,
}

impl Check {
    fn new(id: u32, name: &'static str, failures: Vec<String>, detail: String) -> Self {
        let outcome = if failures.is_empty() {
            Outcome::Pass(detail)
        } else {
            Outcome::Fail(failures.join("; "))
        };
        Check { id, name, outcome }
    }

    pub fn passed(&self) -> bool {
        !matches!(self.outcome, Outcome::Fail(_))
    }

    pub fn line(&self) -> String {
        let (tag, detail) = match &self.outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => ("FAIL", d),
            Outcome::Skip(d) => ("SKIP", d),
        };
        format!("{tag} [{:>2}] {}: {detail}", self.id, self.name)
    }

    pub fn assert(&self) {
        assert!(self.passed(), "{}", self.line());
    }
}

// ---------------------------------------------------------------------------
// fixtures

pub fn data_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn fixture(name: &str) -> Ontology {
    load_ontology(&data_path(name)).expect("fixture parses")
}

pub fn vc(name: &str) -> Iri {
    iri(&format!("http://www.fbk.eu/ontologies/virtualcoach#{name}"))
}

pub fn obo(name: &str) -> Iri {
    iri(&format!("http://purl.obolibrary.org/obo/{name}"))
}

// ---------------------------------------------------------------------------
// random ontologies

pub struct Names {
    pub classes: Vec<Iri>,
    pub individuals: Vec<Iri>,
    pub properties: Vec<Iri>,
    pub data_property: Iri,
}

fn ex(name: &str) -> Iri {
    iri(&format!("http://example.org/gen#{name}"))
}

fn named<R: Rng>(rng: &mut R, n: &Names) -> ClassExpr {
    ClassExpr::Named(n.classes.choose(rng).unwrap().clone())
}

fn named_list<R: Rng>(rng: &mut R, n: &Names) -> Vec<ClassExpr> {
    let k = rng.gen_range(2..=3);
    (0..k).map(|_| named(rng, n)).collect()
}

fn filler<R: Rng>(rng: &mut R, n: &Names, depth: u32) -> ClassExpr {
    match rng.gen_range(0..10) {
        0..=4 => named(rng, n),
        5 => ClassExpr::Union(named_list(rng, n)),
        6 => ClassExpr::Intersection(named_list(rng, n)),
        7 => ClassExpr::Named(iri(vocab::OWL_THING)),
        _ if depth > 0 => restriction(rng, n, depth - 1),
        _ => named(rng, n),
    }
}

fn restriction<R: Rng>(rng: &mut R, n: &Names, depth: u32) -> ClassExpr {
    let property = n.properties.choose(rng).unwrap().clone();
    match rng.gen_range(0..6) {
        0 | 1 => ClassExpr::some(property, filler(rng, n, depth)),
        2 => ClassExpr::only(property, filler(rng, n, depth)),
        3 | 4 => ClassExpr::Cardinality {
            kind: *[CardinalityKind::Min, CardinalityKind::Max, CardinalityKind::Exact]
                .choose(rng)
                .unwrap(),
            n: rng.gen_range(0..4),
            property,
            filler: if rng.gen_bool(0.7) {
                Some(Box::new(filler(rng, n, depth)))
            } else {
                None
            },
        },
        _ => ClassExpr::HasValue {
            property,
            value: n.individuals.choose(rng).unwrap().clone(),
        },
    }
}

fn random_axiom<R: Rng>(rng: &mut R, n: &Names) -> Axiom {
    let prop = |rng: &mut R| n.properties.choose(rng).unwrap().clone();
    let ind = |rng: &mut R| n.individuals.choose(rng).unwrap().clone();
    match rng.gen_range(0..17) {
        0 | 1 => Axiom::SubClassOf {
            sub: named(rng, n),
            sup: named(rng, n),
        },
        2 | 3 => Axiom::SubClassOf {
            sub: named(rng, n),
            sup: restriction(rng, n, 1),
        },
        4 => Axiom::SubClassOf {
            sub: restriction(rng, n, 1),
            sup: named(rng, n),
        },
        5 => {
            let other = match rng.gen_range(0..4) {
                0 => named(rng, n),
                1 => ClassExpr::Union(named_list(rng, n)),
                2 => ClassExpr::Intersection(named_list(rng, n)),
                _ => restriction(rng, n, 1),
            };
            if rng.gen_bool(0.5) {
                Axiom::EquivalentClasses(named(rng, n), other)
            } else {
                Axiom::EquivalentClasses(other, named(rng, n))
            }
        }
        6 => Axiom::SubClassOf {
            sub: named(rng, n),
            sup: ClassExpr::Intersection(vec![named(rng, n), restriction(rng, n, 0)]),
        },
        7 => Axiom::SubClassOf {
            sub: ClassExpr::Union(named_list(rng, n)),
            sup: named(rng, n),
        },
        8 | 9 => Axiom::ClassAssertion {
            class: named(rng, n),
            individual: ind(rng),
        },
        10 => Axiom::ClassAssertion {
            class: restriction(rng, n, 0),
            individual: ind(rng),
        },
        11 => Axiom::ObjectAssertion {
            subject: ind(rng),
            property: prop(rng),
            object: ind(rng),
        },
        12 => Axiom::DataAssertion {
            subject: ind(rng),
            property: n.data_property.clone(),
            value: Literal::typed(
                rng.gen_range(0..5).to_string(),
                iri(&format!("{}integer", vocab::XSD)),
            ),
        },
        13 => Axiom::SubPropertyOf {
            sub: prop(rng),
            sup: prop(rng),
        },
        14 => Axiom::InverseOf(prop(rng), prop(rng)),
        15 => {
            let len = rng.gen_range(2..=3);
            Axiom::PropertyChain {
                chain: (0..len).map(|_| prop(rng)).collect(),
                sup: prop(rng),
            }
        }
        _ => {
            let class = if rng.gen_bool(0.7) {
                named(rng, n)
            } else {
                ClassExpr::Union(named_list(rng, n))
            };
            if rng.gen_bool(0.5) {
                Axiom::Domain {
                    property: prop(rng),
                    class,
                }
            } else {
                Axiom::Range {
                    property: prop(rng),
                    class,
                }
            }
        }
    }
}

/// A random ontology with at most `max_axioms` distinct axioms over at
/// most 12 classes, 6 individuals and 4 object properties.
pub fn random_ontology(seed: u64, max_axioms: usize) -> Ontology {
    let mut rng = stream_rng(seed, 0xa11);
    let names = Names {
        classes: (0..rng.gen_range(3..=12)).map(|i| ex(&format!("C{i}"))).collect(),
        individuals: (0..rng.gen_range(1..=6)).map(|i| ex(&format!("i{i}"))).collect(),
        properties: (0..rng.gen_range(1..=4)).map(|i| ex(&format!("p{i}"))).collect(),
        data_property: ex("d"),
    };
    let mut onto = Ontology::new();
    for c in &names.classes {
        onto.declare(c.clone(), EntityKind::Class);
    }
    for i in &names.individuals {
        onto.declare(i.clone(), EntityKind::Individual);
    }
    for p in &names.properties {
        onto.declare(p.clone(), EntityKind::ObjectProperty);
    }
    onto.declare(names.data_property.clone(), EntityKind::DataProperty);
    let target = rng.gen_range(1..=max_axioms);
    let mut seen = BTreeSet::new();
    for _ in 0..target {
        let ax = random_axiom(&mut rng, &names);
        if seen.insert(ax.clone()) {
            onto.add_axiom(ax);
        }
    }
    onto
}

// ---------------------------------------------------------------------------
// projection oracle: least fixpoint over every candidate triple

/// Every (sub, sup) pair read off SubClassOf and both directions of
/// EquivalentClasses, with super-side intersections and sub-side unions
/// taken apart.
fn gci_pairs(onto: &Ontology) -> Vec<(ClassExpr, ClassExpr)> {
    fn conjuncts(e: &ClassExpr, out: &mut Vec<ClassExpr>) {
        match e {
            ClassExpr::Intersection(ops) => ops.iter().for_each(|o| conjuncts(o, out)),
            other => out.push(other.clone()),
        }
    }
    fn disjuncts(e: &ClassExpr, out: &mut Vec<ClassExpr>) {
        match e {
            ClassExpr::Union(ops) => ops.iter().for_each(|o| disjuncts(o, out)),
            other => out.push(other.clone()),
        }
    }
    let mut raw = Vec::new();
    for ax in onto.axioms() {
        match ax {
            Axiom::SubClassOf { sub, sup } => raw.push((sub.clone(), sup.clone())),
            Axiom::EquivalentClasses(a, b) => {
                raw.push((a.clone(), b.clone()));
                raw.push((b.clone(), a.clone()));
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    for (sub, sup) in raw {
        let (mut subs, mut sups) = (Vec::new(), Vec::new());
        disjuncts(&sub, &mut subs);
        conjuncts(&sup, &mut sups);
        for x in &subs {
            for y in &sups {
                out.push((x.clone(), y.clone()));
            }
        }
    }
    out
}

/// "D ≡ B | B1 ⊔ ... | B1 ⊓ ...": the named classes a filler may stand for.
fn stands_for(onto: &Ontology, d: &ClassExpr, b: &Iri) -> bool {
    let all_named_contains = |ops: &[ClassExpr]| {
        ops.iter().all(|o| matches!(o, ClassExpr::Named(_))) && ops.contains(&ClassExpr::Named(b.clone()))
    };
    match d {
        ClassExpr::Named(x) => {
            if x == b {
                return true;
            }
            onto.axioms().iter().any(|ax| match ax {
                Axiom::EquivalentClasses(p, q) => [(p, q), (q, p)].iter().any(|(l, r)| {
                    *l == d
                        && match r {
                            ClassExpr::Named(y) => y == b,
                            ClassExpr::Union(ops) | ClassExpr::Intersection(ops) => all_named_contains(ops),
                            _ => false,
                        }
                }),
                _ => false,
            })
        }
        ClassExpr::Union(ops) | ClassExpr::Intersection(ops) => all_named_contains(ops),
        _ => false,
    }
}

fn restriction_on<'a>(e: &'a ClassExpr, p: &Iri) -> Option<&'a ClassExpr> {
    match e {
        ClassExpr::Some { property, filler } | ClassExpr::Only { property, filler } if property == p => Some(filler),
        ClassExpr::Cardinality {
            property,
            filler: Some(filler),
            ..
        } if property == p => Some(filler),
        _ => None,
    }
}

struct RuleOracle<'a> {
    onto: &'a Ontology,
    gcis: Vec<(ClassExpr, ClassExpr)>,
}

impl RuleOracle<'_> {
    /// Rows that need no projected edge: restrictions, domain/range,
    /// hasValue, plain assertions and the named subsumption / membership
    /// rows.
    fn base(&self, s: &Iri, p: &Iri, o: &Iri, inverse: bool) -> bool {
        let onto = self.onto;
        let sub_of = iri(vocab::RDFS_SUBCLASS_OF);
        let ty = iri(vocab::RDF_TYPE);
        if *p == sub_of {
            return self.gcis.iter().any(|(x, y)| x == &ClassExpr::Named(s.clone()) && y == &ClassExpr::Named(o.clone()));
        }
        if *p == ty {
            return onto.axioms().contains(&Axiom::membership(o.clone(), s.clone()));
        }
        if inverse && *p == vocab::inverse_of(&sub_of) {
            return self.base(o, &sub_of, s, false);
        }
        if inverse && *p == vocab::inverse_of(&ty) {
            return self.base(o, &ty, s, false);
        }
        let named_s = ClassExpr::Named(s.clone());
        for (x, y) in &self.gcis {
            for (a, r) in [(x, y), (y, x)] {
                if *a == named_s {
                    if let Some(d) = restriction_on(r, p) {
                        if stands_for(onto, d, o) {
                            return true;
                        }
                    }
                }
            }
            if *x == named_s {
                if let ClassExpr::HasValue { property, value } = y {
                    if property == p && onto.axioms().contains(&Axiom::membership(o.clone(), value.clone())) {
                        return true;
                    }
                }
            }
        }
        let domain = onto
            .axioms()
            .iter()
            .any(|ax| matches!(ax, Axiom::Domain { property, class } if property == p && stands_for(onto, class, s)));
        let range = onto
            .axioms()
            .iter()
            .any(|ax| matches!(ax, Axiom::Range { property, class } if property == p && stands_for(onto, class, o)));
        if domain && range {
            return true;
        }
        onto.axioms().contains(&Axiom::ObjectAssertion {
            subject: s.clone(),
            property: p.clone(),
            object: o.clone(),
        })
    }

    /// Sub-property, inverse and chain rows against the current edge set.
    fn propagated(&self, s: &Iri, p: &Iri, o: &Iri, current: &BTreeSet<(Iri, Iri, Iri)>) -> bool {
        let has = |a: &Iri, r: &Iri, b: &Iri| current.contains(&(a.clone(), r.clone(), b.clone()));
        for ax in self.onto.axioms() {
            match ax {
                Axiom::SubPropertyOf { sub, sup } if sub == p => {
                    if has(s, sup, o) {
                        return true;
                    }
                }
                Axiom::InverseOf(a, b) => {
                    if (a == p && has(o, b, s)) || (b == p && has(o, a, s)) {
                        return true;
                    }
                }
                Axiom::PropertyChain { chain, sup } if sup == p => {
                    let mut frontier: BTreeSet<&Iri> = BTreeSet::from([s]);
                    for link in chain {
                        frontier = current
                            .iter()
                            .filter(|(a, r, _)| r == link && frontier.contains(a))
                            .map(|(_, _, b)| b)
                            .collect();
                    }
                    if frontier.contains(o) {
                        return true;
                    }
                }
                _ => {}
            }
        }
        false
    }
}

/// Least set of triples closed under the projection rules, computed by
/// testing every candidate (subject, predicate, object) until nothing
/// changes.
pub fn oracle_rules(onto: &Ontology, inverse: bool) -> BTreeSet<Triple> {
    let oracle = RuleOracle {
        onto,
        gcis: gci_pairs(onto),
    };
    let mut entities: BTreeSet<Iri> = onto.classes().iter().chain(onto.instances()).cloned().collect();
    entities.insert(iri(vocab::OWL_THING));
    let mut predicates: Vec<Iri> = onto.object_properties().iter().cloned().collect();
    predicates.push(iri(vocab::RDFS_SUBCLASS_OF));
    predicates.push(iri(vocab::RDF_TYPE));
    if inverse {
        predicates.push(vocab::inverse_of(&iri(vocab::RDFS_SUBCLASS_OF)));
        predicates.push(vocab::inverse_of(&iri(vocab::RDF_TYPE)));
    }
    let mut base = BTreeSet::new();
    let mut candidates = Vec::new();
    for s in &entities {
        for p in &predicates {
            for o in &entities {
                if oracle.base(s, p, o, inverse) {
                    base.insert((s.clone(), p.clone(), o.clone()));
                } else if onto.object_properties().contains(p) {
                    candidates.push((s.clone(), p.clone(), o.clone()));
                }
            }
        }
    }
    let mut current = base;
    loop {
        let fresh: Vec<_> = candidates
            .iter()
            .filter(|(s, p, o)| !current.contains(&(s.clone(), p.clone(), o.clone())))
            .filter(|(s, p, o)| oracle.propagated(s, p, o, &current))
            .cloned()
            .collect();
        if fresh.is_empty() {
            break;
        }
        current.extend(fresh);
    }
    let mut out: BTreeSet<Triple> = current.into_iter().map(|(s, p, o)| Triple::new(s, p, o)).collect();
    for ax in onto.axioms() {
        if let Axiom::DataAssertion {
            subject,
            property,
            value,
        } = ax
        {
            out.insert(Triple::new(subject.clone(), property.clone(), value.clone()));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// criterion 1 and 2

pub fn criterion_projection_oracle() -> Check {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut edges = 0usize;
    for seed in 0..50 {
        let onto = random_ontology(seed, 200);
        for inverse in [false, true] {
            let got: BTreeSet<Triple> = project_rules(&onto, inverse).edges.into_iter().collect();
            let want = oracle_rules(&onto, inverse);
            edges += got.len();
            let unjustified: Vec<_> = got.difference(&want).take(2).map(|t| t.to_string()).collect();
            let missing: Vec<_> = want.difference(&got).take(2).map(|t| t.to_string()).collect();
            if !unjustified.is_empty() || !missing.is_empty() {
                failures.push(format!(
                    "seed {seed} inverse={inverse}: unjustified {unjustified:?}, missing {missing:?}"
                ));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(30) {
        failures.push(format!("took {elapsed:?}, limit 30s"));
    }
    Check::new(
        1,
        "projection rules match a brute-force rule oracle",
        failures,
        format!("50 ontologies x 2 settings, {edges} edges, {:.1}s", elapsed.as_secs_f64()),
    )
}

pub fn criterion_mapping_round_trip() -> Check {
    let mut failures = Vec::new();
    for seed in 0..50 {
        let onto = random_ontology(seed, 200);
        let triples = serialize_mapping(&onto);
        let back = reconstruct_axioms(&triples);
        let a: BTreeSet<&Axiom> = onto.axioms().iter().collect();
        let b: BTreeSet<&Axiom> = back.axioms().iter().collect();
        if a != b || onto.axioms().len() != back.axioms().len() {
            let lost: Vec<_> = a.difference(&b).take(1).collect();
            failures.push(format!("seed {seed}: axioms differ, e.g. {lost:?}"));
        }
        if !back.residue().is_empty() {
            failures.push(format!("seed {seed}: {} unrecognised triples", back.residue().len()));
        }
        if canonical_form(&triples) != canonical_form(&serialize_mapping(&back)) {
            failures.push(format!("seed {seed}: triples differ beyond blank-node labels"));
        }
    }
    Check::new(2, "mapping serialisation round trip", failures, "50 ontologies".into())
}

// ---------------------------------------------------------------------------
// criterion 3: Warshall

/// Reachability by Floyd-Warshall: `reach[i][j]` iff a path of length at
/// least one leads from `i` to `j`.
pub fn warshall(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut reach = vec![vec![false; n]; n];
    for &(a, b) in edges {
        reach[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    reach
}

pub struct RandomHierarchy {
    pub onto: Ontology,
    pub classes: Vec<Iri>,
    pub edges: Vec<(usize, usize)>,
    pub memberships: Vec<(Iri, usize)>,
}

/// Random subsumption digraph (cycles allowed) of at most 50 classes,
/// stated through plain, equivalence and intersection axioms, plus some
/// memberships.
pub fn random_hierarchy(seed: u64) -> RandomHierarchy {
    let mut rng = stream_rng(seed, 0x3a3);
    let n = rng.gen_range(1..=50);
    let classes: Vec<Iri> = (0..n).map(|i| ex(&format!("K{i}"))).collect();
    let mut onto = Ontology::new();
    let mut edges = Vec::new();
    let density = rng.gen_range(0.0..3.0 / n as f64);
    for a in 0..n {
        for b in 0..n {
            if a != b && rng.gen_bool(density.min(1.0)) {
                match rng.gen_range(0..6) {
                    0 => {
                        onto.add_axiom(Axiom::EquivalentClasses(
                            ClassExpr::Named(classes[a].clone()),
                            ClassExpr::Named(classes[b].clone()),
                        ));
                        edges.push((a, b));
                        edges.push((b, a));
                    }
                    1 => {
                        onto.add_axiom(Axiom::SubClassOf {
                            sub: ClassExpr::Named(classes[a].clone()),
                            sup: ClassExpr::Intersection(vec![
                                ClassExpr::Named(classes[b].clone()),
                                ClassExpr::some(ex("p"), ClassExpr::Named(classes[a].clone())),
                            ]),
                        });
                        edges.push((a, b));
                    }
                    _ => {
                        onto.add_axiom(Axiom::subclass(classes[a].clone(), classes[b].clone()));
                        edges.push((a, b));
                    }
                }
            }
        }
    }
    let mut memberships = Vec::new();
    for i in 0..rng.gen_range(0..10) {
        let ind = ex(&format!("x{i}"));
        let c = rng.gen_range(0..n);
        onto.add_axiom(Axiom::membership(classes[c].clone(), ind.clone()));
        memberships.push((ind, c));
    }
    RandomHierarchy {
        onto,
        classes,
        edges,
        memberships,
    }
}

pub fn criterion_reasoner_oracle() -> Check {
    let mut failures = Vec::new();
    for seed in 0..100 {
        let h = random_hierarchy(seed);
        let n = h.classes.len();
        let reach = warshall(n, &h.edges);
        let closure = classify(&h.onto);
        for i in 0..n {
            let want: BTreeSet<Iri> = (0..n).filter(|&j| j != i && reach[i][j]).map(|j| h.classes[j].clone()).collect();
            let got = closure.superclasses(&h.classes[i]).cloned().unwrap_or_default();
            if got != want {
                failures.push(format!("seed {seed}: superclasses of K{i} differ"));
                break;
            }
        }
        let mut want_types: BTreeMap<Iri, BTreeSet<Iri>> = BTreeMap::new();
        for (ind, c) in &h.memberships {
            let entry = want_types.entry(ind.clone()).or_default();
            entry.insert(h.classes[*c].clone());
            entry.extend((0..n).filter(|&j| reach[*c][j]).map(|j| h.classes[j].clone()));
        }
        for (ind, want) in &want_types {
            if closure.types_of(ind) != Some(want) {
                failures.push(format!("seed {seed}: types of {ind} differ"));
            }
        }
        let once = materialize(&h.onto, &closure);
        let twice = materialize(&once, &classify(&once));
        if once != twice {
            failures.push(format!("seed {seed}: materialize is not idempotent"));
        }
        if classify(&once) != closure {
            failures.push(format!("seed {seed}: materialising changed the closure"));
        }
    }
    Check::new(3, "reasoner closure matches Warshall", failures, "100 random digraphs".into())
}

// ---------------------------------------------------------------------------
// criterion 4: walker statistics

pub fn graph_of(triples: Vec<Triple>) -> ProjectedGraph {
    ProjectedGraph {
        strategy: Strategy::Rules,
        edges: triples,
        annotation_edges: Vec::new(),
        skipped: 0,
    }
}

/// `c` fans out to three objects (two through the same predicate), and the
/// first object fans out again to four.
pub fn branching_graph() -> ProjectedGraph {
    let t = |s: &str, p: &str, o: &str| Triple::new(ex(s), ex(p), ex(o));
    graph_of(vec![
        t("c", "r", "x1"),
        t("c", "r", "x2"),
        t("c", "s", "x3"),
        t("x1", "q", "y1"),
        t("x1", "q", "y2"),
        t("x1", "q", "y3"),
        t("x1", "u", "y4"),
    ])
}

pub fn criterion_walker_statistics() -> Check {
    let mut failures = Vec::new();
    let g = to_walk_graph(&branching_graph());
    let walks = 10_000;
    let cfg = WalkConfig {
        depth: 4,
        walks_per_entity: walks,
        max_kernel_size: 3,
        kind: WalkerKind::Random,
        seed: 11,
    };
    let out = generate_walks(&g, &[ex("c")], &cfg).unwrap();
    let mut first: BTreeMap<String, usize> = BTreeMap::new();
    let mut second: BTreeMap<String, usize> = BTreeMap::new();
    let mut through_x1 = 0usize;
    for w in &out {
        *first.entry(w.tokens[2].as_str().to_string()).or_default() += 1;
        if w.tokens[2].as_str() == ex("x1").as_str() {
            through_x1 += 1;
            *second.entry(w.tokens[4].as_str().to_string()).or_default() += 1;
        }
    }
    let mut worst: f64 = 0.0;
    for (counts, total, k) in [(&first, walks, 3usize), (&second, through_x1, 4)] {
        if counts.len() != k {
            failures.push(format!("expected {k} branches, saw {}", counts.len()));
        }
        for (tok, &c) in counts {
            let dev = (c as f64 / total as f64 - 1.0 / k as f64).abs();
            worst = worst.max(dev);
            if dev > 0.03 {
                failures.push(format!("{tok}: frequency off uniform by {dev:.4}"));
            }
        }
    }

    let wl_cfg = WalkConfig {
        kind: WalkerKind::Wl,
        walks_per_entity: 200,
        ..cfg.clone()
    };
    let plain = generate_walks(&g, &[ex("c"), ex("x1")], &WalkConfig { walks_per_entity: 200, ..cfg }).unwrap();
    let wl = generate_walks(&g, &[ex("c"), ex("x1")], &wl_cfg).unwrap();
    let size0: Vec<&Walk> = wl.iter().step_by(wl_cfg.max_kernel_size + 1).collect();
    if size0.len() != plain.len() || size0.iter().zip(&plain).any(|(a, b)| *a != b) {
        failures.push("size-0 kernel walks differ from plain walks".into());
    }
    let again = generate_walks(&to_walk_graph(&branching_graph()), &[ex("c"), ex("x1")], &wl_cfg).unwrap();
    let bytes = |ws: &[Walk]| -> Vec<String> {
        ws.iter()
            .map(|w| w.tokens.iter().map(Token::as_str).collect::<Vec<_>>().join(" "))
            .collect()
    };
    if bytes(&wl) != bytes(&again) {
        failures.push("WL walks not byte-identical across runs".into());
    }
    Check::new(
        4,
        "walker branch frequencies and WL stability",
        failures,
        format!("{walks} walks, max deviation {worst:.4} (limit 0.03)"),
    )
}

// ---------------------------------------------------------------------------
// criterion 5: corpus goldens

fn words(ws: &[&str]) -> Vec<String> {
    ws.iter().map(|w| w.to_string()).collect()
}

pub fn nutrient_walk() -> Walk {
    Walk {
        tokens: vec![
            Token::Iri(vc("FOOD-4001")),
            Token::Iri(vc("hasNutrient")),
            Token::Iri(vc("VitaminC_100")),
            Token::Iri(vc("amountNutrient")),
        ],
    }
}

fn has_walk(walks: &[Walk], want: &Walk) -> bool {
    walks.iter().any(|w| w == want)
}

pub fn criterion_corpus_goldens() -> Check {
    let mut failures = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            failures.push(name.to_string());
        }
    };
    let helis = fixture("helis_fragment.nt");
    let foodon = fixture("foodon_fragment.nt");
    let g = to_walk_graph(&project_rules(&helis, false));
    let start = [vc("FOOD-4001")];
    let walks = |depth: usize, kind: WalkerKind| {
        generate_walks(
            &g,
            &start,
            &WalkConfig {
                depth,
                walks_per_entity: 300,
                max_kernel_size: 2,
                kind,
                seed: 5,
            },
        )
        .unwrap()
    };

    // depth three (hops) through the nutrient
    let nutrient = nutrient_walk();
    check("nutrient walk", has_walk(&walks(3, WalkerKind::Random), &nutrient));

    // depth four up the class chain
    let chain = Walk {
        tokens: vec![
            Token::Iri(vc("FOOD-4001")),
            Token::Iri(iri(vocab::RDF_TYPE)),
            Token::Iri(vc("Beer")),
            Token::Iri(iri(vocab::RDFS_SUBCLASS_OF)),
            Token::Iri(vc("AlcoholicBeverages")),
        ],
    };
    check("class chain walk", has_walk(&walks(4, WalkerKind::Random), &chain));

    // the class chain with kernels in place of the non-start entities
    let wl = walks(4, WalkerKind::Wl);
    let kernel_walk = wl.iter().find(|w| {
        w.tokens.len() == 5
            && w.tokens[0] == chain.tokens[0]
            && w.tokens[1] == chain.tokens[1]
            && w.tokens[3] == chain.tokens[3]
            && matches!((&w.tokens[2], &w.tokens[4]), (Token::Kernel(_), Token::Kernel(_)))
    });
    check("kernel walk", kernel_walk.is_some());

    // Manchester sentence of the existential restriction
    let restriction_sentence = foodon
        .axioms()
        .iter()
        .map(|a| axiom_sentence(a).strings())
        .any(|s| {
            s == [
                obo("FOODON_00002809").as_str(),
                "subClassOf",
                obo("RO_0001000").as_str(),
                "some",
                obo("FOODON_03411347").as_str(),
            ]
        });
    check("axiom sentence", restriction_sentence);

    // the nutrient walk with IRIs replaced by words
    let s1 = Sentence::new(nutrient.tokens.clone(), Provenance::Walk);
    let lex = build_lexical(std::slice::from_ref(&s1), &helis);
    check(
        "label replacement",
        lex[0].strings() == words(&["blonde", "beer", "has", "nutrient", "vitamin", "c", "amount", "nutrient"]),
    );

    // kernels survive lexicalisation
    if let Some(w) = kernel_walk {
        let s3 = Sentence::new(w.tokens.clone(), Provenance::Walk);
        let l = build_lexical(&[s3], &helis)[0].strings();
        let ok = l.len() == 6
            && l[..3] == words(&["blonde", "beer", "type"])
            && l[3].starts_with("kernel_")
            && l[4] == "subclassof"
            && l[5].starts_with("kernel_");
        check("lexicalised kernel walk", ok);
    } else {
        check("lexicalised kernel walk (no kernel walk found)", false);
    }

    // definition annotation
    let ann = build_lexical(&[], &foodon);
    let definition = words(&[
        "edamame", "edamame", "is", "a", "preparation", "of", "immature", "soybean", "in", "their", "pods",
    ]);
    check(
        "annotation sentence",
        ann.iter()
            .any(|s| s.provenance == Provenance::Annotation && s.strings().starts_with(&definition)),
    );

    // combined sentences of the nutrient walk
    let first_combined = vec![
        vc("FOOD-4001").as_str().to_string(),
        "has".into(),
        "nutrient".into(),
        "vitamin".into(),
        "c".into(),
        "amount".into(),
        "nutrient".into(),
    ];
    let trav: Vec<Vec<String>> = build_combined(std::slice::from_ref(&s1), &helis, CombineStrategy::Traversal, 0)
        .iter()
        .map(Sentence::strings)
        .collect();
    let last = vec![
        "blonde".to_string(),
        "beer".into(),
        "has".into(),
        "nutrient".into(),
        "vitamin".into(),
        "c".into(),
        vc("amountNutrient").as_str().to_string(),
    ];
    check("traversal combination", trav.len() == 4 && trav[0] == first_combined && trav[3] == last);
    let mut kept_first = false;
    for seed in 0..32 {
        let r = build_combined(std::slice::from_ref(&s1), &helis, CombineStrategy::Random, seed);
        let s = r[0].strings();
        if !trav.contains(&s) {
            check("random combination outside the traversal set", false);
        }
        kept_first |= s == first_combined;
    }
    check("random combination", kept_first);

    Check::new(5, "corpus reproduces the reference sentences", failures, "9 reference sentences".into())
}

// ---------------------------------------------------------------------------
// criterion 6: gradients and loss trend

/// Largest relative error between analytic and central-difference
/// gradients of the SGNS loss, over every coordinate of the centre and
/// output vectors.
pub fn sgns_gradient_error(seed: u64, h: f64) -> f64 {
    let mut rng = stream_rng(seed, 3);
    let dim = 6;
    let vocab: Vec<Vec<f64>> = (0..5).map(|_| (0..dim).map(|_| rng.gen_range(-0.8..0.8)).collect()).collect();
    let outs: Vec<Vec<f64>> = (0..5).map(|_| (0..dim).map(|_| rng.gen_range(-0.8..0.8)).collect()).collect();
    // centre token 0, context token 1, negatives 3 and 4
    let center = vocab[0].clone();
    let rows = [1usize, 3, 4];
    let labels = [true, false, false];
    let mut outputs: Vec<f64> = rows.iter().flat_map(|&r| outs[r].clone()).collect();

    let mut gc = vec![0.0; dim];
    let mut go = vec![0.0; outputs.len()];
    loss_and_grad(&center, &outputs, &labels, &mut gc, &mut go);

    let loss = |c: &[f64], o: &[f64]| -> f64 {
        // direct formula: -log s(u.v+) - sum log s(-u.v-)
        let sig = |x: f64| 1.0 / (1.0 + (-x).exp());
        labels
            .iter()
            .enumerate()
            .map(|(k, &pos)| {
                let dot: f64 = c.iter().zip(&o[k * dim..(k + 1) * dim]).map(|(a, b)| a * b).sum();
                -(if pos { sig(dot) } else { sig(-dot) }).ln()
            })
            .sum()
    };
    let rel = |a: f64, n: f64| (a - n).abs() / (a.abs() + n.abs()).max(1e-8);
    let mut worst: f64 = 0.0;
    let mut c = center.clone();
    for i in 0..dim {
        let x = c[i];
        c[i] = x + h;
        let up = loss(&c, &outputs);
        c[i] = x - h;
        let down = loss(&c, &outputs);
        c[i] = x;
        worst = worst.max(rel(gc[i], (up - down) / (2.0 * h)));
    }
    for i in 0..outputs.len() {
        let x = outputs[i];
        outputs[i] = x + h;
        let up = loss(&center, &outputs);
        outputs[i] = x - h;
        let down = loss(&center, &outputs);
        outputs[i] = x;
        worst = worst.max(rel(go[i], (up - down) / (2.0 * h)));
    }
    worst
}

/// Sentences over a small vocabulary where tokens come in topical groups.
pub fn grouped_corpus(seed: u64, sentences: usize) -> Vec<Vec<String>> {
    let mut rng = stream_rng(seed, 4);
    (0..sentences)
        .map(|_| {
            let group = rng.gen_range(0..4);
            let len = rng.gen_range(3..8);
            (0..len)
                .map(|_| format!("g{group}w{}", rng.gen_range(0..5)))
                .collect()
        })
        .collect()
}

/// Window pairs of a corpus, counted the way the trainer would see them
/// with the full window.
pub fn pair_count(corpus: &[Vec<String>], window: usize) -> usize {
    corpus
        .iter()
        .map(|s| {
            (0..s.len())
                .map(|i| {
                    let lo = i.saturating_sub(window);
                    let hi = (i + window + 1).min(s.len());
                    hi - lo - 1
                })
                .sum::<usize>()
        })
        .sum()
}

/// Whether a least-squares line through the epoch losses slopes down and
/// the last epoch is below the first.
pub fn decreasing_trend(losses: &[f64]) -> bool {
    let n = losses.len() as f64;
    if losses.len() < 2 {
        return false;
    }
    let mx = (n - 1.0) / 2.0;
    let my = losses.iter().sum::<f64>() / n;
    let slope: f64 = losses
        .iter()
        .enumerate()
        .map(|(i, y)| (i as f64 - mx) * (y - my))
        .sum::<f64>();
    slope < 0.0 && losses.last() < losses.first()
}

pub fn criterion_sgns() -> Check {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        worst = worst.max(sgns_gradient_error(seed, 1e-3));
    }
    if worst >= 1e-4 {
        failures.push(format!("gradient relative error {worst:.2e}"));
    }
    let mut trends = 0;
    for seed in 0..5 {
        let corpus = grouped_corpus(seed, 60 + 20 * seed as usize);
        assert!(pair_count(&corpus, 5) >= 100);
        let cfg = TrainConfig {
            dim: 16,
            epochs: 8,
            seed,
            ..TrainConfig::default()
        };
        let model = train(&corpus, &cfg, None).unwrap();
        if decreasing_trend(&model.epoch_losses) {
            trends += 1;
        } else {
            failures.push(format!("seed {seed}: losses {:?}", model.epoch_losses));
        }
    }
    Check::new(
        6,
        "SGNS gradient check and loss trend",
        failures,
        format!("max relative error {worst:.2e} (limit 1e-4), {trends}/5 corpora decreasing"),
    )
}

// ---------------------------------------------------------------------------
// criterion 7: metrics

/// MRR and Hits@k computed from the definition.
pub fn hand_metrics(ranks: &[usize]) -> (f64, f64, f64, f64) {
    let n = ranks.len() as f64;
    let mut rr = 0.0;
    let (mut h1, mut h5, mut h10) = (0.0, 0.0, 0.0);
    for &r in ranks {
        rr += 1.0 / r as f64;
        if r == 1 {
            h1 += 1.0;
        }
        if r <= 5 {
            h5 += 1.0;
        }
        if r <= 10 {
            h10 += 1.0;
        }
    }
    (rr / n, h1 / n, h5 / n, h10 / n)
}

pub fn monotone(r: &EvalReport) -> bool {
    r.hits1 <= r.hits5 && r.hits5 <= r.hits10 && r.hits10 <= 1.0 && r.hits1 <= r.mrr && r.mrr <= 1.0
}

pub fn criterion_metrics(extra: &[EvalReport]) -> Check {
    let mut failures = Vec::new();
    let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
    let fixed: &[(&[usize], (f64, f64, f64, f64))] = &[
        (&[2, 4], (0.375, 0.0, 1.0, 1.0)),
        (&[1], (1.0, 1.0, 1.0, 1.0)),
        (&[1, 3, 6, 11], ((1.0 + 1.0 / 3.0 + 1.0 / 6.0 + 1.0 / 11.0) / 4.0, 0.25, 0.5, 0.75)),
    ];
    for (ranks, want) in fixed {
        let r = EvalReport::from_ranks(Task::Membership, ranks.to_vec(), 20);
        let got = (r.mrr, r.hits1, r.hits5, r.hits10);
        if !(close(got.0, want.0) && close(got.1, want.1) && close(got.2, want.2) && close(got.3, want.3)) {
            failures.push(format!("ranks {ranks:?}: got {got:?}, want {want:?}"));
        }
    }
    let mut rng = stream_rng(77, 0);
    let mut checked = 0;
    for _ in 0..200 {
        let n = rng.gen_range(1..40);
        let ranks: Vec<usize> = (0..n).map(|_| rng.gen_range(1..60)).collect();
        let r = EvalReport::from_ranks(Task::Subsumption, ranks.clone(), 60);
        let h = hand_metrics(&ranks);
        if !close(r.mrr, h.0) || !close(r.hits1, h.1) || !close(r.hits5, h.2) || !close(r.hits10, h.3) {
            failures.push(format!("ranks {ranks:?} disagree with hand arithmetic"));
        }
        if !monotone(&r) {
            failures.push(format!("ranks {ranks:?}: hits not monotone"));
        }
        checked += 1;
    }
    for r in extra {
        if !monotone(r) {
            failures.push(format!("pipeline report not monotone: {r:?}"));
        }
        checked += 1;
    }
    let h3 = random_ranking_mrr(3);
    if !close(h3, (1.0 + 0.5 + 1.0 / 3.0) / 3.0) {
        failures.push(format!("random MRR for 3 candidates {h3}"));
    }
    Check::new(7, "MRR / Hits@k arithmetic and monotonicity", failures, format!("{checked} reports"))
}

// ---------------------------------------------------------------------------
// criteria 8 and 9: synthetic end to end

pub const SEEDS: [u64; 3] = [1, 2, 3];

/// Writes the bundled synthetic ontology into `dir` and returns its path.
pub fn write_synth(dir: &Path) -> PathBuf {
    let path = dir.join("synth.nt");
    let onto = generate(&SynthConfig::default());
    let file = std::fs::File::create(&path).unwrap();
    write_ntriples(std::io::BufWriter::new(file), &serialize_mapping(&onto)).unwrap();
    path
}

pub fn synth_run(input: &Path, out: &Path, seed: u64, documents: Documents, features: FeatureMode) -> RunOutcome {
    let cfg = RunConfig {
        input: input.to_path_buf(),
        output_dir: out.to_path_buf(),
        seed,
        split_seed: seed,
        documents,
        features,
        ..RunConfig::default()
    };
    run_pipeline(&cfg).expect("pipeline runs")
}

pub struct EndToEnd {
    pub full: Vec<EvalReport>,
    pub structure_iri: Vec<EvalReport>,
    pub elapsed: Vec<Duration>,
}

pub fn end_to_end_runs() -> EndToEnd {
    let dir = tempfile::tempdir().unwrap();
    let input = write_synth(dir.path());
    let mut e = EndToEnd {
        full: Vec::new(),
        structure_iri: Vec::new(),
        elapsed: Vec::new(),
    };
    for seed in SEEDS {
        let t = Instant::now();
        let full = synth_run(&input, &dir.path().join(format!("sl-word-{seed}")), seed, Documents::Sl, FeatureMode::Word);
        e.elapsed.push(t.elapsed());
        e.full.push(full.report);
        let s = synth_run(&input, &dir.path().join(format!("s-iri-{seed}")), seed, Documents::S, FeatureMode::Iri);
        e.structure_iri.push(s.report);
    }
    e
}

pub fn criterion_end_to_end(e: &EndToEnd) -> Check {
    let mut failures = Vec::new();
    let mut parts = Vec::new();
    for (seed, r) in SEEDS.iter().zip(&e.full) {
        let floor = 3.0 * random_ranking_mrr(r.candidates);
        parts.push(format!("seed {seed}: {:.3} vs {:.3}", r.mrr, floor));
        if r.mrr < floor {
            failures.push(format!("seed {seed}: MRR {:.4} below 3x random {:.4}", r.mrr, floor));
        }
    }
    let slowest = e.elapsed.iter().max().copied().unwrap_or_default();
    if slowest > Duration::from_secs(300) {
        failures.push(format!("a run took {slowest:?}, limit 5 min"));
    }
    Check::new(
        8,
        "membership MRR at least 3x random on the synthetic ontology",
        failures,
        format!("{}; slowest run {:.1}s", parts.join(", "), slowest.as_secs_f64()),
    )
}

pub fn criterion_ablation(e: &EndToEnd) -> Check {
    let wins = e
        .full
        .iter()
        .zip(&e.structure_iri)
        .filter(|(a, b)| a.mrr > b.mrr)
        .count();
    let detail = e
        .full
        .iter()
        .zip(&e.structure_iri)
        .map(|(a, b)| format!("{:.3} vs {:.3}", a.mrr, b.mrr))
        .collect::<Vec<_>>()
        .join(", ");
    let failures = if wins >= 2 {
        Vec::new()
    } else {
        vec![format!("structure+lexical with word features won {wins}/3 ({detail})")]
    };
    Check::new(
        9,
        "lexical document beats structure-only IRI features",
        failures,
        format!("won {wins}/3: {detail}"),
    )
}

/// Runs the pipeline on a user-supplied ontology named by `ONTOVEC_HELIS`.
pub fn criterion_real_data() -> Check {
    let name = "real-data smoke run (optional)";
    let Ok(path) = std::env::var("ONTOVEC_HELIS") else {
        return Check {
            id: 10,
            name,
            outcome: Outcome::Skip("set ONTOVEC_HELIS to an N-Triples file to run".into()),
        };
    };
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        input: PathBuf::from(path),
        output_dir: dir.path().to_path_buf(),
        projection: Strategy::Mapping,
        ..RunConfig::default()
    };
    match run_pipeline(&cfg) {
        Ok(out) => {
            let failures = if out.report.mrr > 0.3 {
                Vec::new()
            } else {
                vec![format!("MRR {:.4} not above 0.3", out.report.mrr)]
            };
            Check::new(10, name, failures, format!("MRR {:.4}", out.report.mrr))
        }
        Err(e) => Check::new(10, name, vec![e.to_string()], String::new()),
    }
}
