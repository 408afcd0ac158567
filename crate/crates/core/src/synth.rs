//! Synthetic benchmark ontology: clustered class hierarchies whose labels
//! share a per-cluster vocabulary, instances labelled with their class
//! word, and object links that stay inside a cluster.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::ontology::{Axiom, ClassExpr, EntityKind, Ontology};
use crate::rdf::{Iri, Literal};
use crate::vocab::{self, iri};
use crate::walker::stream_rng;

pub const NAMESPACE: &str = "http://example.org/synth#";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthConfig {
    pub clusters: usize,
    /// One root, a few mid-level classes, the rest leaves.
    pub classes_per_cluster: usize,
    pub instances: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            clusters: 6,
            classes_per_cluster: 10,
            instances: 300,
            seed: 7,
        }
    }
}

fn term(name: &str) -> Iri {
    iri(&format!("{NAMESPACE}{name}"))
}

/// Pronounceable, unique lowercase words.
struct Words<R> {
    rng: R,
    used: HashSet<String>,
}

impl<R: Rng> Words<R> {
    fn next(&mut self) -> String {
        const ONSETS: &[&str] = &["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "kl", "st", "tr"];
        const VOWELS: &[&str] = &["a", "e", "i", "o", "u", "ai", "ou"];
        loop {
            let syllables = self.rng.gen_range(2..=3);
            let mut w = String::new();
            for _ in 0..syllables {
                w.push_str(ONSETS[self.rng.gen_range(0..ONSETS.len())]);
                w.push_str(VOWELS[self.rng.gen_range(0..VOWELS.len())]);
            }
            if self.rng.gen_bool(0.5) {
                w.push_str(["n", "r", "s", "x"][self.rng.gen_range(0..4)]);
            }
            if self.used.insert(w.clone()) {
                return w;
            }
        }
    }
}

fn capitalised(w: &str) -> String {
    let mut c = w.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

struct Class {
    iri: Iri,
    word: String,
}

pub fn generate(cfg: &SynthConfig) -> Ontology {
    let mut rng = stream_rng(cfg.seed, 0);
    let mut words = Words {
        rng: stream_rng(cfg.seed, 1),
        used: HashSet::new(),
    };
    let mut onto = Ontology::new();
    let label = iri(vocab::RDFS_LABEL);
    let comment = iri(vocab::RDFS_COMMENT);
    let related = term("relatedTo");
    let has_part = term("hasPart");
    let weight = term("weight");
    onto.declare(related.clone(), EntityKind::ObjectProperty);
    onto.declare(has_part.clone(), EntityKind::ObjectProperty);
    onto.declare(weight.clone(), EntityKind::DataProperty);
    onto.add_annotation(related.clone(), label.clone(), Literal::plain("related to"));
    onto.add_annotation(has_part.clone(), label.clone(), Literal::plain("has part"));

    let per = cfg.classes_per_cluster.max(1);
    let mids = ((per - 1) / 3).max(if per > 1 { 1 } else { 0 });
    let mut clusters: Vec<Vec<Class>> = Vec::new();
    for c in 0..cfg.clusters {
        let cluster_word = words.next();
        let mut classes: Vec<Class> = Vec::new();
        for j in 0..per {
            let word = if j == 0 { cluster_word.clone() } else { words.next() };
            // every fifth non-root class is known only by a camel-case name
            let unlabelled = j > 0 && j % 5 == 4;
            let iri = if unlabelled {
                term(&format!("{}{}", capitalised(&word), capitalised(&cluster_word)))
            } else {
                term(&format!("K{c}_{j:02}"))
            };
            onto.declare(iri.clone(), EntityKind::Class);
            if !unlabelled {
                let text = if j == 0 {
                    cluster_word.clone()
                } else {
                    format!("{word} {cluster_word}")
                };
                onto.add_annotation(iri.clone(), label.clone(), Literal::lang(text, "en"));
            }
            onto.add_annotation(
                iri.clone(),
                comment.clone(),
                Literal::plain(format!("A {word} is a kind of {cluster_word}.")),
            );
            if j > 0 {
                let parent = if j <= mids { 0 } else { 1 + (j - mids - 1) % mids };
                onto.add_axiom(Axiom::subclass(iri.clone(), classes[parent].iri.clone()));
            }
            classes.push(Class { iri, word });
        }
        // leaves have parts drawn from another leaf of the same cluster
        let leaves: Vec<usize> = (mids + 1..per).collect();
        for &j in &leaves {
            if let Some(&other) = leaves.iter().filter(|&&o| o != j).collect::<Vec<_>>().choose(&mut rng) {
                onto.add_axiom(Axiom::SubClassOf {
                    sub: ClassExpr::Named(classes[j].iri.clone()),
                    sup: ClassExpr::some(has_part.clone(), ClassExpr::Named(classes[*other].iri.clone())),
                });
            }
        }
        clusters.push(classes);
    }

    let total_classes = cfg.clusters * per;
    let mut members: Vec<Vec<Iri>> = vec![Vec::new(); total_classes];
    for n in 0..cfg.instances {
        let k = n % total_classes.max(1);
        let (c, j) = (k / per, k % per);
        let class = &clusters[c][j];
        let ind = term(&format!("i{c}_{n:03}"));
        onto.declare(ind.clone(), EntityKind::Individual);
        onto.add_annotation(
            ind.clone(),
            label.clone(),
            Literal::lang(format!("{} {}", words.next(), class.word), "en"),
        );
        onto.add_axiom(Axiom::membership(class.iri.clone(), ind.clone()));
        onto.add_axiom(Axiom::DataAssertion {
            subject: ind.clone(),
            property: weight.clone(),
            value: Literal::typed(
                format!("{:.1}", rng.gen_range(1.0..500.0f64)),
                iri(&format!("{}double", vocab::XSD)),
            ),
        });
        members[k].push(ind);
    }

    // links: one to a classmate, one to a random member of the cluster
    for c in 0..cfg.clusters {
        let cluster_members: Vec<&Iri> = (0..per).flat_map(|j| &members[c * per + j]).collect();
        for j in 0..per {
            let mates = &members[c * per + j];
            for ind in mates {
                if let Some(m) = mates.iter().filter(|m| *m != ind).collect::<Vec<_>>().choose(&mut rng) {
                    onto.add_axiom(Axiom::ObjectAssertion {
                        subject: ind.clone(),
                        property: related.clone(),
                        object: (*m).clone(),
                    });
                }
                if let Some(m) = cluster_members.choose(&mut rng) {
                    if *m != ind {
                        onto.add_axiom(Axiom::ObjectAssertion {
                            subject: ind.clone(),
                            property: has_part.clone(),
                            object: (*m).clone(),
                        });
                    }
                }
            }
        }
    }
    onto
}
