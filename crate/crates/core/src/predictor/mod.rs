//! Membership and subsumption prediction: datasets with corrupted
//! negatives, candidate ranking and MRR / Hits@k.

pub mod classifier;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use log::warn;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

pub use classifier::{train_classifier, Classifier, ClassifierConfig, ClassifierKind};

use crate::embedder::{entity_vector, EmbeddingModel, FeatureMode};
use crate::error::{Error, Result};
use crate::ontology::{Axiom, Ontology};
use crate::rdf::Iri;
use crate::reasoner::Closure;
use crate::vocab;
use crate::walker::stream_rng;

/// Fewest declared axioms a task needs before it can be split.
pub const MIN_POSITIVES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Task {
    /// Instance `rdf:type` class.
    Membership,
    /// Class `rdfs:subClassOf` class.
    Subsumption,
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "membership" => Ok(Task::Membership),
            "subsumption" => Ok(Task::Subsumption),
            other => Err(Error::Config(format!(
                "unknown task {other:?} (expected membership or subsumption)"
            ))),
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Membership => "membership",
            Task::Subsumption => "subsumption",
        })
    }
}

impl Task {
    /// The declared axiom stating `head` relates to `tail`.
    pub fn axiom(self, head: &Iri, tail: &Iri) -> Axiom {
        match self {
            Task::Membership => Axiom::membership(tail.clone(), head.clone()),
            Task::Subsumption => Axiom::subclass(head.clone(), tail.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sample {
    pub head: Iri,
    pub tail: Iri,
    pub positive: bool,
}

impl Sample {
    pub fn positive(head: Iri, tail: Iri) -> Self {
        Sample {
            head,
            tail,
            positive: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitDataset {
    pub task: Task,
    pub seed: u64,
    pub train: Vec<Sample>,
    pub valid: Vec<Sample>,
    pub test: Vec<Sample>,
    /// One corrupted sample per training positive (fewer when a positive
    /// admits no corruption).
    pub train_negatives: Vec<Sample>,
    pub valid_negatives: Vec<Sample>,
}

impl SplitDataset {
    /// Positives of the validation and test splits, which must not be seen
    /// while embedding.
    pub fn held_out(&self) -> impl Iterator<Item = &Sample> {
        self.valid.iter().chain(&self.test)
    }

    /// Tab-separated `split head tail label` lines.
    pub fn to_tsv(&self) -> String {
        let mut out = format!("# task={} seed={}\n", self.task, self.seed);
        let parts: [(&str, &[Sample]); 5] = [
            ("train", &self.train),
            ("valid", &self.valid),
            ("test", &self.test),
            ("train", &self.train_negatives),
            ("valid", &self.valid_negatives),
        ];
        for (split, samples) in parts {
            for s in samples {
                out.push_str(&format!(
                    "{split}\t{}\t{}\t{}\n",
                    s.head,
                    s.tail,
                    if s.positive { 1 } else { 0 }
                ));
            }
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut ds = SplitDataset {
            task: Task::Membership,
            seed: 0,
            train: vec![],
            valid: vec![],
            test: vec![],
            train_negatives: vec![],
            valid_negatives: vec![],
        };
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if let Some(header) = line.strip_prefix("# ") {
                for kv in header.split_whitespace() {
                    match kv.split_once('=') {
                        Some(("task", v)) => ds.task = v.parse()?,
                        Some(("seed", v)) => {
                            ds.seed = v
                                .parse()
                                .map_err(|_| Error::parse(line_no, format!("bad seed {v:?}")))?
                        }
                        _ => {}
                    }
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 4 {
                return Err(Error::parse(line_no, "expected 4 tab-separated fields"));
            }
            let sample = Sample {
                head: Iri::new(f[1])?,
                tail: Iri::new(f[2])?,
                positive: f[3] == "1",
            };
            let bucket = match (f[0], sample.positive) {
                ("train", true) => &mut ds.train,
                ("valid", true) => &mut ds.valid,
                ("test", true) => &mut ds.test,
                ("train", false) => &mut ds.train_negatives,
                ("valid", false) => &mut ds.valid_negatives,
                _ => return Err(Error::parse(line_no, format!("unknown split {:?}", f[0]))),
            };
            bucket.push(sample);
        }
        Ok(ds)
    }
}

/// Declared axioms of the task with named head and tail, deduplicated, in
/// axiom order. `owl:Thing` tails and reflexive subsumptions are left out.
pub fn positives(onto: &Ontology, task: Task) -> Vec<Sample> {
    let thing = vocab::iri(vocab::OWL_THING);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for ax in onto.axioms() {
        let pair = match task {
            Task::Membership => ax.as_named_membership(),
            Task::Subsumption => ax.as_named_subsumption().filter(|(a, b)| a != b),
        };
        if let Some((h, t)) = pair {
            if *t != thing && seen.insert((h.clone(), t.clone())) {
                out.push(Sample::positive(h.clone(), t.clone()));
            }
        }
    }
    out
}

/// Candidate tails for a head: every named class except `owl:Thing`, and
/// except the head itself for subsumption. Sorted.
pub fn candidates(onto: &Ontology, task: Task, head: &Iri) -> Vec<Iri> {
    let thing = vocab::iri(vocab::OWL_THING);
    onto.classes()
        .iter()
        .filter(|c| **c != thing && !(task == Task::Subsumption && *c == head))
        .cloned()
        .collect()
}

/// A negative for `positive` drawn uniformly from the candidates that are
/// neither the true tail nor entailed for the head. `None` when no such
/// class exists.
pub fn corrupt_tail<R: Rng>(
    positive: &Sample,
    pool: &[Iri],
    closure: &Closure,
    task: Task,
    rng: &mut R,
) -> Option<Sample> {
    let valid: Vec<&Iri> = pool
        .iter()
        .filter(|c| {
            **c != positive.tail
                && !(task == Task::Subsumption && **c == positive.head)
                && !closure.is_entailed(&positive.head, c, task)
        })
        .collect();
    if valid.is_empty() {
        warn!(
            "no corruption available for ({}, {})",
            positive.head, positive.tail
        );
        return None;
    }
    let tail = valid[rng.gen_range(0..valid.len())].clone();
    Some(Sample {
        head: positive.head.clone(),
        tail,
        positive: false,
    })
}

/// Shuffles the declared positives with `seed`, splits them 70/10/20 and
/// draws one negative per training and validation positive.
pub fn make_dataset(onto: &Ontology, closure: &Closure, task: Task, seed: u64) -> Result<SplitDataset> {
    let mut pos = positives(onto, task);
    if pos.len() < MIN_POSITIVES {
        return Err(Error::TooFewPositives {
            task: task.to_string(),
            found: pos.len(),
            required: MIN_POSITIVES,
        });
    }
    let mut rng = stream_rng(seed, 0x5911);
    pos.shuffle(&mut rng);
    let n = pos.len();
    let n_train = (0.7 * n as f64).round() as usize;
    let n_valid = (0.1 * n as f64).round() as usize;
    let test = pos.split_off(n_train + n_valid);
    let valid = pos.split_off(n_train);
    let train = pos;

    let pool = candidates(onto, Task::Membership, &vocab::iri(vocab::OWL_THING));
    let mut negatives = |samples: &[Sample]| -> Vec<Sample> {
        samples
            .iter()
            .filter_map(|s| corrupt_tail(s, &pool, closure, task, &mut rng))
            .collect()
    };
    let train_negatives = negatives(&train);
    let valid_negatives = negatives(&valid);
    Ok(SplitDataset {
        task,
        seed,
        train,
        valid,
        test,
        train_negatives,
        valid_negatives,
    })
}

/// Entity vectors under one feature mode. Entities without a vector (an
/// IRI that never made it into the corpus) map to zeros.
#[derive(Clone, Debug)]
pub struct FeatureTable {
    pub mode: FeatureMode,
    pub width: usize,
    vectors: HashMap<Iri, Vec<f32>>,
    zeros: Vec<f32>,
}

impl FeatureTable {
    pub fn build<'a>(
        model: &EmbeddingModel,
        onto: &Ontology,
        mode: FeatureMode,
        entities: impl IntoIterator<Item = &'a Iri>,
    ) -> Self {
        let width = mode.width(model.dim);
        let mut vectors = HashMap::new();
        let mut missing = 0usize;
        for e in entities {
            if vectors.contains_key(e) {
                continue;
            }
            match entity_vector(model, onto, e, mode) {
                Ok(v) => {
                    vectors.insert(e.clone(), v);
                }
                Err(_) => missing += 1,
            }
        }
        if missing > 0 {
            warn!("{missing} entities have no {mode} vector; using zeros");
        }
        FeatureTable {
            mode,
            width,
            vectors,
            zeros: vec![0.0; width],
        }
    }

    pub fn get(&self, e: &Iri) -> &[f32] {
        self.vectors.get(e).map_or(&self.zeros, Vec::as_slice)
    }

    /// Classifier input `[head || tail]`.
    pub fn pair(&self, head: &Iri, tail: &Iri) -> Vec<f32> {
        let mut x = Vec::with_capacity(2 * self.width);
        x.extend_from_slice(self.get(head));
        x.extend_from_slice(self.get(tail));
        x
    }
}

/// Fits a classifier on the dataset's training positives and negatives,
/// using the validation samples for epoch selection.
pub fn fit(ds: &SplitDataset, features: &FeatureTable, cfg: &ClassifierConfig) -> Result<Classifier> {
    let xy = |pos: &[Sample], neg: &[Sample]| -> (Vec<Vec<f32>>, Vec<bool>) {
        pos.iter()
            .chain(neg)
            .map(|s| (features.pair(&s.head, &s.tail), s.positive))
            .unzip()
    };
    let (tx, ty) = xy(&ds.train, &ds.train_negatives);
    let (vx, vy) = xy(&ds.valid, &ds.valid_negatives);
    train_classifier(&tx, &ty, &vx, &vy, cfg)
}

/// Candidates by descending score, ties by IRI.
pub fn rank_candidates(
    clf: &Classifier,
    features: &FeatureTable,
    head: &Iri,
    candidates: &[Iri],
) -> Vec<(Iri, f64)> {
    let mut scored: Vec<(Iri, f64)> = candidates
        .iter()
        .map(|c| (c.clone(), clf.score(&features.pair(head, c))))
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    scored
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub task: Task,
    pub mrr: f64,
    pub hits1: f64,
    pub hits5: f64,
    pub hits10: f64,
    /// 1-based rank of the true tail, per test query.
    pub ranks: Vec<usize>,
    /// Size of the largest candidate pool.
    pub candidates: usize,
}

impl EvalReport {
    pub fn from_ranks(task: Task, ranks: Vec<usize>, candidates: usize) -> Self {
        let n = ranks.len().max(1) as f64;
        let hits = |k: usize| ranks.iter().filter(|&&r| r <= k).count() as f64 / n;
        EvalReport {
            task,
            mrr: ranks.iter().map(|&r| 1.0 / r as f64).sum::<f64>() / n,
            hits1: hits(1),
            hits5: hits(5),
            hits10: hits(10),
            candidates,
            ranks,
        }
    }

    pub fn queries(&self) -> usize {
        self.ranks.len()
    }

    /// `metric=value` per line.
    pub fn to_kv(&self) -> String {
        let ranks: Vec<String> = self.ranks.iter().map(usize::to_string).collect();
        format!(
            "task={}\nqueries={}\ncandidates={}\nmrr={}\nhits@1={}\nhits@5={}\nhits@10={}\nranks={}\n",
            self.task,
            self.queries(),
            self.candidates,
            self.mrr,
            self.hits1,
            self.hits5,
            self.hits10,
            ranks.join(",")
        )
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let mut task = None;
        let mut candidates = None;
        let mut ranks = None;
        for (i, line) in text.lines().enumerate() {
            let Some((k, v)) = line.split_once('=') else {
                continue;
            };
            let bad = || Error::parse(i + 1, format!("bad value for {k}: {v:?}"));
            match k {
                "task" => task = Some(v.parse::<Task>()?),
                "candidates" => candidates = Some(v.parse::<usize>().map_err(|_| bad())?),
                "ranks" => {
                    ranks = Some(
                        v.split(',')
                            .filter(|s| !s.is_empty())
                            .map(|s| s.parse::<usize>().map_err(|_| bad()))
                            .collect::<Result<Vec<_>>>()?,
                    )
                }
                _ => {}
            }
        }
        match (task, candidates, ranks) {
            (Some(t), Some(c), Some(r)) => Ok(EvalReport::from_ranks(t, r, c)),
            _ => Err(Error::parse(0, "report lacks task, candidates or ranks")),
        }
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{} prediction: {} queries, {} candidates\n",
            self.task,
            self.queries(),
            self.candidates
        ));
        out.push_str("  metric    value\n");
        for (name, v) in [
            ("MRR", self.mrr),
            ("Hits@1", self.hits1),
            ("Hits@5", self.hits5),
            ("Hits@10", self.hits10),
        ] {
            out.push_str(&format!("  {name:<8}  {v:.4}\n"));
        }
        out.push_str(&format!(
            "  random baseline MRR {:.4}\n",
            random_ranking_mrr(self.candidates)
        ));
        out
    }
}

/// Ranks the full candidate pool for every test positive.
pub fn evaluate(clf: &Classifier, features: &FeatureTable, onto: &Ontology, ds: &SplitDataset) -> EvalReport {
    let results: Vec<(usize, usize)> = ds
        .test
        .par_iter()
        .map(|s| {
            let pool = candidates(onto, ds.task, &s.head);
            let ranked = rank_candidates(clf, features, &s.head, &pool);
            let rank = ranked
                .iter()
                .position(|(c, _)| *c == s.tail)
                .map_or(pool.len() + 1, |p| p + 1);
            (rank, pool.len())
        })
        .collect();
    let pool = results.iter().map(|r| r.1).max().unwrap_or(0);
    EvalReport::from_ranks(ds.task, results.into_iter().map(|r| r.0).collect(), pool)
}

/// Expected MRR of a uniformly random ranking of `n` candidates with one
/// correct answer: `H_n / n`.
pub fn random_ranking_mrr(n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (1..=n).map(|k| 1.0 / k as f64).sum::<f64>() / n as f64
}
