//! End-to-end runs: ontology file in, ranking report out, with every stage
//! cached in the output directory.
//!
//! Each stage has a key hashed from its own settings and the key of the
//! stage before it (dataset, graph, corpus, model, report). A stage is
//! recomputed only when its key differs from the one recorded in
//! `stages.txt` or one of its artifacts is missing, so changing a flag
//! reruns that stage and everything downstream of it.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::hash::Hasher;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fnv::FnvHasher;
use log::info;

use crate::corpus::{read_sentences, write_sentences, Corpus, Documents};
use crate::embedder::vectors::{create, load_pretrained, open};
use crate::embedder::{train, EmbeddingModel, FeatureMode, TrainConfig};
use crate::error::{Error, Result};
use crate::ontology::{reconstruct_axioms, Ontology};
use crate::predictor::classifier::{ClassifierConfig, ClassifierKind};
use crate::predictor::{evaluate, fit, make_dataset, EvalReport, FeatureTable, Sample, SplitDataset, Task};
use crate::projection::{project, to_walk_graph, ProjectedGraph, Strategy};
use crate::rdf::{read_ntriples, write_ntriples, Iri};
use crate::reasoner::{classify, materialize};
use crate::walker::{generate_walks, WalkConfig, WalkerKind};

/// Every setting of a run. Saved next to the artifacts as flat
/// `key=value` lines.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub output_dir: PathBuf,
    pub projection: Strategy,
    pub reasoning: bool,
    pub walker: WalkerKind,
    pub depth: usize,
    pub walks_per_entity: usize,
    pub wl_size: usize,
    pub seed: u64,
    pub documents: Documents,
    pub dim: usize,
    pub window: usize,
    pub min_count: u64,
    pub epochs: usize,
    pub negatives: usize,
    pub initial_lr: f32,
    pub final_lr: f32,
    pub subsample: f64,
    pub workers: usize,
    pub early_stop: Option<f64>,
    pub pretrained: Option<PathBuf>,
    pub task: Task,
    pub features: FeatureMode,
    pub classifier: ClassifierKind,
    pub split_seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let walk = WalkConfig::default();
        let train = TrainConfig::default();
        RunConfig {
            input: PathBuf::new(),
            output_dir: PathBuf::from("out"),
            projection: Strategy::Rules,
            reasoning: false,
            walker: walk.kind,
            depth: walk.depth,
            walks_per_entity: walk.walks_per_entity,
            wl_size: walk.max_kernel_size,
            seed: 42,
            documents: Documents::Sl,
            dim: train.dim,
            window: train.window,
            min_count: train.min_count,
            epochs: train.epochs,
            negatives: train.negatives,
            initial_lr: train.initial_lr,
            final_lr: train.final_lr,
            subsample: train.subsample_threshold,
            workers: train.workers,
            early_stop: train.early_stop,
            pretrained: None,
            task: Task::Membership,
            features: FeatureMode::Word,
            classifier: ClassifierKind::Mlp,
            split_seed: 0,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("bad value {value:?} for {key}")))
}

fn on_off(key: &str, value: &str) -> Result<bool> {
    match value {
        "on" | "true" => Ok(true),
        "off" | "false" => Ok(false),
        _ => Err(Error::Config(format!("{key} must be on or off, got {value:?}"))),
    }
}

fn optional_path(value: &str) -> Option<PathBuf> {
    (!value.is_empty()).then(|| PathBuf::from(value))
}

impl RunConfig {
    /// Sets one setting by its file key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "input" => self.input = PathBuf::from(v),
            "output_dir" => self.output_dir = PathBuf::from(v),
            "projection" => self.projection = v.parse()?,
            "reasoning" => self.reasoning = on_off(key, v)?,
            "walker" => self.walker = v.parse()?,
            "depth" => self.depth = parse(key, v)?,
            "walks_per_entity" => self.walks_per_entity = parse(key, v)?,
            "wl_size" => self.wl_size = parse(key, v)?,
            "seed" => self.seed = parse(key, v)?,
            "documents" => self.documents = v.parse()?,
            "dim" => self.dim = parse(key, v)?,
            "window" => self.window = parse(key, v)?,
            "min_count" => self.min_count = parse(key, v)?,
            "epochs" => self.epochs = parse(key, v)?,
            "negatives" => self.negatives = parse(key, v)?,
            "initial_lr" => self.initial_lr = parse(key, v)?,
            "final_lr" => self.final_lr = parse(key, v)?,
            "subsample" => self.subsample = parse(key, v)?,
            "workers" => self.workers = parse(key, v)?,
            "early_stop" => {
                self.early_stop = if v.is_empty() { None } else { Some(parse(key, v)?) }
            }
            "pretrained" => self.pretrained = optional_path(v),
            "task" => self.task = v.parse()?,
            "features" => self.features = v.parse()?,
            "classifier" => self.classifier = v.parse()?,
            "split_seed" => self.split_seed = parse(key, v)?,
            other => return Err(Error::Config(format!("unknown setting {other:?}"))),
        }
        Ok(())
    }

    pub fn to_kv(&self) -> String {
        let opt_path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let pairs: Vec<(&str, String)> = vec![
            ("input", self.input.display().to_string()),
            ("output_dir", self.output_dir.display().to_string()),
            ("projection", self.projection.to_string()),
            ("reasoning", if self.reasoning { "on" } else { "off" }.to_string()),
            ("walker", self.walker.to_string()),
            ("depth", self.depth.to_string()),
            ("walks_per_entity", self.walks_per_entity.to_string()),
            ("wl_size", self.wl_size.to_string()),
            ("seed", self.seed.to_string()),
            ("documents", self.documents.to_string()),
            ("dim", self.dim.to_string()),
            ("window", self.window.to_string()),
            ("min_count", self.min_count.to_string()),
            ("epochs", self.epochs.to_string()),
            ("negatives", self.negatives.to_string()),
            ("initial_lr", self.initial_lr.to_string()),
            ("final_lr", self.final_lr.to_string()),
            ("subsample", self.subsample.to_string()),
            ("workers", self.workers.to_string()),
            ("early_stop", self.early_stop.map(|x| x.to_string()).unwrap_or_default()),
            ("pretrained", opt_path(&self.pretrained)),
            ("task", self.task.to_string()),
            ("features", self.features.to_string()),
            ("classifier", self.classifier.to_string()),
            ("split_seed", self.split_seed.to_string()),
        ];
        pairs.into_iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// Reads `key=value` lines over the defaults. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, format!("expected key=value, got {line:?}")))?;
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_kv(&fs::read_to_string(path).map_err(|e| Error::file(path, e))?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_kv()).map_err(|e| Error::file(path, e))
    }

    pub fn walk_config(&self) -> WalkConfig {
        WalkConfig {
            depth: self.depth,
            walks_per_entity: self.walks_per_entity,
            max_kernel_size: self.wl_size,
            kind: self.walker,
            seed: self.seed,
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            dim: self.dim,
            window: self.window,
            min_count: self.min_count,
            epochs: self.epochs,
            negatives: self.negatives,
            initial_lr: self.initial_lr,
            final_lr: self.final_lr,
            seed: self.seed,
            subsample_threshold: self.subsample,
            workers: self.workers,
            early_stop: self.early_stop,
        }
    }

    pub fn classifier_config(&self) -> ClassifierConfig {
        ClassifierConfig {
            kind: self.classifier,
            seed: self.seed,
            ..ClassifierConfig::default()
        }
    }
}

pub fn load_ontology(path: &Path) -> Result<Ontology> {
    let triples = read_ntriples(open(path)?)?;
    Ok(reconstruct_axioms(&triples))
}

/// Copy of `onto` without the held-out (validation and test) positives,
/// materialised when reasoning is on. This is what gets embedded.
pub fn embedding_ontology(onto: &Ontology, ds: &SplitDataset, reasoning: bool) -> Ontology {
    let held_out: std::collections::HashSet<_> = ds.held_out().map(|s| ds.task.axiom(&s.head, &s.tail)).collect();
    let reduced = onto.retain_axioms(|ax| !held_out.contains(ax));
    if reasoning {
        let closure = classify(&reduced);
        materialize(&reduced, &closure)
    } else {
        reduced
    }
}

/// Walk starts: every class, plus every instance for membership.
pub fn start_entities(onto: &Ontology, task: Task) -> Vec<Iri> {
    let mut starts: Vec<Iri> = onto.classes().iter().cloned().collect();
    if task == Task::Membership {
        starts.extend(onto.instances().iter().cloned());
    }
    starts
}

/// Walks the projected graph and assembles the documents.
pub fn build_corpus(graph: &ProjectedGraph, onto: &Ontology, starts: &[Iri], cfg: &RunConfig) -> Result<Corpus> {
    let wg = to_walk_graph(graph);
    let walks = generate_walks(&wg, starts, &cfg.walk_config()).map_err(|e| e.in_stage("walk"))?;
    info!("{} walks over {} vertices", walks.len(), wg.len());
    Ok(Corpus::build(walks, onto, cfg.documents, cfg.seed))
}

/// Every entity a query or training pair can mention.
fn feature_entities<'a>(onto: &'a Ontology, ds: &'a SplitDataset) -> impl Iterator<Item = &'a Iri> {
    let samples = ds
        .train
        .iter()
        .chain(&ds.valid)
        .chain(&ds.test)
        .chain(&ds.train_negatives)
        .chain(&ds.valid_negatives);
    samples
        .flat_map(|s: &Sample| [&s.head, &s.tail])
        .chain(onto.classes().iter())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistanceRow {
    pub mode: FeatureMode,
    pub positive: f64,
    pub negative: f64,
}

impl DistanceRow {
    /// Mean negative over mean positive distance; above one means related
    /// pairs sit closer together than corrupted ones.
    pub fn ratio(&self) -> f64 {
        self.negative / self.positive
    }
}

fn euclidean(a: &[f32], b: &[f32]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (*x as f64 - *y as f64).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Mean head-to-tail distance of positive and negative pairs, per
/// feature mode. Concat pairs are split and compared half against half.
pub fn distance_report(model: &EmbeddingModel, onto: &Ontology, ds: &SplitDataset) -> Vec<DistanceRow> {
    let positives: Vec<&Sample> = ds.train.iter().chain(&ds.valid).chain(&ds.test).collect();
    let negatives: Vec<&Sample> = ds.train_negatives.iter().chain(&ds.valid_negatives).collect();
    FeatureMode::ALL
        .iter()
        .map(|&mode| {
            let table = FeatureTable::build(model, onto, mode, feature_entities(onto, ds));
            let mean = |samples: &[&Sample]| {
                if samples.is_empty() {
                    return 0.0;
                }
                samples
                    .iter()
                    .map(|s| euclidean(table.get(&s.head), table.get(&s.tail)))
                    .sum::<f64>()
                    / samples.len() as f64
            };
            DistanceRow {
                mode,
                positive: mean(&positives),
                negative: mean(&negatives),
            }
        })
        .collect()
}

pub fn format_distances(rows: &[DistanceRow]) -> String {
    let mut out = String::from("features  positive  negative  ratio\n");
    for r in rows {
        // no vectors at all (e.g. word features without a lexical document)
        let ratio = if r.ratio().is_finite() {
            format!("{:.3}", r.ratio())
        } else {
            "n/a".to_string()
        };
        let _ = writeln!(
            out,
            "{:<8}  {:>8.4}  {:>8.4}  {:>5}",
            r.mode.to_string(),
            r.positive,
            r.negative,
            ratio
        );
    }
    out
}

pub const STAGES: [&str; 5] = ["dataset", "graph", "corpus", "model", "report"];

/// Chained stage keys for a config and the bytes of its input file (and
/// of the pre-trained vectors, if any).
pub fn stage_keys(cfg: &RunConfig, input: &[u8], pretrained: Option<&[u8]>) -> BTreeMap<&'static str, String> {
    fn chain(prev: u64, parts: &[String]) -> u64 {
        let mut h = FnvHasher::default();
        h.write_u64(prev);
        for p in parts {
            h.write(p.as_bytes());
            h.write_u8(0);
        }
        h.finish()
    }
    let mut h = FnvHasher::default();
    h.write(input);
    let dataset = chain(h.finish(), &[cfg.task.to_string(), cfg.split_seed.to_string()]);
    let graph = chain(dataset, &[cfg.projection.to_string(), cfg.reasoning.to_string()]);
    let corpus = chain(
        graph,
        &[
            cfg.walker.to_string(),
            cfg.depth.to_string(),
            cfg.walks_per_entity.to_string(),
            cfg.wl_size.to_string(),
            cfg.seed.to_string(),
            cfg.documents.to_string(),
        ],
    );
    let mut pre = FnvHasher::default();
    if let Some(bytes) = pretrained {
        pre.write(bytes);
    }
    let t = cfg.train_config();
    let model = chain(
        corpus,
        &[
            t.dim.to_string(),
            t.window.to_string(),
            t.min_count.to_string(),
            t.epochs.to_string(),
            t.negatives.to_string(),
            t.initial_lr.to_string(),
            t.final_lr.to_string(),
            t.subsample_threshold.to_string(),
            t.workers.to_string(),
            format!("{:?}", t.early_stop),
            format!("{:x}", pre.finish()),
        ],
    );
    let report = chain(model, &[cfg.features.to_string(), cfg.classifier.to_string()]);
    [dataset, graph, corpus, model, report]
        .into_iter()
        .zip(STAGES)
        .map(|(k, name)| (name, format!("{k:016x}")))
        .collect()
}

/// Artifact locations inside an output directory.
#[derive(Clone, Debug)]
pub struct Artifacts {
    pub dir: PathBuf,
}

impl Artifacts {
    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }
    pub fn dataset(&self) -> PathBuf {
        self.path("dataset.tsv")
    }
    pub fn graph(&self) -> PathBuf {
        self.path("graph.nt")
    }
    pub fn corpus(&self) -> PathBuf {
        self.path("corpus.txt")
    }
    pub fn model(&self) -> (PathBuf, PathBuf) {
        (self.path("model.input.vec"), self.path("model.output.vec"))
    }
    pub fn report(&self) -> PathBuf {
        self.path("report.kv")
    }
    pub fn stages(&self) -> PathBuf {
        self.path("stages.txt")
    }

    fn files(&self, stage: &str) -> Vec<PathBuf> {
        match stage {
            "dataset" => vec![self.dataset()],
            "graph" => vec![self.graph()],
            "corpus" => vec![self.corpus()],
            "model" => {
                let (a, b) = self.model();
                vec![a, b]
            }
            _ => vec![self.report()],
        }
    }

    fn recorded_keys(&self) -> BTreeMap<String, String> {
        fs::read_to_string(self.stages())
            .map(|text| {
                text.lines()
                    .filter_map(|l| l.split_once('='))
                    .map(|(k, v)| (k.to_string(), v.to_string()))
                    .collect()
            })
            .unwrap_or_default()
    }
}

/// What a run produced and which stages came from the cache.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub report: EvalReport,
    pub distances: Vec<DistanceRow>,
    /// `(stage, reused)` in pipeline order.
    pub stages: Vec<(&'static str, bool)>,
    pub artifacts: Artifacts,
}

impl RunOutcome {
    pub fn reused(&self, stage: &str) -> bool {
        self.stages.iter().any(|(s, hit)| *s == stage && *hit)
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::file(path, e))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::file(path, e))
}

/// Runs every stage, reusing cached artifacts whose keys still match.
pub fn run_pipeline(cfg: &RunConfig) -> Result<RunOutcome> {
    let art = Artifacts {
        dir: cfg.output_dir.clone(),
    };
    fs::create_dir_all(&art.dir).map_err(|e| Error::file(&art.dir, e))?;
    let input = read_file(&cfg.input).map_err(|e| e.in_stage("parse"))?;
    let pre_bytes = match &cfg.pretrained {
        Some(p) => Some(read_file(p).map_err(|e| e.in_stage("train"))?),
        None => None,
    };
    let keys = stage_keys(cfg, &input, pre_bytes.as_deref());
    let recorded = art.recorded_keys();
    let mut valid = true;
    let mut hits = Vec::new();
    for stage in STAGES {
        let hit = valid
            && recorded.get(stage) == Some(&keys[stage])
            && art.files(stage).iter().all(|p| p.exists());
        valid &= hit;
        hits.push((stage, hit));
    }
    let hit = |stage: &str| hits.iter().any(|(s, h)| *s == stage && *h);
    // invalidate before writing anything, so an interrupted run never
    // leaves a stale key next to a fresh artifact
    let _ = fs::remove_file(art.stages());

    let triples = read_ntriples(input.as_slice()).map_err(|e| e.in_stage("parse"))?;
    let onto = reconstruct_axioms(&triples);
    info!(
        "{} axioms, {} classes, {} instances",
        onto.axioms().len(),
        onto.classes().len(),
        onto.instances().len()
    );

    let ds = if hit("dataset") {
        SplitDataset::from_tsv(&fs::read_to_string(art.dataset()).map_err(|e| Error::file(art.dataset(), e))?)
            .map_err(|e| e.in_stage("dataset"))?
    } else {
        let closure = classify(&onto);
        let ds = make_dataset(&onto, &closure, cfg.task, cfg.split_seed).map_err(|e| e.in_stage("dataset"))?;
        write_file(&art.dataset(), ds.to_tsv())?;
        ds
    };
    let emb_onto = embedding_ontology(&onto, &ds, cfg.reasoning);

    let model = if hit("model") {
        let (a, b) = art.model();
        EmbeddingModel::load(&a, &b).map_err(|e| e.in_stage("train"))?
    } else {
        let sentences = if hit("corpus") {
            read_sentences(open(&art.corpus())?).map_err(|e| e.in_stage("corpus"))?
        } else {
            let graph = if hit("graph") {
                let edges = read_ntriples(open(&art.graph())?).map_err(|e| e.in_stage("project"))?;
                ProjectedGraph {
                    strategy: cfg.projection,
                    edges,
                    annotation_edges: Vec::new(),
                    skipped: 0,
                }
            } else {
                let g = project(&emb_onto, cfg.projection);
                if g.is_empty() {
                    return Err(Error::Config("projected graph has no edges".into()).in_stage("project"));
                }
                write_ntriples(create(&art.graph())?, &g.edges)?;
                g
            };
            let starts = start_entities(&emb_onto, cfg.task);
            let corpus = build_corpus(&graph, &emb_onto, &starts, cfg).map_err(|e| match e {
                Error::Stage { .. } => e,
                other => other.in_stage("corpus"),
            })?;
            let sentences = corpus.merge(cfg.documents);
            if sentences.is_empty() {
                return Err(Error::EmptyCorpus.in_stage("corpus"));
            }
            write_sentences(create(&art.corpus())?, &sentences)?;
            sentences
        };
        let pretrained = match &cfg.pretrained {
            Some(p) => Some(load_pretrained(p).map_err(|e| e.in_stage("train"))?),
            None => None,
        };
        let model = train(&sentences, &cfg.train_config(), pretrained.as_ref()).map_err(|e| e.in_stage("train"))?;
        let (a, b) = art.model();
        model.save(&a, &b)?;
        model
    };

    let report = if hit("report") {
        EvalReport::from_kv(&fs::read_to_string(art.report()).map_err(|e| Error::file(art.report(), e))?)
            .map_err(|e| e.in_stage("evaluate"))?
    } else {
        let table = FeatureTable::build(&model, &emb_onto, cfg.features, feature_entities(&onto, &ds));
        let clf = fit(&ds, &table, &cfg.classifier_config()).map_err(|e| e.in_stage("evaluate"))?;
        let report = evaluate(&clf, &table, &onto, &ds);
        write_file(&art.report(), report.to_kv())?;
        write_file(&art.path("report.txt"), report.table())?;
        report
    };

    let distances = distance_report(&model, &emb_onto, &ds);
    write_file(&art.path("distances.txt"), format_distances(&distances))?;
    cfg.save(&art.path("config.txt"))?;
    let stages_text: String = STAGES.iter().map(|s| format!("{s}={}\n", keys[s])).collect();
    write_file(&art.stages(), stages_text)?;
    for (stage, reused) in &hits {
        info!("{stage}: {}", if *reused { "cached" } else { "computed" });
    }
    Ok(RunOutcome {
        report,
        distances,
        stages: hits,
        artifacts: art,
    })
}
