use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ontovec::corpus::{read_sentences, write_sentences};
use ontovec::embedder::vectors::load_pretrained;
use ontovec::embedder::{train, EmbeddingModel};
use ontovec::ontology::serialize_mapping;
use ontovec::pipeline::{
    build_corpus, distance_report, embedding_ontology, format_distances, load_ontology, run_pipeline, start_entities,
    RunConfig,
};
use ontovec::predictor::{evaluate, fit, make_dataset, FeatureTable};
use ontovec::projection::{project, to_walk_graph, ProjectedGraph};
use ontovec::rdf::{read_ntriples, write_ntriples, Term};
use ontovec::reasoner::{classify, materialize};
use ontovec::synth::{generate, SynthConfig};
use ontovec::walker::generate_walks;
use ontovec::{Error, Result};

#[derive(Parser)]
#[command(name = "ontovec", version, about = "Embed OWL ontologies and predict memberships and subsumptions")]
struct Cli {
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

/// Stage settings. Each overrides the value from `--config`.
#[derive(Args, Default)]
struct Flags {
    /// Flat key=value settings file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// mapping, rules or rules+r
    #[arg(long)]
    projection: Option<String>,
    /// on or off
    #[arg(long)]
    reasoning: Option<String>,
    #[arg(long)]
    depth: Option<String>,
    #[arg(long)]
    walks_per_entity: Option<String>,
    #[arg(long)]
    wl_size: Option<String>,
    /// random or wl
    #[arg(long)]
    walker: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// s, sl, slrc or sltc
    #[arg(long)]
    documents: Option<String>,
    #[arg(long)]
    dim: Option<String>,
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    min_count: Option<String>,
    #[arg(long)]
    epochs: Option<String>,
    #[arg(long)]
    negatives: Option<String>,
    #[arg(long)]
    initial_lr: Option<String>,
    #[arg(long)]
    final_lr: Option<String>,
    #[arg(long)]
    subsample: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    /// Stop when the epoch loss improves by less than this fraction.
    #[arg(long)]
    early_stop: Option<String>,
    /// Vector file initialising word tokens.
    #[arg(long)]
    pretrained: Option<String>,
    /// membership or subsumption
    #[arg(long)]
    task: Option<String>,
    /// iri, word or concat
    #[arg(long)]
    features: Option<String>,
    /// lr or mlp
    #[arg(long)]
    classifier: Option<String>,
    #[arg(long)]
    split_seed: Option<String>,
}

impl Flags {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let pairs = [
            ("projection", &self.projection),
            ("reasoning", &self.reasoning),
            ("depth", &self.depth),
            ("walks_per_entity", &self.walks_per_entity),
            ("wl_size", &self.wl_size),
            ("walker", &self.walker),
            ("seed", &self.seed),
            ("documents", &self.documents),
            ("dim", &self.dim),
            ("window", &self.window),
            ("min_count", &self.min_count),
            ("epochs", &self.epochs),
            ("negatives", &self.negatives),
            ("initial_lr", &self.initial_lr),
            ("final_lr", &self.final_lr),
            ("subsample", &self.subsample),
            ("workers", &self.workers),
            ("early_stop", &self.early_stop),
            ("pretrained", &self.pretrained),
            ("task", &self.task),
            ("features", &self.features),
            ("classifier", &self.classifier),
            ("split_seed", &self.split_seed),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse an ontology and write it back as normalised N-Triples.
    Convert {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Project an ontology into a graph of entity-to-entity triples.
    Project {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Random walks over a projected graph, one walk per line.
    Walk {
        /// Projected graph (N-Triples).
        graph: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Project, walk and assemble the document corpus of an ontology.
    Corpus {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Train skip-gram vectors on a corpus file.
    Train {
        corpus: PathBuf,
        /// Writes PREFIX.input.vec and PREFIX.output.vec.
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Fit a classifier on a trained model and rank the test split.
    Evaluate {
        input: PathBuf,
        /// Model prefix given to `train`.
        #[arg(short, long)]
        model: PathBuf,
        /// Also write the report as key=value lines here.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        flags: Flags,
    },
    /// Every stage end to end, caching artifacts in the output directory.
    Pipeline {
        /// Ontology; may also come from `input=` in the config file.
        input: Option<PathBuf>,
        #[arg(short, long)]
        output_dir: Option<PathBuf>,
        #[command(flatten)]
        flags: Flags,
    },
    /// Generate the synthetic benchmark ontology.
    Synth {
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 6)]
        clusters: usize,
        #[arg(long, default_value_t = 10)]
        classes_per_cluster: usize,
        #[arg(long, default_value_t = 300)]
        instances: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Mean head-to-tail distances of positive and negative pairs.
    Distances {
        input: PathBuf,
        #[arg(short, long)]
        model: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
}

fn model_paths(prefix: &Path) -> (PathBuf, PathBuf) {
    let with = |ext: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(ext);
        PathBuf::from(s)
    };
    (with(".input.vec"), with(".output.vec"))
}

fn load_model(prefix: &Path) -> Result<EmbeddingModel> {
    let (a, b) = model_paths(prefix);
    EmbeddingModel::load(&a, &b)
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::File {
        path: path.to_path_buf(),
        source: e,
    })
}

fn tagged<T>(stage: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Stage { .. } => e,
        other => Error::Stage {
            stage,
            source: Box::new(other),
        },
    })
}

fn prepared(input: &Path, cfg: &RunConfig) -> Result<ontovec::ontology::Ontology> {
    let onto = tagged("parse", load_ontology(input))?;
    Ok(if cfg.reasoning {
        materialize(&onto, &classify(&onto))
    } else {
        onto
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Convert { input, output } => {
            let onto = tagged("parse", load_ontology(&input))?;
            tagged("convert", write_ntriples(create(&output)?, &serialize_mapping(&onto)).map_err(Error::from))?;
            eprintln!(
                "{} axioms, {} unrecognised triples",
                onto.axioms().len(),
                onto.residue().len()
            );
        }
        Command::Project { input, output, flags } => {
            let cfg = flags.resolve()?;
            let onto = prepared(&input, &cfg)?;
            let g = project(&onto, cfg.projection);
            tagged("project", write_ntriples(create(&output)?, &g.edges).map_err(Error::from))?;
            eprintln!("{} edges ({} axioms not projected)", g.edges.len(), g.skipped);
        }
        Command::Walk { graph, output, flags } => {
            let cfg = flags.resolve()?;
            let edges = tagged("parse", read_ntriples(std::io::BufReader::new(fs::File::open(&graph)?)))?;
            let starts: Vec<_> = edges
                .iter()
                .flat_map(|t| [&t.subject, &t.object])
                .filter_map(Term::as_iri)
                .cloned()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let pg = ProjectedGraph {
                strategy: cfg.projection,
                edges,
                annotation_edges: Vec::new(),
                skipped: 0,
            };
            let walks = tagged("walk", generate_walks(&to_walk_graph(&pg), &starts, &cfg.walk_config()))?;
            let lines: Vec<Vec<String>> = walks
                .iter()
                .map(|w| w.tokens.iter().map(|t| t.as_str().to_string()).collect())
                .collect();
            write_sentences(create(&output)?, &lines)?;
            eprintln!("{} walks", lines.len());
        }
        Command::Corpus { input, output, flags } => {
            let cfg = flags.resolve()?;
            let onto = prepared(&input, &cfg)?;
            let g = project(&onto, cfg.projection);
            let starts = start_entities(&onto, cfg.task);
            let corpus = tagged("corpus", build_corpus(&g, &onto, &starts, &cfg))?;
            let sentences = corpus.merge(cfg.documents);
            write_sentences(create(&output)?, &sentences)?;
            eprintln!(
                "{} sentences ({} structure, {} lexical, {} combined)",
                sentences.len(),
                corpus.structure.len(),
                corpus.lexical.len(),
                corpus.combined.len()
            );
        }
        Command::Train { corpus, output, flags } => {
            let cfg = flags.resolve()?;
            let sentences = tagged(
                "corpus",
                read_sentences(std::io::BufReader::new(fs::File::open(&corpus)?)),
            )?;
            let pre = match &cfg.pretrained {
                Some(p) => Some(tagged("train", load_pretrained(p))?),
                None => None,
            };
            let model = tagged("train", train(&sentences, &cfg.train_config(), pre.as_ref()))?;
            let (a, b) = model_paths(&output);
            model.save(&a, &b)?;
            eprintln!(
                "{} tokens, final epoch loss {:.4}",
                model.vocab.len(),
                model.epoch_losses.last().copied().unwrap_or(f64::NAN)
            );
        }
        Command::Evaluate {
            input,
            model,
            report,
            flags,
        } => {
            let cfg = flags.resolve()?;
            let onto = tagged("parse", load_ontology(&input))?;
            let ds = tagged("dataset", make_dataset(&onto, &classify(&onto), cfg.task, cfg.split_seed))?;
            let model = tagged("train", load_model(&model))?;
            let emb = embedding_ontology(&onto, &ds, cfg.reasoning);
            let entities: Vec<_> = onto.classes().iter().chain(onto.instances()).collect();
            let table = FeatureTable::build(&model, &emb, cfg.features, entities);
            let clf = tagged("evaluate", fit(&ds, &table, &cfg.classifier_config()))?;
            let r = evaluate(&clf, &table, &onto, &ds);
            print!("{}", r.table());
            if let Some(p) = report {
                fs::write(&p, r.to_kv()).map_err(|e| Error::File { path: p, source: e })?;
            }
        }
        Command::Pipeline {
            input,
            output_dir,
            flags,
        } => {
            let mut cfg = flags.resolve()?;
            if let Some(i) = input {
                cfg.input = i;
            }
            if let Some(o) = output_dir {
                cfg.output_dir = o;
            }
            if cfg.input.as_os_str().is_empty() {
                return Err(Error::Config("no input ontology given".into()));
            }
            let out = run_pipeline(&cfg)?;
            print!("{}", out.report.table());
            print!("{}", format_distances(&out.distances));
            for (stage, reused) in &out.stages {
                eprintln!("{stage:<8} {}", if *reused { "cached" } else { "computed" });
            }
        }
        Command::Synth {
            output,
            clusters,
            classes_per_cluster,
            instances,
            seed,
        } => {
            let onto = generate(&SynthConfig {
                clusters,
                classes_per_cluster,
                instances,
                seed,
            });
            write_ntriples(create(&output)?, &serialize_mapping(&onto))?;
            eprintln!(
                "{} classes, {} instances, {} axioms",
                onto.classes().len(),
                onto.instances().len(),
                onto.axioms().len()
            );
        }
        Command::Distances { input, model, flags } => {
            let cfg = flags.resolve()?;
            let onto = tagged("parse", load_ontology(&input))?;
            let ds = tagged("dataset", make_dataset(&onto, &classify(&onto), cfg.task, cfg.split_seed))?;
            let model = tagged("train", load_model(&model))?;
            let emb = embedding_ontology(&onto, &ds, cfg.reasoning);
            print!("{}", format_distances(&distance_report(&model, &emb, &ds)));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
