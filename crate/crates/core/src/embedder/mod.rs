//! Skip-gram with negative sampling over the merged corpus, and entity
//! vectors built from the learned token vectors.

pub mod sgns;
pub mod vectors;

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use log::debug;
use rand::seq::SliceRandom;
use rand::Rng;

pub use vectors::{load_pretrained, read_vectors, write_vectors, Pretrained};

use crate::error::{Error, Result};
use crate::lexical::{is_word_token, lexical_tokens};
use crate::ontology::Ontology;
use crate::rdf::Iri;
use crate::walker::stream_rng;

/// Token table ordered by descending frequency, ties broken
/// lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocab {
    tokens: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, u32>,
}

impl Vocab {
    fn from_ordered(tokens: Vec<String>, counts: Vec<u64>) -> Self {
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Vocab {
            tokens,
            counts,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: u32) -> &str {
        &self.tokens[id as usize]
    }

    pub fn count(&self, token: &str) -> Option<u64> {
        self.get(token).map(|i| self.counts[i as usize])
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }
}

pub fn build_vocab(sentences: &[Vec<String>], min_count: u64) -> Result<Vocab> {
    let mut freq: HashMap<&str, u64> = HashMap::new();
    for s in sentences {
        for t in s {
            *freq.entry(t.as_str()).or_default() += 1;
        }
    }
    let mut rows: Vec<(&str, u64)> = freq.into_iter().filter(|&(_, c)| c >= min_count).collect();
    if rows.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let (tokens, counts) = rows.into_iter().map(|(t, c)| (t.to_string(), c)).unzip();
    Ok(Vocab::from_ordered(tokens, counts))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub dim: usize,
    pub window: usize,
    pub min_count: u64,
    pub epochs: usize,
    pub negatives: usize,
    pub initial_lr: f32,
    pub final_lr: f32,
    pub seed: u64,
    /// Frequent-token down-sampling threshold; 0 disables it.
    pub subsample_threshold: f64,
    /// 1 is deterministic; more workers update the shared matrices without
    /// locks.
    pub workers: usize,
    /// Stop once an epoch improves the mean loss by less than this fraction.
    pub early_stop: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 100,
            window: 5,
            min_count: 1,
            epochs: 10,
            negatives: 5,
            initial_lr: 0.025,
            final_lr: 0.0001,
            seed: 42,
            subsample_threshold: 0.0,
            workers: 1,
            early_stop: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.dim == 0 {
            return bad("dim must be positive");
        }
        if self.window == 0 {
            return bad("window must be positive");
        }
        if self.min_count == 0 {
            return bad("min_count must be positive");
        }
        if self.negatives == 0 {
            return bad("negatives must be positive");
        }
        if !(self.final_lr > 0.0 && self.final_lr < self.initial_lr) {
            return bad("learning rates must satisfy 0 < final_lr < initial_lr");
        }
        if self.subsample_threshold < 0.0 {
            return bad("subsample threshold must be non-negative");
        }
        if self.workers == 0 {
            return bad("workers must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingModel {
    pub vocab: Vocab,
    pub dim: usize,
    /// Row-major `|vocab| x dim` center vectors.
    pub input: Vec<f32>,
    /// Row-major `|vocab| x dim` context vectors.
    pub output: Vec<f32>,
    pub config: TrainConfig,
    /// Mean loss per training pair, one entry per epoch run.
    pub epoch_losses: Vec<f64>,
}

impl EmbeddingModel {
    pub fn vector(&self, token: &str) -> Option<&[f32]> {
        self.vocab.get(token).map(|i| self.row(i))
    }

    pub fn row(&self, id: u32) -> &[f32] {
        let i = id as usize * self.dim;
        &self.input[i..i + self.dim]
    }

    pub fn output_row(&self, id: u32) -> &[f32] {
        let i = id as usize * self.dim;
        &self.output[i..i + self.dim]
    }

    /// Model probability that `context` appears around `center`:
    /// `sigmoid(input[center] . output[context])`.
    pub fn context_score(&self, center: &str, context: &str) -> Option<f32> {
        let c = self.vector(center)?;
        let o = self.output_row(self.vocab.get(context)?);
        Some(sgns::sigmoid(c.iter().zip(o).map(|(x, y)| x * y).sum()))
    }

    pub fn cosine(&self, a: &str, b: &str) -> Option<f32> {
        Some(cosine(self.vector(a)?, self.vector(b)?))
    }

    /// Writes the input and output matrices as two vector files.
    pub fn save(&self, input_path: &Path, output_path: &Path) -> Result<()> {
        for (path, m) in [(input_path, &self.input), (output_path, &self.output)] {
            let rows = self
                .vocab
                .tokens
                .iter()
                .enumerate()
                .map(|(i, t)| (t.as_str(), &m[i * self.dim..(i + 1) * self.dim]));
            write_vectors(vectors::create(path)?, self.dim, rows).map_err(|e| Error::file(path, e))?;
        }
        Ok(())
    }

    pub fn load(input_path: &Path, output_path: &Path) -> Result<Self> {
        let (dim, rows) = read_vectors(vectors::open(input_path)?)?;
        let (out_dim, out_rows) = read_vectors(vectors::open(output_path)?)?;
        if out_dim != dim || out_rows.len() != rows.len() {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: out_dim,
            });
        }
        let mut tokens = Vec::with_capacity(rows.len());
        let mut input = Vec::with_capacity(rows.len() * dim);
        for (t, v) in rows {
            tokens.push(t);
            input.extend(v);
        }
        let mut output = Vec::with_capacity(input.len());
        for ((t, v), expected) in out_rows.into_iter().zip(&tokens) {
            if &t != expected {
                return Err(Error::Config(format!(
                    "{}: token {t:?} where {expected:?} was expected",
                    output_path.display()
                )));
            }
            output.extend(v);
        }
        let counts = vec![0; tokens.len()];
        Ok(EmbeddingModel {
            vocab: Vocab::from_ordered(tokens, counts),
            dim,
            input,
            output,
            config: TrainConfig {
                dim,
                ..TrainConfig::default()
            },
            epoch_losses: Vec::new(),
        })
    }
}

pub fn cosine(a: &[f32], b: &[f32]) -> f32 {
    let dot: f32 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f32 = a.iter().map(|x| x * x).sum::<f32>().sqrt();
    let nb: f32 = b.iter().map(|x| x * x).sum::<f32>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Cumulative unigram^0.75 weights for negative draws.
struct NegativeTable {
    cumulative: Vec<f64>,
}

impl NegativeTable {
    fn new(counts: &[u64]) -> Self {
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(0.75);
                acc
            })
            .collect();
        NegativeTable { cumulative }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> u32 {
        let total = *self.cumulative.last().unwrap_or(&0.0);
        let x = rng.gen::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= x);
        i.min(self.cumulative.len() - 1) as u32
    }
}

fn load_row(m: &[AtomicU32], row: u32, dim: usize, buf: &mut [f32]) {
    let base = row as usize * dim;
    for (b, a) in buf.iter_mut().zip(&m[base..base + dim]) {
        *b = f32::from_bits(a.load(Ordering::Relaxed));
    }
}

/// `m[row] -= lr * grad`. Concurrent writers may interleave; lost updates
/// are tolerated as in lock-free SGD.
fn descend(m: &[AtomicU32], row: u32, dim: usize, grad: &[f32], lr: f32) {
    let base = row as usize * dim;
    for (a, g) in m[base..base + dim].iter().zip(grad) {
        let v = f32::from_bits(a.load(Ordering::Relaxed)) - lr * g;
        a.store(v.to_bits(), Ordering::Relaxed);
    }
}

struct Trainer<'a> {
    cfg: &'a TrainConfig,
    input: Vec<AtomicU32>,
    output: Vec<AtomicU32>,
    negatives: NegativeTable,
    /// Keep probability per token under down-sampling.
    keep: Option<Vec<f64>>,
    processed: AtomicU64,
    total_work: u64,
}

struct EpochStats {
    loss: f64,
    pairs: u64,
}

impl Trainer<'_> {
    fn lr(&self) -> f32 {
        let done = self.processed.load(Ordering::Relaxed) as f64 / self.total_work.max(1) as f64;
        let span = self.cfg.initial_lr - self.cfg.final_lr;
        (self.cfg.initial_lr - span * done.min(1.0) as f32).max(self.cfg.final_lr)
    }

    fn run_chunk(&self, sentences: &[&Vec<u32>], epoch: usize, worker: usize) -> Result<EpochStats> {
        let dim = self.cfg.dim;
        let k = self.cfg.negatives;
        let mut rng = stream_rng(self.cfg.seed, ((epoch as u64 + 1) << 20) | worker as u64);
        let mut center = vec![0.0f32; dim];
        let mut outputs = vec![0.0f32; (k + 1) * dim];
        let mut grad_center = vec![0.0f32; dim];
        let mut grad_outputs = vec![0.0f32; (k + 1) * dim];
        let mut targets: Vec<u32> = Vec::with_capacity(k + 1);
        let mut labels: Vec<bool> = Vec::with_capacity(k + 1);
        let mut words: Vec<u32> = Vec::new();
        let mut stats = EpochStats { loss: 0.0, pairs: 0 };

        for sentence in sentences {
            words.clear();
            match &self.keep {
                Some(keep) => words.extend(
                    sentence
                        .iter()
                        .copied()
                        .filter(|&w| rng.gen::<f64>() < keep[w as usize]),
                ),
                None => words.extend_from_slice(sentence),
            }
            let lr = self.lr();
            for i in 0..words.len() {
                let reach = self.cfg.window - rng.gen_range(0..self.cfg.window);
                let lo = i.saturating_sub(reach);
                let hi = (i + reach).min(words.len() - 1);
                for j in lo..=hi {
                    if j == i {
                        continue;
                    }
                    let (c, ctx) = (words[i], words[j]);
                    targets.clear();
                    labels.clear();
                    targets.push(ctx);
                    labels.push(true);
                    for _ in 0..k {
                        let n = self.negatives.draw(&mut rng);
                        if n != ctx {
                            targets.push(n);
                            labels.push(false);
                        }
                    }
                    load_row(&self.input, c, dim, &mut center);
                    for (t, &row) in targets.iter().enumerate() {
                        load_row(&self.output, row, dim, &mut outputs[t * dim..(t + 1) * dim]);
                    }
                    let m = targets.len() * dim;
                    let loss = sgns::loss_and_grad(
                        &center,
                        &outputs[..m],
                        &labels,
                        &mut grad_center,
                        &mut grad_outputs[..m],
                    );
                    if !loss.is_finite() {
                        return Err(Error::Diverged {
                            epoch: epoch + 1,
                            detail: format!(
                                "non-finite loss on pair ({c}, {ctx}) at learning rate {lr}"
                            ),
                        });
                    }
                    stats.loss += loss as f64;
                    stats.pairs += 1;
                    for (t, &row) in targets.iter().enumerate() {
                        descend(&self.output, row, dim, &grad_outputs[t * dim..(t + 1) * dim], lr);
                    }
                    descend(&self.input, c, dim, &grad_center, lr);
                }
            }
            self.processed
                .fetch_add(sentence.len() as u64, Ordering::Relaxed);
        }
        Ok(stats)
    }
}

/// Trains a model. Pre-trained vectors, when given, initialise word tokens
/// only; every other row starts uniform in `[-0.5/dim, 0.5/dim)` and output
/// rows start at zero.
pub fn train(
    sentences: &[Vec<String>],
    cfg: &TrainConfig,
    init: Option<&Pretrained>,
) -> Result<EmbeddingModel> {
    cfg.validate()?;
    if let Some(pre) = init {
        if pre.dim != cfg.dim {
            return Err(Error::DimensionMismatch {
                expected: cfg.dim,
                found: pre.dim,
            });
        }
    }
    let vocab = build_vocab(sentences, cfg.min_count)?;
    let dim = cfg.dim;

    let mut rng = stream_rng(cfg.seed, u64::MAX - 1);
    let mut input = vec![0.0f32; vocab.len() * dim];
    for x in input.iter_mut() {
        *x = (rng.gen::<f32>() - 0.5) / dim as f32;
    }
    let mut reused = 0usize;
    if let Some(pre) = init {
        for (i, token) in vocab.tokens.iter().enumerate() {
            if !is_word_token(token) {
                continue;
            }
            if let Some(v) = pre.vectors.get(token) {
                input[i * dim..(i + 1) * dim].copy_from_slice(v);
                reused += 1;
            }
        }
        debug!("initialised {reused} word vectors from pre-trained file");
    }

    let encoded: Vec<Vec<u32>> = sentences
        .iter()
        .map(|s| s.iter().filter_map(|t| vocab.get(t)).collect::<Vec<u32>>())
        .filter(|s| !s.is_empty())
        .collect();
    let total_words: u64 = encoded.iter().map(|s| s.len() as u64).sum();

    let keep = (cfg.subsample_threshold > 0.0).then(|| {
        let t = cfg.subsample_threshold * total_words as f64;
        vocab
            .counts
            .iter()
            .map(|&c| {
                let c = c as f64;
                ((c / t).sqrt() + 1.0) * t / c
            })
            .collect()
    });

    let trainer = Trainer {
        cfg,
        input: input.iter().map(|x| AtomicU32::new(x.to_bits())).collect(),
        output: (0..input.len()).map(|_| AtomicU32::new(0)).collect(),
        negatives: NegativeTable::new(&vocab.counts),
        keep,
        processed: AtomicU64::new(0),
        total_work: total_words * cfg.epochs as u64,
    };

    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let mut order: Vec<&Vec<u32>> = encoded.iter().collect();
        order.shuffle(&mut stream_rng(cfg.seed, epoch as u64));
        let chunk = order.len().div_ceil(cfg.workers).max(1);
        let results: Vec<Result<EpochStats>> = if cfg.workers == 1 {
            vec![trainer.run_chunk(&order, epoch, 0)]
        } else {
            std::thread::scope(|scope| {
                let handles: Vec<_> = order
                    .chunks(chunk)
                    .enumerate()
                    .map(|(w, part)| {
                        let trainer = &trainer;
                        scope.spawn(move || trainer.run_chunk(part, epoch, w))
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("training worker panicked"))
                    .collect()
            })
        };
        let (mut loss, mut pairs) = (0.0, 0u64);
        for r in results {
            let s = r?;
            loss += s.loss;
            pairs += s.pairs;
        }
        let mean = if pairs == 0 { 0.0 } else { loss / pairs as f64 };
        debug!("epoch {}: mean loss {mean:.5} over {pairs} pairs", epoch + 1);
        let previous = epoch_losses.last().copied();
        epoch_losses.push(mean);
        if let (Some(tol), Some(prev)) = (cfg.early_stop, previous) {
            if prev > 0.0 && (prev - mean) / prev < tol {
                debug!("loss plateau after epoch {}", epoch + 1);
                break;
            }
        }
    }

    let unpack = |m: Vec<AtomicU32>| -> Vec<f32> {
        m.into_iter().map(|a| f32::from_bits(a.into_inner())).collect()
    };
    let input = unpack(trainer.input);
    let output = unpack(trainer.output);
    if input.iter().chain(&output).any(|x| !x.is_finite()) {
        return Err(Error::Diverged {
            epoch: epoch_losses.len(),
            detail: "non-finite vector entries after training".into(),
        });
    }
    Ok(EmbeddingModel {
        vocab,
        dim,
        input,
        output,
        config: cfg.clone(),
        epoch_losses,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FeatureMode {
    Iri,
    Word,
    Concat,
}

impl FeatureMode {
    pub const ALL: [FeatureMode; 3] = [FeatureMode::Iri, FeatureMode::Word, FeatureMode::Concat];

    pub fn width(self, dim: usize) -> usize {
        match self {
            FeatureMode::Concat => 2 * dim,
            _ => dim,
        }
    }
}

impl FromStr for FeatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iri" => Ok(FeatureMode::Iri),
            "word" => Ok(FeatureMode::Word),
            "concat" => Ok(FeatureMode::Concat),
            other => Err(Error::Config(format!(
                "unknown features {other:?} (expected iri, word or concat)"
            ))),
        }
    }
}

impl fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureMode::Iri => "iri",
            FeatureMode::Word => "word",
            FeatureMode::Concat => "concat",
        })
    }
}

/// Mean of the vectors of the entity's lexical tokens that are in the
/// vocabulary; a zero vector (logged at debug level) when none are.
pub fn word_vector(model: &EmbeddingModel, onto: &Ontology, entity: &Iri) -> Vec<f32> {
    let mut sum = vec![0.0f32; model.dim];
    let mut n = 0usize;
    for token in lexical_tokens(onto, entity) {
        if let Some(v) = model.vector(&token) {
            sum.iter_mut().zip(v).for_each(|(s, x)| *s += x);
            n += 1;
        }
    }
    if n == 0 {
        debug!("no word of {entity} is in the vocabulary; using a zero vector");
        return sum;
    }
    sum.iter_mut().for_each(|s| *s /= n as f32);
    sum
}

pub fn entity_vector(
    model: &EmbeddingModel,
    onto: &Ontology,
    entity: &Iri,
    mode: FeatureMode,
) -> Result<Vec<f32>> {
    let iri = || {
        model
            .vector(entity.as_str())
            .map(<[f32]>::to_vec)
            .ok_or_else(|| Error::UnknownToken(entity.to_string()))
    };
    Ok(match mode {
        FeatureMode::Iri => iri()?,
        FeatureMode::Word => word_vector(model, onto, entity),
        FeatureMode::Concat => {
            let mut v = iri()?;
            v.extend(word_vector(model, onto, entity));
            v
        }
    })
}
