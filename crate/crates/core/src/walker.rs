//! Seeded random walks and Weisfeiler-Lehman kernel walks.

use std::fmt;
use std::hash::Hasher;
use std::str::FromStr;

use fnv::FnvHasher;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::projection::{VertexKind, WalkGraph};
use crate::rdf::Iri;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WalkerKind {
    Random,
    Wl,
}

impl FromStr for WalkerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(WalkerKind::Random),
            "wl" => Ok(WalkerKind::Wl),
            other => Err(Error::Config(format!("unknown walker {other:?} (expected random or wl)"))),
        }
    }
}

impl fmt::Display for WalkerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WalkerKind::Random => "random",
            WalkerKind::Wl => "wl",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WalkConfig {
    /// Maximum number of hops; a walk has at most `depth + 1` tokens.
    pub depth: usize,
    pub walks_per_entity: usize,
    pub max_kernel_size: usize,
    pub kind: WalkerKind,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            depth: 4,
            walks_per_entity: 10,
            max_kernel_size: 4,
            kind: WalkerKind::Random,
            seed: 42,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.depth == 0 {
            return Err(Error::Config("walk depth must be at least 1".into()));
        }
        if self.walks_per_entity == 0 {
            return Err(Error::Config("walks per entity must be at least 1".into()));
        }
        Ok(())
    }
}

/// A corpus token with enough type information for lexicalisation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Token {
    Iri(Iri),
    /// Blank node, rendered `_:label`.
    Blank(String),
    /// Literal lexical form, whitespace already replaced.
    Literal(String),
    Kernel(String),
    /// Manchester keyword or cardinality number.
    Keyword(String),
    Word(String),
}

impl Token {
    pub fn as_str(&self) -> &str {
        match self {
            Token::Iri(i) => i.as_str(),
            Token::Blank(s)
            | Token::Literal(s)
            | Token::Kernel(s)
            | Token::Keyword(s)
            | Token::Word(s) => s,
        }
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Token::Iri(i) => Some(i),
            _ => None,
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk {
    pub tokens: Vec<Token>,
}

impl Walk {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

fn token_of(g: &WalkGraph, id: u32) -> Token {
    let v = g.vertex(id);
    match v.kind {
        VertexKind::Entity | VertexKind::Relation => match v.term.as_iri() {
            Some(i) => Token::Iri(i.clone()),
            None => Token::Literal(v.token.clone()),
        },
        VertexKind::Blank => Token::Blank(v.token.clone()),
        VertexKind::Literal => Token::Literal(v.token.clone()),
    }
}

/// Vertex path of one walk: uniform choice among out-neighbours, stopping
/// early at a sink.
pub fn random_path<R: Rng>(g: &WalkGraph, start: u32, depth: usize, rng: &mut R) -> Vec<u32> {
    let mut path = Vec::with_capacity(depth + 1);
    path.push(start);
    let mut at = start;
    for _ in 0..depth {
        let next = g.neighbors(at);
        if next.is_empty() {
            break;
        }
        at = next[rng.gen_range(0..next.len())];
        path.push(at);
    }
    path
}

pub fn random_walk<R: Rng>(g: &WalkGraph, start: &Iri, cfg: &WalkConfig, rng: &mut R) -> Result<Walk> {
    let id = g
        .entity(start)
        .ok_or_else(|| Error::UnknownStartVertex(start.to_string()))?;
    let path = random_path(g, id, cfg.depth, rng);
    Ok(Walk {
        tokens: path.iter().map(|&v| token_of(g, v)).collect(),
    })
}

/// Weisfeiler-Lehman labels for sizes `0..=max_size`: `labels[k][v]`.
///
/// Size 0 is the vertex token. Size `k` digests the size `k-1` label
/// followed by the sorted size `k-1` labels of the out-neighbours.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WlLabels {
    labels: Vec<Vec<String>>,
}

impl WlLabels {
    pub fn get(&self, vertex: u32, size: usize) -> &str {
        &self.labels[size][vertex as usize]
    }

    pub fn max_size(&self) -> usize {
        self.labels.len() - 1
    }
}

pub fn wl_relabel(g: &WalkGraph, max_size: usize) -> WlLabels {
    let mut labels: Vec<Vec<String>> = Vec::with_capacity(max_size + 1);
    labels.push(g.vertices().iter().map(|v| v.token.clone()).collect());
    for k in 1..=max_size {
        let prev = &labels[k - 1];
        let next: Vec<String> = (0..g.len() as u32)
            .into_par_iter()
            .map(|v| {
                let mut around: Vec<&str> = g
                    .neighbors(v)
                    .iter()
                    .map(|&u| prev[u as usize].as_str())
                    .collect();
                around.sort_unstable();
                let mut h = FnvHasher::default();
                h.write(prev[v as usize].as_bytes());
                for n in around {
                    // separator keeps ("ab", "c") apart from ("a", "bc")
                    h.write(&[0]);
                    h.write(n.as_bytes());
                }
                format!("kernel_{k}_{:016x}", h.finish())
            })
            .collect();
        labels.push(next);
    }
    WlLabels { labels }
}

/// Kernel variants of one base walk: entity positions after the start
/// (every even index from 2) take their size-`k` label, for each `k` in
/// `0..=max_size`. The size-0 variant equals the base walk.
pub fn kernel_variants(g: &WalkGraph, path: &[u32], wl: &WlLabels) -> Vec<Walk> {
    (0..=wl.max_size())
        .map(|k| Walk {
            tokens: path
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    if k > 0 && i >= 2 && i % 2 == 0 {
                        Token::Kernel(wl.get(v, k).to_string())
                    } else {
                        token_of(g, v)
                    }
                })
                .collect(),
        })
        .collect()
}

pub fn kernel_walks<R: Rng>(
    g: &WalkGraph,
    wl: &WlLabels,
    start: &Iri,
    cfg: &WalkConfig,
    rng: &mut R,
) -> Result<Vec<Walk>> {
    let id = g
        .entity(start)
        .ok_or_else(|| Error::UnknownStartVertex(start.to_string()))?;
    let path = random_path(g, id, cfg.depth, rng);
    Ok(kernel_variants(g, &path, wl))
}

/// Random stream for the `index`-th start vertex.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// All walks from every start present in the graph, in start order. Starts
/// run in parallel on independent streams, so the result does not depend on
/// the thread count.
pub fn generate_walks(g: &WalkGraph, starts: &[Iri], cfg: &WalkConfig) -> Result<Vec<Walk>> {
    cfg.validate()?;
    let wl = match cfg.kind {
        WalkerKind::Wl => Some(wl_relabel(g, cfg.max_kernel_size)),
        WalkerKind::Random => None,
    };
    let per_start: Vec<Vec<Walk>> = starts
        .par_iter()
        .enumerate()
        .map(|(i, start)| {
            let Some(id) = g.entity(start) else {
                return Vec::new();
            };
            let mut rng = stream_rng(cfg.seed, i as u64);
            let mut out = Vec::new();
            for _ in 0..cfg.walks_per_entity {
                let path = random_path(g, id, cfg.depth, &mut rng);
                match &wl {
                    Some(wl) => out.extend(kernel_variants(g, &path, wl)),
                    None => out.push(Walk {
                        tokens: path.iter().map(|&v| token_of(g, v)).collect(),
                    }),
                }
            }
            out
        })
        .collect();
    Ok(per_start.into_iter().flatten().collect())
}
