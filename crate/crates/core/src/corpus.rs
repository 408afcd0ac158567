//! Structure, lexical and combined documents.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::lexical::{lexical_tokens, tokenize};
use crate::ontology::{Axiom, ClassExpr, Ontology};
use crate::projection::literal_token;
use crate::rdf::Iri;
use crate::vocab;
use crate::walker::{stream_rng, Token, Walk};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    Walk,
    Axiom,
    LabelReplaced,
    Annotation,
    CombinedRandom,
    CombinedTraversal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<Token>,
    pub provenance: Provenance,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>, provenance: Provenance) -> Self {
        Sentence { tokens, provenance }
    }

    pub fn strings(&self) -> Vec<String> {
        self.tokens.iter().map(|t| t.as_str().to_string()).collect()
    }

    pub fn iri_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.as_iri().is_some()).count()
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(t.as_str())?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CombineStrategy {
    Random,
    Traversal,
}

/// Which documents go into the training corpus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Documents {
    /// Structure only.
    S,
    /// Structure and lexical.
    Sl,
    /// Structure, lexical, and combined by the random strategy.
    Slrc,
    /// Structure, lexical, and combined by the traversal strategy.
    Sltc,
}

impl Documents {
    pub fn lexical(self) -> bool {
        self != Documents::S
    }

    pub fn combined(self) -> Option<CombineStrategy> {
        match self {
            Documents::Slrc => Some(CombineStrategy::Random),
            Documents::Sltc => Some(CombineStrategy::Traversal),
            _ => None,
        }
    }
}

impl FromStr for Documents {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "s" => Documents::S,
            "sl" => Documents::Sl,
            "slrc" => Documents::Slrc,
            "sltc" => Documents::Sltc,
            other => {
                return Err(Error::Config(format!(
                    "unknown document set {other:?} (expected s, sl, slrc or sltc)"
                )))
            }
        })
    }
}

impl fmt::Display for Documents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Documents::S => "s",
            Documents::Sl => "sl",
            Documents::Slrc => "slrc",
            Documents::Sltc => "sltc",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Corpus {
    pub structure: Vec<Sentence>,
    pub lexical: Vec<Sentence>,
    pub combined: Vec<Sentence>,
}

impl Corpus {
    pub fn build(walks: Vec<Walk>, onto: &Ontology, documents: Documents, seed: u64) -> Corpus {
        let structure = build_structure(walks, onto);
        let lexical = if documents.lexical() {
            build_lexical(&structure, onto)
        } else {
            Vec::new()
        };
        let combined = match documents.combined() {
            Some(strategy) => build_combined(&structure, onto, strategy, seed),
            None => Vec::new(),
        };
        Corpus {
            structure,
            lexical,
            combined,
        }
    }

    pub fn len(&self) -> usize {
        self.structure.len() + self.lexical.len() + self.combined.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sentences of the selected documents, structure first, then lexical,
    /// then combined.
    pub fn merge(&self, documents: Documents) -> Vec<Vec<String>> {
        let mut out: Vec<Vec<String>> = self.structure.iter().map(Sentence::strings).collect();
        if documents.lexical() {
            out.extend(self.lexical.iter().map(Sentence::strings));
        }
        if documents.combined().is_some() {
            out.extend(self.combined.iter().map(Sentence::strings));
        }
        out
    }
}

fn kw(word: &str) -> Token {
    Token::Keyword(word.to_string())
}

fn push_expr(expr: &ClassExpr, out: &mut Vec<Token>) {
    match expr {
        ClassExpr::Named(c) => out.push(Token::Iri(c.clone())),
        ClassExpr::Intersection(ops) | ClassExpr::Union(ops) => {
            let joiner = if matches!(expr, ClassExpr::Intersection(_)) {
                "and"
            } else {
                "or"
            };
            for (i, op) in ops.iter().enumerate() {
                if i > 0 {
                    out.push(kw(joiner));
                }
                push_expr(op, out);
            }
        }
        ClassExpr::Some { property, filler } | ClassExpr::Only { property, filler } => {
            out.push(Token::Iri(property.clone()));
            out.push(kw(if matches!(expr, ClassExpr::Some { .. }) {
                "some"
            } else {
                "only"
            }));
            push_expr(filler, out);
        }
        ClassExpr::Cardinality {
            kind,
            n,
            property,
            filler,
        } => {
            out.push(Token::Iri(property.clone()));
            out.push(kw(kind.keyword()));
            out.push(Token::Keyword(n.to_string()));
            if let Some(f) = filler {
                push_expr(f, out);
            }
        }
        ClassExpr::HasValue { property, value } => {
            out.push(Token::Iri(property.clone()));
            out.push(kw("value"));
            out.push(Token::Iri(value.clone()));
        }
    }
}

/// Manchester-style linearisation of an axiom. Keywords are kept as in
/// Manchester syntax; entities keep their IRIs.
pub fn axiom_sentence(ax: &Axiom) -> Sentence {
    let mut t = Vec::new();
    match ax {
        Axiom::SubClassOf { sub, sup } => {
            push_expr(sub, &mut t);
            t.push(kw("subClassOf"));
            push_expr(sup, &mut t);
        }
        Axiom::EquivalentClasses(a, b) => {
            push_expr(a, &mut t);
            t.push(kw("equivalentTo"));
            push_expr(b, &mut t);
        }
        Axiom::ClassAssertion { class, individual } => {
            t.push(Token::Iri(individual.clone()));
            t.push(kw("type"));
            push_expr(class, &mut t);
        }
        Axiom::ObjectAssertion {
            subject,
            property,
            object,
        } => {
            t.extend([subject, property, object].map(|i| Token::Iri(i.clone())));
        }
        Axiom::DataAssertion {
            subject,
            property,
            value,
        } => {
            t.push(Token::Iri(subject.clone()));
            t.push(Token::Iri(property.clone()));
            t.push(Token::Literal(literal_token(&value.lexical)));
        }
        Axiom::SubPropertyOf { sub, sup } => {
            t.extend([Token::Iri(sub.clone()), kw("subPropertyOf"), Token::Iri(sup.clone())]);
        }
        Axiom::InverseOf(a, b) => {
            t.extend([Token::Iri(a.clone()), kw("inverseOf"), Token::Iri(b.clone())]);
        }
        Axiom::PropertyChain { chain, sup } => {
            for (i, p) in chain.iter().enumerate() {
                if i > 0 {
                    t.push(kw("o"));
                }
                t.push(Token::Iri(p.clone()));
            }
            t.push(kw("subPropertyOf"));
            t.push(Token::Iri(sup.clone()));
        }
        Axiom::Domain { property, class } | Axiom::Range { property, class } => {
            t.push(Token::Iri(property.clone()));
            t.push(kw(if matches!(ax, Axiom::Domain { .. }) {
                "domain"
            } else {
                "range"
            }));
            push_expr(class, &mut t);
        }
    }
    Sentence::new(t, Provenance::Axiom)
}

/// Walk sentences followed by one sentence per axiom.
pub fn build_structure(walks: Vec<Walk>, onto: &Ontology) -> Vec<Sentence> {
    let mut doc: Vec<Sentence> = walks
        .into_iter()
        .filter(|w| !w.is_empty())
        .map(|w| Sentence::new(w.tokens, Provenance::Walk))
        .collect();
    doc.extend(onto.axioms().iter().map(axiom_sentence));
    doc
}

/// Word tokens replacing one structure token. IRIs use their lexical
/// tokens, keywords are lowercased, literals are tokenised when that
/// yields words; kernels and blank nodes stay as they are.
fn words_for(onto: &Ontology, token: &Token) -> Vec<Token> {
    match token {
        Token::Iri(i) => lexical_tokens(onto, i).into_iter().map(Token::Word).collect(),
        Token::Keyword(k) => vec![Token::Word(k.to_lowercase())],
        Token::Literal(l) => {
            let words = tokenize(l);
            if words.is_empty() {
                vec![token.clone()]
            } else {
                words.into_iter().map(Token::Word).collect()
            }
        }
        Token::Blank(_) | Token::Kernel(_) | Token::Word(_) => vec![token.clone()],
    }
}

/// Label-replaced copies of the structure sentences, then one sentence per
/// English non-label annotation: entity words followed by the text words.
pub fn build_lexical(structure: &[Sentence], onto: &Ontology) -> Vec<Sentence> {
    let mut doc: Vec<Sentence> = structure
        .iter()
        .map(|s| {
            let tokens = s.tokens.iter().flat_map(|t| words_for(onto, t)).collect();
            Sentence::new(tokens, Provenance::LabelReplaced)
        })
        .collect();
    for (entity, list) in onto.annotations() {
        for a in list {
            if a.property.as_str() == vocab::RDFS_LABEL || !a.value.is_english() {
                continue;
            }
            let text = tokenize(&a.value.lexical);
            if text.is_empty() {
                continue;
            }
            let mut tokens: Vec<Token> = entity_words(onto, entity);
            tokens.extend(text.into_iter().map(Token::Word));
            doc.push(Sentence::new(tokens, Provenance::Annotation));
        }
    }
    doc
}

fn entity_words(onto: &Ontology, entity: &Iri) -> Vec<Token> {
    lexical_tokens(onto, entity)
        .into_iter()
        .map(Token::Word)
        .collect()
}

fn keep_one(onto: &Ontology, s: &Sentence, keep: usize, provenance: Provenance) -> Sentence {
    let tokens = s
        .tokens
        .iter()
        .enumerate()
        .flat_map(|(i, t)| {
            if i == keep {
                vec![t.clone()]
            } else {
                words_for(onto, t)
            }
        })
        .collect();
    Sentence::new(tokens, provenance)
}

/// Mixed sentences keeping one IRI and lexicalising the rest. Random keeps
/// one uniformly chosen IRI per sentence; traversal emits one sentence per
/// IRI position.
pub fn build_combined(
    structure: &[Sentence],
    onto: &Ontology,
    strategy: CombineStrategy,
    seed: u64,
) -> Vec<Sentence> {
    let mut rng = stream_rng(seed, u64::MAX);
    let mut doc = Vec::new();
    for s in structure {
        let positions: Vec<usize> = s
            .tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| t.as_iri().is_some())
            .map(|(i, _)| i)
            .collect();
        if positions.is_empty() {
            continue;
        }
        match strategy {
            CombineStrategy::Random => {
                let keep = positions[rng.gen_range(0..positions.len())];
                doc.push(keep_one(onto, s, keep, Provenance::CombinedRandom));
            }
            CombineStrategy::Traversal => {
                for &keep in &positions {
                    doc.push(keep_one(onto, s, keep, Provenance::CombinedTraversal));
                }
            }
        }
    }
    doc
}

pub fn write_sentences<W: Write>(mut out: W, sentences: &[Vec<String>]) -> std::io::Result<()> {
    for s in sentences {
        writeln!(out, "{}", s.join(" "))?;
    }
    Ok(())
}

/// One sentence per non-empty line, tokens split on single spaces.
pub fn read_sentences<R: BufRead>(reader: R) -> Result<Vec<Vec<String>>> {
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let tokens: Vec<String> = line.split(' ').filter(|t| !t.is_empty()).map(String::from).collect();
        if !tokens.is_empty() {
            out.push(tokens);
        }
    }
    Ok(out)
}
