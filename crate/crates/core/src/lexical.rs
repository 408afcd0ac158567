//! Word tokens for labels, IRI names and annotation text.

use crate::ontology::Ontology;
use crate::rdf::Iri;
use crate::vocab;

/// Lowercase word tokens of `text`.
///
/// Splits on anything that is not alphanumeric, then on camel-case
/// boundaries, and drops every piece holding a non-letter. Letter/digit
/// boundaries are not split, so `"C12"` is dropped whole.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split(|c: char| !c.is_alphanumeric()) {
        for piece in camel_split(chunk) {
            push_word(&mut out, piece);
        }
    }
    out
}

fn push_word(out: &mut Vec<String>, piece: &str) {
    if piece.is_empty() {
        return;
    }
    let lower = piece.to_lowercase();
    if lower.chars().all(|c| c.is_alphabetic() && !c.is_uppercase()) {
        out.push(lower);
    }
}

/// `MilkAndYogurt` -> `Milk`, `And`, `Yogurt`; `HTMLParser` -> `HTML`, `Parser`.
fn camel_split(chunk: &str) -> Vec<&str> {
    let chars: Vec<(usize, char)> = chunk.char_indices().collect();
    let mut pieces = Vec::new();
    let mut start = 0;
    for i in 1..chars.len() {
        let (pos, c) = chars[i];
        let prev = chars[i - 1].1;
        let next_lower = chars.get(i + 1).is_some_and(|&(_, n)| n.is_lowercase());
        let boundary = c.is_uppercase()
            && (prev.is_lowercase() || (prev.is_uppercase() && next_lower));
        if boundary {
            pieces.push(&chunk[start..pos]);
            start = pos;
        }
    }
    if start < chunk.len() {
        pieces.push(&chunk[start..]);
    }
    pieces
}

/// Word tokens standing in for an entity.
///
/// English label if present, else the camel-split IRI name, else the full
/// IRI string. Built-in vocabulary (`rdf:type`, `rdfs:subClassOf` and their
/// reserved inverses) keeps its name as one lowercase word: `subclassof`.
pub fn lexical_tokens(onto: &Ontology, entity: &Iri) -> Vec<String> {
    if let Some(label) = onto.label(entity) {
        let words = tokenize(label);
        if !words.is_empty() {
            return words;
        }
    }
    let words = if vocab::is_builtin(entity) {
        let mut out = Vec::new();
        for piece in entity.name().split(|c: char| !c.is_alphanumeric()) {
            push_word(&mut out, piece);
        }
        out
    } else {
        tokenize(entity.name())
    };
    if words.is_empty() {
        vec![entity.as_str().to_string()]
    } else {
        words
    }
}

/// True when a corpus token is a plain lowercase word rather than an IRI,
/// blank node, literal or kernel identifier.
pub fn is_word_token(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| c.is_alphabetic() && !c.is_uppercase())
}
