//! Ontology embedding: turn an OWL ontology (as N-Triples) into a graph,
//! walk it into sentence corpora, train skip-gram vectors and use them to
//! predict class memberships and subsumptions.

pub mod corpus;
pub mod embedder;
pub mod error;
pub mod lexical;
pub mod ontology;
pub mod pipeline;
pub mod projection;
pub mod rdf;
pub mod reasoner;
pub mod synth;
pub mod predictor;
pub mod vocab;
pub mod walker;

pub use error::{Error, Result};
