//! Classify an ontology and materialise the entailed hierarchy.

use std::path::Path;

use ontovec::pipeline::load_ontology;
use ontovec::reasoner::{classify, materialize};

fn main() -> ontovec::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/helis_fragment.nt");
    let onto = load_ontology(&path)?;
    let closure = classify(&onto);
    for (class, sups) in &closure.subsumes {
        let names: Vec<&str> = sups.iter().map(|s| s.name()).collect();
        println!("{} subClassOf {names:?}", class.name());
    }
    for (ind, types) in &closure.member_of {
        let names: Vec<&str> = types.iter().map(|s| s.name()).collect();
        println!("{} type {names:?}", ind.name());
    }
    let full = materialize(&onto, &closure);
    println!("{} axioms before, {} after materialising", onto.axioms().len(), full.axioms().len());
    Ok(())
}
