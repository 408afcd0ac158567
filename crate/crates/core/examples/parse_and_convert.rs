//! Parse an N-Triples ontology into axioms, then write it back out.

use std::path::Path;

use ontovec::ontology::serialize_mapping;
use ontovec::pipeline::load_ontology;
use ontovec::rdf::to_ntriples_string;

fn main() -> ontovec::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/foodon_fragment.nt");
    let onto = load_ontology(&path)?;
    println!(
        "{} classes, {} instances, {} object properties",
        onto.classes().len(),
        onto.instances().len(),
        onto.object_properties().len()
    );
    for ax in onto.axioms() {
        println!("axiom: {ax:?}");
    }
    for (entity, label) in onto.labels() {
        println!("label: {} = {label:?}", entity.name());
    }
    println!("\n{}", to_ntriples_string(&serialize_mapping(&onto)));
    Ok(())
}
