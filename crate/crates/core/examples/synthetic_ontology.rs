//! Generate the synthetic benchmark ontology and print a sample.

use ontovec::ontology::serialize_mapping;
use ontovec::synth::{generate, SynthConfig};

fn main() {
    let cfg = SynthConfig {
        clusters: 2,
        classes_per_cluster: 6,
        instances: 8,
        seed: 3,
    };
    let onto = generate(&cfg);
    for (entity, label) in onto.labels() {
        println!("{:<12} {label}", entity.name());
    }
    let subsumptions = onto.axioms().iter().filter_map(|a| a.as_named_subsumption());
    for (sub, sup) in subsumptions {
        println!("{} subClassOf {}", sub.name(), sup.name());
    }
    println!("{} triples when serialised", serialize_mapping(&onto).len());
}
