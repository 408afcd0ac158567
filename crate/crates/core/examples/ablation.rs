//! Document and feature ablation on the synthetic ontology.

use ontovec::corpus::Documents;
use ontovec::embedder::FeatureMode;
use ontovec::ontology::serialize_mapping;
use ontovec::pipeline::{run_pipeline, RunConfig};
use ontovec::rdf::write_ntriples;
use ontovec::synth::{generate, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("ontovec-ablation");
    std::fs::create_dir_all(&dir)?;
    let input = dir.join("synth.nt");
    let file = std::fs::File::create(&input)?;
    write_ntriples(std::io::BufWriter::new(file), &serialize_mapping(&generate(&SynthConfig::default())))
        ?;

    println!("{:<6} {:<7} {:>7} {:>7}", "docs", "feature", "MRR", "Hits@1");
    for documents in [Documents::S, Documents::Sl, Documents::Sltc] {
        for features in [FeatureMode::Iri, FeatureMode::Word, FeatureMode::Concat] {
            let cfg = RunConfig {
                input: input.clone(),
                output_dir: dir.join(format!("{documents}-{features}")),
                documents,
                features,
                ..RunConfig::default()
            };
            let r = run_pipeline(&cfg)?.report;
            println!("{:<6} {:<7} {:>7.3} {:>7.3}", documents.to_string(), features.to_string(), r.mrr, r.hits1);
        }
    }
    Ok(())
}
