//! Full run on the synthetic ontology: split, embed, fit, rank.

use ontovec::ontology::serialize_mapping;
use ontovec::pipeline::{format_distances, run_pipeline, RunConfig};
use ontovec::predictor::random_ranking_mrr;
use ontovec::rdf::write_ntriples;
use ontovec::synth::{generate, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("ontovec-membership");
    std::fs::create_dir_all(&dir)?;
    let input = dir.join("synth.nt");
    let file = std::fs::File::create(&input)?;
    write_ntriples(std::io::BufWriter::new(file), &serialize_mapping(&generate(&SynthConfig::default())))
        ?;

    let cfg = RunConfig {
        input,
        output_dir: dir.join("run"),
        ..RunConfig::default()
    };
    let out = run_pipeline(&cfg)?;
    print!("{}", out.report.table());
    println!("random ranking MRR: {:.4}", random_ranking_mrr(out.report.candidates));
    print!("{}", format_distances(&out.distances));
    println!("artifacts in {}", cfg.output_dir.display());
    Ok(())
}
