//! Compare the three graph projections of the same ontology.

use std::path::Path;

use ontovec::pipeline::load_ontology;
use ontovec::projection::{project, to_walk_graph, Strategy};

fn main() -> ontovec::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/foodon_fragment.nt");
    let onto = load_ontology(&path)?;
    for strategy in [Strategy::Mapping, Strategy::Rules, Strategy::RulesInverse] {
        let g = project(&onto, strategy);
        let w = to_walk_graph(&g);
        println!(
            "== {strategy}: {} edges, {} walk vertices, {} skipped",
            g.edges.len(),
            w.len(),
            g.skipped
        );
        for t in &g.edges {
            println!("  {t}");
        }
    }
    Ok(())
}
