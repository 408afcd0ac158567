//! Structure, lexical and combined documents built from the same walks.

use std::path::Path;

use ontovec::corpus::{Corpus, Documents};
use ontovec::pipeline::{load_ontology, start_entities};
use ontovec::predictor::Task;
use ontovec::projection::{project_rules, to_walk_graph};
use ontovec::walker::{generate_walks, WalkConfig};

fn main() -> ontovec::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/helis_fragment.nt");
    let onto = load_ontology(&path)?;
    let g = to_walk_graph(&project_rules(&onto, false));
    let starts = start_entities(&onto, Task::Membership);
    let cfg = WalkConfig {
        depth: 3,
        walks_per_entity: 2,
        ..WalkConfig::default()
    };
    let walks = generate_walks(&g, &starts, &cfg)?;
    let corpus = Corpus::build(walks, &onto, Documents::Sltc, 0);
    for (name, doc) in [
        ("structure", &corpus.structure),
        ("lexical", &corpus.lexical),
        ("combined", &corpus.combined),
    ] {
        println!("== {name} ({} sentences)", doc.len());
        for s in doc.iter().take(6) {
            println!("  {s}");
        }
    }
    Ok(())
}
