//! Random walks and Weisfeiler-Lehman kernel walks from one entity.

use std::path::Path;

use ontovec::pipeline::load_ontology;
use ontovec::projection::{project_rules, to_walk_graph};
use ontovec::vocab::iri;
use ontovec::walker::{generate_walks, Walk, WalkConfig, WalkerKind};

fn show(w: &Walk) -> String {
    w.tokens.iter().map(|t| t.as_str().rsplit(['#', '/']).next().unwrap_or("")).collect::<Vec<_>>().join(" ")
}

fn main() -> ontovec::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/helis_fragment.nt");
    let onto = load_ontology(&path)?;
    let g = to_walk_graph(&project_rules(&onto, false));
    let start = [iri("http://www.fbk.eu/ontologies/virtualcoach#FOOD-4001")];
    let mut cfg = WalkConfig {
        depth: 4,
        walks_per_entity: 4,
        max_kernel_size: 2,
        kind: WalkerKind::Random,
        seed: 1,
    };
    println!("random walks:");
    for w in generate_walks(&g, &start, &cfg)? {
        println!("  {}", show(&w));
    }
    cfg.kind = WalkerKind::Wl;
    cfg.walks_per_entity = 1;
    println!("kernel variants of one walk:");
    for w in generate_walks(&g, &start, &cfg)? {
        println!("  {}", show(&w));
    }
    Ok(())
}
