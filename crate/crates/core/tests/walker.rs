mod common;

use common::*;
use ontovec::projection::{project_rules, to_walk_graph};
use ontovec::walker::{generate_walks, WalkConfig, WalkerKind};

#[test]
fn branch_frequencies_and_kernel_stability() {
    criterion_walker_statistics().assert();
}

#[test]
fn walks_are_reproducible_for_a_seed() {
    let g = to_walk_graph(&project_rules(&fixture("helis_fragment.nt"), false));
    let starts = [vc("FOOD-4001"), vc("Beer"), vc("VitaminC_100")];
    let cfg = WalkConfig {
        walks_per_entity: 50,
        ..WalkConfig::default()
    };
    assert_eq!(generate_walks(&g, &starts, &cfg).unwrap(), generate_walks(&g, &starts, &cfg).unwrap());
    let other = WalkConfig { seed: cfg.seed + 1, ..cfg.clone() };
    assert_ne!(generate_walks(&g, &starts, &cfg).unwrap(), generate_walks(&g, &starts, &other).unwrap());
}

#[test]
fn sink_start_yields_single_token_walks() {
    let g = to_walk_graph(&branching_graph());
    let cfg = WalkConfig {
        walks_per_entity: 5,
        kind: WalkerKind::Wl,
        max_kernel_size: 2,
        ..WalkConfig::default()
    };
    let y = ontovec::vocab::iri("http://example.org/gen#y1");
    let walks = generate_walks(&g, std::slice::from_ref(&y), &cfg).unwrap();
    assert_eq!(walks.len(), 15);
    assert!(walks.iter().all(|w| w.tokens.len() == 1 && w.tokens[0].as_iri() == Some(&y)));
}
