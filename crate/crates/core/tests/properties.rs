mod common;

use common::*;
use ontovec::corpus::Documents;
use ontovec::embedder::FeatureMode;
use ontovec::pipeline::RunConfig;
use ontovec::projection::{project, to_walk_graph, Strategy};
use ontovec::walker::{generate_walks, Token, WalkConfig, WalkerKind};
use proptest::prelude::*;

fn strategy() -> impl proptest::strategy::Strategy<Value = Strategy> {
    prop_oneof![Just(Strategy::Mapping), Just(Strategy::Rules), Just(Strategy::RulesInverse)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn walks_respect_depth(seed in 0u64..10_000, depth in 1usize..7, wl in any::<bool>(), s in strategy()) {
        let onto = random_ontology(seed, 60);
        let g = to_walk_graph(&project(&onto, s));
        let starts: Vec<_> = onto.classes().iter().chain(onto.instances()).cloned().collect();
        let cfg = WalkConfig {
            depth,
            walks_per_entity: 3,
            max_kernel_size: 2,
            kind: if wl { WalkerKind::Wl } else { WalkerKind::Random },
            seed,
        };
        for w in generate_walks(&g, &starts, &cfg).unwrap() {
            prop_assert!(!w.tokens.is_empty() && w.tokens.len() <= depth + 1);
            if s != Strategy::Mapping {
                prop_assert!(!w.tokens.iter().any(|t| matches!(t, Token::Blank(_))));
            }
        }
    }

    #[test]
    fn walk_graph_has_two_arcs_per_triple(seed in 0u64..10_000, s in strategy()) {
        let onto = random_ontology(seed, 80);
        let p = project(&onto, s);
        let g = to_walk_graph(&p);
        prop_assert_eq!(g.edge_count(), 2 * p.edges.len());
    }

    #[test]
    fn run_config_round_trips(
        depth in 1usize..20,
        seed in any::<u64>(),
        dim in 1usize..300,
        early in proptest::option::of(0.0f64..0.5),
        docs in prop_oneof![Just(Documents::S), Just(Documents::Sl), Just(Documents::Slrc), Just(Documents::Sltc)],
        features in prop_oneof![Just(FeatureMode::Iri), Just(FeatureMode::Word), Just(FeatureMode::Concat)],
        s in strategy(),
    ) {
        let cfg = RunConfig {
            depth,
            seed,
            dim,
            early_stop: early,
            documents: docs,
            features,
            projection: s,
            ..RunConfig::default()
        };
        prop_assert_eq!(RunConfig::from_kv(&cfg.to_kv()).unwrap(), cfg);
    }
}
