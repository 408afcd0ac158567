//! Train skip-gram vectors on a small corpus and inspect neighbours.

use ontovec::embedder::{train, TrainConfig};

fn main() -> ontovec::Result<()> {
    let text = "\
beer is an alcoholic beverage
wine is an alcoholic beverage
milk is a dairy beverage
yogurt is a dairy food
cheese is a dairy food
beer and wine contain alcohol
milk and yogurt contain calcium";
    let sentences: Vec<Vec<String>> = text
        .lines()
        .cycle()
        .take(700)
        .map(|l| l.split_whitespace().map(str::to_string).collect())
        .collect();
    let cfg = TrainConfig {
        dim: 16,
        epochs: 5,
        window: 3,
        ..TrainConfig::default()
    };
    let model = train(&sentences, &cfg, None)?;
    println!("loss per epoch: {:?}", model.epoch_losses);
    for (a, b) in [("beer", "wine"), ("beer", "alcohol"), ("milk", "calcium"), ("beer", "calcium")] {
        println!(
            "score({a} -> {b}) = {:.3}",
            model.context_score(a, b).unwrap_or(f32::NAN)
        );
    }
    Ok(())
}
