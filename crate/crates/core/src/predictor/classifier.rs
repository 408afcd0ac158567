//! Binary classifiers over concatenated entity vectors: logistic
//! regression and a one-hidden-layer perceptron, both trained with Adam on
//! binary cross-entropy.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::embedder::sgns::{neg_log_sigmoid, sigmoid};
use crate::error::{Error, Result};
use crate::walker::stream_rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassifierKind {
    Lr,
    Mlp,
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lr" => Ok(ClassifierKind::Lr),
            "mlp" => Ok(ClassifierKind::Mlp),
            other => Err(Error::Config(format!("unknown classifier {other:?} (expected lr or mlp)"))),
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassifierKind::Lr => "lr",
            ClassifierKind::Mlp => "mlp",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassifierConfig {
    pub kind: ClassifierKind,
    /// Adam step size.
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Hidden width; `None` means twice the input width, capped at 200.
    pub hidden: Option<usize>,
    pub l2: f64,
    /// Stop after this many epochs without a better validation loss.
    pub patience: usize,
    pub seed: u64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            kind: ClassifierKind::Mlp,
            learning_rate: 0.003,
            epochs: 200,
            batch_size: 32,
            hidden: None,
            l2: 1e-4,
            patience: 30,
            seed: 42,
        }
    }
}

/// Parameters live in one flat vector:
/// MLP `[W1 (hidden x input), b1, w2, b2]`, LR `[w, b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Classifier {
    pub kind: ClassifierKind,
    pub input_dim: usize,
    pub hidden: usize,
    params: Vec<f64>,
    /// Validation loss of the kept parameters.
    pub best_loss: f64,
    pub best_epoch: usize,
}

impl Classifier {
    fn new<R: Rng>(kind: ClassifierKind, input_dim: usize, hidden: usize, rng: &mut R) -> Self {
        let mut params = Vec::new();
        match kind {
            ClassifierKind::Lr => params.resize(input_dim + 1, 0.0),
            ClassifierKind::Mlp => {
                let a1 = (6.0 / (input_dim + hidden) as f64).sqrt();
                params.extend((0..hidden * input_dim).map(|_| rng.gen_range(-a1..a1)));
                params.extend(std::iter::repeat_n(0.0, hidden));
                let a2 = (6.0 / (hidden + 1) as f64).sqrt();
                params.extend((0..hidden).map(|_| rng.gen_range(-a2..a2)));
                params.push(0.0);
            }
        }
        Classifier {
            kind,
            input_dim,
            hidden,
            params,
            best_loss: f64::INFINITY,
            best_epoch: 0,
        }
    }

    /// Pre-sigmoid output; fills `hidden_out` with post-activation units.
    fn logit(&self, x: &[f32], hidden_out: &mut [f64]) -> f64 {
        let n = self.input_dim;
        match self.kind {
            ClassifierKind::Lr => {
                let (w, b) = self.params.split_at(n);
                b[0] + w.iter().zip(x).map(|(w, &x)| w * x as f64).sum::<f64>()
            }
            ClassifierKind::Mlp => {
                let h = self.hidden;
                let (w1, rest) = self.params.split_at(h * n);
                let (b1, rest) = rest.split_at(h);
                let (w2, b2) = rest.split_at(h);
                let mut z = b2[0];
                for j in 0..h {
                    let row = &w1[j * n..(j + 1) * n];
                    let a = b1[j] + row.iter().zip(x).map(|(w, &x)| w * x as f64).sum::<f64>();
                    let a = a.max(0.0);
                    hidden_out[j] = a;
                    z += w2[j] * a;
                }
                z
            }
        }
    }

    /// Probability that the pair is a true axiom, in `[0, 1]`.
    pub fn score(&self, x: &[f32]) -> f64 {
        let mut hidden = vec![0.0; self.hidden];
        sigmoid(self.logit(x, &mut hidden))
    }

    /// Adds the gradient of the BCE loss on one sample to `grad`, returns
    /// the loss.
    fn accumulate(&self, x: &[f32], y: bool, hidden: &mut [f64], grad: &mut [f64]) -> f64 {
        let z = self.logit(x, hidden);
        let target = if y { 1.0 } else { 0.0 };
        let loss = if y { neg_log_sigmoid(z) } else { neg_log_sigmoid(-z) };
        let dz = sigmoid(z) - target;
        let n = self.input_dim;
        match self.kind {
            ClassifierKind::Lr => {
                for i in 0..n {
                    grad[i] += dz * x[i] as f64;
                }
                grad[n] += dz;
            }
            ClassifierKind::Mlp => {
                let h = self.hidden;
                let w2 = &self.params[h * n + h..h * n + 2 * h];
                let (g1, rest) = grad.split_at_mut(h * n);
                let (gb1, rest) = rest.split_at_mut(h);
                let (gw2, gb2) = rest.split_at_mut(h);
                gb2[0] += dz;
                for j in 0..h {
                    gw2[j] += dz * hidden[j];
                    if hidden[j] > 0.0 {
                        let d = dz * w2[j];
                        gb1[j] += d;
                        let row = &mut g1[j * n..(j + 1) * n];
                        for (g, &xi) in row.iter_mut().zip(x) {
                            *g += d * xi as f64;
                        }
                    }
                }
            }
        }
        loss
    }

    pub fn mean_loss(&self, xs: &[Vec<f32>], ys: &[bool]) -> f64 {
        let mut hidden = vec![0.0; self.hidden];
        let total: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, &y)| {
                let z = self.logit(x, &mut hidden);
                if y {
                    neg_log_sigmoid(z)
                } else {
                    neg_log_sigmoid(-z)
                }
            })
            .sum();
        total / xs.len().max(1) as f64
    }

    pub fn accuracy(&self, xs: &[Vec<f32>], ys: &[bool]) -> f64 {
        let right = xs
            .iter()
            .zip(ys)
            .filter(|(x, &y)| (self.score(x) >= 0.5) == y)
            .count();
        right as f64 / xs.len().max(1) as f64
    }
}

/// Fits a classifier on the training samples and keeps the parameters of
/// the epoch with the lowest validation loss (training loss when no
/// validation samples are given).
pub fn train_classifier(
    train_x: &[Vec<f32>],
    train_y: &[bool],
    valid_x: &[Vec<f32>],
    valid_y: &[bool],
    cfg: &ClassifierConfig,
) -> Result<Classifier> {
    let positives = train_y.iter().filter(|&&y| y).count();
    if train_x.is_empty() || positives == 0 || positives == train_y.len() {
        return Err(Error::DegenerateTrainingSet);
    }
    let input_dim = train_x[0].len();
    if let Some(bad) = train_x.iter().chain(valid_x).find(|x| x.len() != input_dim) {
        return Err(Error::DimensionMismatch {
            expected: input_dim,
            found: bad.len(),
        });
    }
    let hidden = match cfg.kind {
        ClassifierKind::Lr => 0,
        ClassifierKind::Mlp => cfg.hidden.unwrap_or((2 * input_dim).min(200)).max(1),
    };
    let mut rng = stream_rng(cfg.seed, 0xC1A5);
    let mut clf = Classifier::new(cfg.kind, input_dim, hidden, &mut rng);

    let (beta1, beta2, eps): (f64, f64, f64) = (0.9, 0.999, 1e-8);
    let p = clf.params.len();
    let mut m = vec![0.0; p];
    let mut v = vec![0.0; p];
    let mut grad = vec![0.0; p];
    let mut hidden_buf = vec![0.0; hidden];
    let mut step = 0i32;
    let mut order: Vec<usize> = (0..train_x.len()).collect();

    let (sel_x, sel_y) = if valid_x.is_empty() {
        (train_x, train_y)
    } else {
        (valid_x, valid_y)
    };
    let mut best = clf.clone();
    best.best_loss = clf.mean_loss(sel_x, sel_y);
    let mut since_best = 0;

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size.max(1)) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            for &i in batch {
                clf.accumulate(&train_x[i], train_y[i], &mut hidden_buf, &mut grad);
            }
            let scale = 1.0 / batch.len() as f64;
            step += 1;
            let (c1, c2) = (1.0 - beta1.powi(step), 1.0 - beta2.powi(step));
            for k in 0..p {
                let g = grad[k] * scale + cfg.l2 * clf.params[k];
                m[k] = beta1 * m[k] + (1.0 - beta1) * g;
                v[k] = beta2 * v[k] + (1.0 - beta2) * g * g;
                clf.params[k] -= cfg.learning_rate * (m[k] / c1) / ((v[k] / c2).sqrt() + eps);
            }
        }
        let loss = clf.mean_loss(sel_x, sel_y);
        if !loss.is_finite() {
            return Err(Error::Diverged {
                epoch,
                detail: "classifier loss is not finite".into(),
            });
        }
        if loss < best.best_loss {
            best = clf.clone();
            best.best_loss = loss;
            best.best_epoch = epoch;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= cfg.patience {
                break;
            }
        }
    }
    Ok(best)
}
