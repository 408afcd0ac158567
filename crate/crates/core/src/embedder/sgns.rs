//! Loss and gradients of skip-gram with negative sampling for one center
//! token against a positive context and its negatives.

use num_traits::Float;

/// `-ln(sigmoid(x))` without overflow.
pub fn neg_log_sigmoid<F: Float>(x: F) -> F {
    if x > F::zero() {
        (-x).exp().ln_1p()
    } else {
        -x + x.exp().ln_1p()
    }
}

pub fn sigmoid<F: Float>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

/// Loss `sum_t -ln sigmoid(s_t * v.u_t)` with `s_t = +1` for positive
/// targets and `-1` for negatives.
///
/// `outputs` holds the target vectors row by row, `labels` marks which rows
/// are positives. Gradients of the loss are written to `grad_center` and
/// `grad_outputs` (same layout as `outputs`); the loss is returned.
pub fn loss_and_grad<F: Float>(
    center: &[F],
    outputs: &[F],
    labels: &[bool],
    grad_center: &mut [F],
    grad_outputs: &mut [F],
) -> F {
    let dim = center.len();
    debug_assert_eq!(outputs.len(), labels.len() * dim);
    debug_assert_eq!(grad_outputs.len(), outputs.len());
    grad_center.iter_mut().for_each(|g| *g = F::zero());
    let mut loss = F::zero();
    for (t, &positive) in labels.iter().enumerate() {
        let u = &outputs[t * dim..(t + 1) * dim];
        let dot = center
            .iter()
            .zip(u)
            .fold(F::zero(), |acc, (&a, &b)| acc + a * b);
        let (sign, target) = if positive {
            (F::one(), F::one())
        } else {
            (-F::one(), F::zero())
        };
        loss = loss + neg_log_sigmoid(sign * dot);
        // d/d(dot) of the loss term
        let g = sigmoid(dot) - target;
        let gu = &mut grad_outputs[t * dim..(t + 1) * dim];
        for i in 0..dim {
            grad_center[i] = grad_center[i] + g * u[i];
            gu[i] = g * center[i];
        }
    }
    loss
}
