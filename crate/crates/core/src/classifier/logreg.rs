use serde::{Deserialize, Serialize};

/// Full-batch gradient descent settings for L2-regularized logistic regression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogRegConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
    /// Stop once the largest gradient component falls below this.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig { learning_rate: 0.1, epochs: 2000, l2: 1e-3, tolerance: 1e-6, seed: 42 }
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn dot(w: &[f64], x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Mean negative log-likelihood plus `l2/2 * |w|^2` (bias unpenalized), and
/// its gradient with respect to the weights and the bias.
pub fn loss_and_gradient(x: &[Vec<f64>], y: &[bool], w: &[f64], b: f64, l2: f64) -> (f64, Vec<f64>, f64) {
    let n = x.len() as f64;
    let mut loss = 0.0;
    let mut grad_w = vec![0.0; w.len()];
    let mut grad_b = 0.0;
    for (row, &label) in x.iter().zip(y) {
        let z = dot(w, row) + b;
        let t = if label { 1.0 } else { 0.0 };
        loss += softplus(z) - t * z;
        let r = sigmoid(z) - t;
        for (g, v) in grad_w.iter_mut().zip(row) {
            *g += r * v;
        }
        grad_b += r;
    }
    loss /= n;
    grad_b /= n;
    for (g, wj) in grad_w.iter_mut().zip(w) {
        *g = *g / n + l2 * wj;
    }
    loss += 0.5 * l2 * w.iter().map(|v| v * v).sum::<f64>();
    (loss, grad_w, grad_b)
}

/// Returns `(weights, bias, epochs run)`.
pub(crate) fn train(x: &[Vec<f64>], y: &[bool], cfg: &LogRegConfig) -> (Vec<f64>, f64, usize) {
    let d = x.first().map_or(0, Vec::len);
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    for epoch in 0..cfg.epochs {
        let (_, gw, gb) = loss_and_gradient(x, y, &w, b, cfg.l2);
        let max_grad = gw.iter().fold(gb.abs(), |m, g| m.max(g.abs()));
        if max_grad < cfg.tolerance {
            return (w, b, epoch);
        }
        for (wj, g) in w.iter_mut().zip(&gw) {
            *wj -= cfg.learning_rate * g;
        }
        b -= cfg.learning_rate * gb;
    }
    (w, b, cfg.epochs)
}

pub(crate) fn probability(w: &[f64], b: f64, x: &[f64]) -> f64 {
    sigmoid(dot(w, x) + b)
}
