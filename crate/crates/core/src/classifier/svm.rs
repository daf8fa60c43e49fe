use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Linear SVM trained by stochastic subgradient descent on the regularized
/// hinge loss (Pegasos step size `1 / (lambda * t)`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmConfig {
    /// Regularization strength.
    pub lambda: f64,
    pub epochs: usize,
    /// Seeds the per-epoch visiting order.
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig { lambda: 1e-3, epochs: 2000, seed: 42 }
    }
}

fn margin(w: &[f64], b: f64, x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() + b
}

/// `lambda/2 * |w|^2 + mean(max(0, 1 - y * (w.x + b)))` with `y` in {-1, +1}.
pub fn objective(x: &[Vec<f64>], y: &[bool], w: &[f64], b: f64, lambda: f64) -> f64 {
    let hinge: f64 = x
        .iter()
        .zip(y)
        .map(|(row, &label)| {
            let s = if label { 1.0 } else { -1.0 };
            (1.0 - s * margin(w, b, row)).max(0.0)
        })
        .sum();
    0.5 * lambda * w.iter().map(|v| v * v).sum::<f64>() + hinge / x.len() as f64
}

/// The bias is trained as the weight of a constant feature, so it is
/// regularized along with the weights. Returns the iterate with the lowest
/// objective seen at an epoch boundary.
pub(crate) fn train(x: &[Vec<f64>], y: &[bool], cfg: &SvmConfig) -> (Vec<f64>, f64) {
    let d = x.first().map_or(0, Vec::len);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut best = (objective(x, y, &w, b, cfg.lambda), w.clone(), b);
    let mut order: Vec<usize> = (0..x.len()).collect();
    let radius = 1.0 / cfg.lambda.sqrt();
    let mut t = 0u64;
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (cfg.lambda * t as f64);
            let s = if y[i] { 1.0 } else { -1.0 };
            let violated = s * margin(&w, b, &x[i]) < 1.0;
            let shrink = 1.0 - eta * cfg.lambda;
            w.iter_mut().for_each(|v| *v *= shrink);
            b *= shrink;
            if violated {
                for (wj, v) in w.iter_mut().zip(&x[i]) {
                    *wj += eta * s * v;
                }
                b += eta * s;
            }
            let norm = (w.iter().map(|v| v * v).sum::<f64>() + b * b).sqrt();
            if norm > radius {
                let k = radius / norm;
                w.iter_mut().for_each(|v| *v *= k);
                b *= k;
            }
        }
        let obj = objective(x, y, &w, b, cfg.lambda);
        if obj < best.0 {
            best = (obj, w.clone(), b);
        }
    }
    (best.1, best.2)
}

/// Signed margin through a logistic link.
pub(crate) fn probability(w: &[f64], b: f64, x: &[f64]) -> f64 {
    super::logreg::sigmoid(margin(w, b, x))
}
