use serde::{Deserialize, Serialize};

/// Adam with bias correction, one moment pair per parameter tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adam {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub step: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl Adam {
    pub fn new(shapes: &[usize]) -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            m: shapes.iter().map(|n| vec![0.0; *n]).collect(),
            v: shapes.iter().map(|n| vec![0.0; *n]).collect(),
        }
    }

    /// One update; `lrs[i]` is the step size for tensor `i`.
    pub fn update(&mut self, params: &mut [&mut [f64]], grads: &[Vec<f64>], lrs: &[f64]) {
        self.step += 1;
        let c1 = 1.0 - self.beta1.powi(self.step as i32);
        let c2 = 1.0 - self.beta2.powi(self.step as i32);
        for (t, p) in params.iter_mut().enumerate() {
            let (m, v, g, lr) = (&mut self.m[t], &mut self.v[t], &grads[t], lrs[t]);
            for i in 0..p.len() {
                m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * g[i];
                v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * g[i] * g[i];
                p[i] -= lr * (m[i] / c1) / ((v[i] / c2).sqrt() + self.eps);
            }
        }
    }
}

/// Stepped decay: `base * factor^(epoch / period)`, epochs counted from 0.
pub fn learning_rate(base: f64, factor: f64, period: usize, epoch: usize) -> f64 {
    base * factor.powi((epoch / period.max(1)) as i32)
}
