use crate::error::{Error, Result};

/// Logistic output layer of the real-valued baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearHead {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearHead {
    pub fn zeros(n: usize) -> Self {
        Self {
            weights: vec![0.0; n],
            bias: 0.0,
        }
    }

    pub fn logit(&self, mean: &[f64]) -> Result<f64> {
        if mean.len() != self.weights.len() {
            return Err(Error::Dimension {
                expected: self.weights.len(),
                got: mean.len(),
            });
        }
        Ok(self.weights.iter().zip(mean).map(|(w, x)| w * x).sum::<f64>() + self.bias)
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `sigmoid(w·mean + b)`
pub fn linear_head(w: &[f64], b: f64, mean: &[f64]) -> Result<f64> {
    let head = LinearHead {
        weights: w.to_vec(),
        bias: b,
    };
    head.logit(mean).map(sigmoid)
}
