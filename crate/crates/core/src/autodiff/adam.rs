use crate::error::{Error, Result};
use crate::model::Model;

use super::params::GradientSet;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// First and second moment estimates plus the step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(len: usize, config: AdamConfig) -> Self {
        Self {
            config,
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }

    /// One bias-corrected update over the concatenation of `segments`.
    fn update(&mut self, segments: Vec<&mut [f64]>, grads: &[f64]) {
        let AdamConfig {
            learning_rate,
            beta1,
            beta2,
            epsilon,
        } = self.config;
        self.t += 1;
        let t = self.t as i32;
        let bc1 = 1.0 - beta1.powi(t);
        let bc2 = 1.0 - beta2.powi(t);
        let params = segments.into_iter().flat_map(|s| s.iter_mut());
        for (((x, g), m), v) in params.zip(grads).zip(&mut self.m).zip(&mut self.v) {
            *m = beta1 * *m + (1.0 - beta1) * g;
            *v = beta2 * *v + (1.0 - beta2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *x -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
        }
    }

    /// Applies one step to `model`. A non-finite gradient aborts the step
    /// before anything is modified.
    pub fn step(&mut self, model: &mut Model, grads: &GradientSet) -> Result<()> {
        if grads.len() != self.m.len() {
            return Err(Error::Dimension {
                expected: self.m.len(),
                got: grads.len(),
            });
        }
        grads.check_finite()?;
        let segments = model.segments_mut().into_iter().map(|(_, s)| s).collect();
        self.update(segments, &grads.values);
        Ok(())
    }
}

/// Adam on a flat coordinate vector.
pub fn adam_step(params: &mut [f64], grads: &[f64], state: &mut AdamState) -> Result<()> {
    if params.len() != grads.len() || grads.len() != state.m.len() {
        return Err(Error::Dimension {
            expected: state.m.len(),
            got: grads.len().min(params.len()),
        });
    }
    if let Some(index) = grads.iter().position(|g| !g.is_finite()) {
        return Err(Error::NonFiniteGradient {
            group: "params",
            index,
        });
    }
    state.update(vec![params], grads);
    Ok(())
}
