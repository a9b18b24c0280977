use crate::clinalg::{inner_slices, Complex, ComplexVector, ComplexMatrix};
use crate::data::Batch;
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::model::{
    sigmoid, superpose_clamped, uniform_weights, FactoredProjector, Model, ModelKind, Scorer,
    SUPERPOSITION_NORM_FLOOR,
};

use super::loss::{bce_grad, bce_loss};
use super::params::GradientSet;

/// Gradient contribution of one sentence, already scaled by `1/batch`.
struct ItemGrad {
    loss: f64,
    /// `(token, gradient of its raw row)` in the flat real layout of the row.
    rows: Vec<(u32, Vec<f64>)>,
    /// Projector factor gradient (complex kinds) or `[w.., b]` (real baseline).
    head: Vec<f64>,
}

/// Mean batch loss from the forward pass alone.
pub fn batch_loss(model: &Model, batch: &Batch) -> Result<f64> {
    let scorer = model.scorer()?;
    let mut total = 0.0;
    for i in 0..batch.len() {
        let p = scorer
            .probability(batch.sentence(i))
            .map_err(|e| e.in_sentence(batch.indices[i]))?;
        total += bce_loss(p, batch.labels[i]);
    }
    Ok(total / batch.len() as f64)
}

/// Mean batch loss and its gradient with respect to every parameter coordinate.
pub fn backward(model: &Model, batch: &Batch) -> Result<(f64, GradientSet)> {
    backward_with(model, batch, &Executor::sequential())
}

/// As [`backward`], computing per-sentence terms on `exec`. The reduction is
/// performed in batch order, so the result does not depend on the job count.
pub fn backward_with(model: &Model, batch: &Batch, exec: &Executor) -> Result<(f64, GradientSet)> {
    if batch.is_empty() {
        return Err(Error::Config("empty batch".into()));
    }
    let scorer = model.scorer()?;
    let scale = 1.0 / batch.len() as f64;
    let items = exec.map(batch.len(), |i| {
        item_gradient(&scorer, batch.sentence(i), batch.labels[i], scale)
            .map_err(|e| e.in_sentence(batch.indices[i]))
    });

    let mut grads = GradientSet::zeros_like(model);
    let n = model.config().n;
    let (row_width, head_group) = match model.kind() {
        ModelKind::RealEmbed => (n, None),
        _ => (2 * n, Some("projector")),
    };
    let mut loss = 0.0;
    for item in items {
        let item = item?;
        loss += item.loss;
        let table = grads.group_mut("embedding");
        for (id, g) in &item.rows {
            let start = *id as usize * row_width;
            for (dst, src) in table[start..start + row_width].iter_mut().zip(g) {
                *dst += src;
            }
        }
        match head_group {
            Some(name) => add_into(grads.group_mut(name), &item.head),
            None => {
                add_into(grads.group_mut("head_weights"), &item.head[..n]);
                grads.group_mut("head_bias")[0] += item.head[n];
            }
        }
    }
    Ok((loss, grads))
}

fn add_into(dst: &mut [f64], src: &[f64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

fn item_gradient(scorer: &Scorer<'_>, tokens: &[u32], label: u8, scale: f64) -> Result<ItemGrad> {
    if tokens.is_empty() {
        return Err(Error::EmptySentence);
    }
    let model = scorer.model();
    match model.kind() {
        ModelKind::RealEmbed => real_item(model, tokens, label, scale),
        kind => {
            let projector = scorer
                .factored_projector()
                .expect("complex models carry a projector");
            complex_item(scorer, projector, kind, tokens, label, scale)
        }
    }
}

/// `G += coef · (s − Pv) cᴴ`, accumulated into the interleaved n×r layout.
fn accumulate_projector_grad(
    g: &mut [f64],
    coef: f64,
    residual: &ComplexVector,
    coefficients: &ComplexVector,
) {
    let r = coefficients.len();
    for (j, res) in residual.iter().enumerate() {
        let row = &mut g[2 * j * r..2 * (j + 1) * r];
        for (k, ck) in coefficients.iter().enumerate() {
            let v = res * ck.conj() * coef;
            row[2 * k] += v.re;
            row[2 * k + 1] += v.im;
        }
    }
}

/// Pulls a gradient on the unit state `t = z/‖z‖` back to the raw row `z`.
fn through_normalization(t: &ComplexVector, g_t: &ComplexVector, norm: f64) -> Vec<f64> {
    let radial = inner_slices(t.as_slice(), g_t.as_slice()).re;
    let mut out = Vec::with_capacity(2 * t.len());
    for (tk, gk) in t.iter().zip(g_t.iter()) {
        let v = (gk - tk * radial) / norm;
        out.push(v.re);
        out.push(v.im);
    }
    out
}

fn complex_item(
    scorer: &Scorer<'_>,
    projector: &FactoredProjector<'_>,
    kind: ModelKind,
    tokens: &[u32],
    label: u8,
    scale: f64,
) -> Result<ItemGrad> {
    let table = scorer.model().complex_table().expect("complex table");
    let q: &ComplexMatrix = projector.factor_matrix();
    let (n, r) = (q.rows(), q.cols());
    let states = scorer.word_states(tokens)?;
    let weights = uniform_weights(tokens.len());
    let mut head = vec![0.0; 2 * n * r];

    // gradient on each word's unit state, filled per composition rule
    let mut g_states: Vec<ComplexVector> = Vec::with_capacity(tokens.len());
    let loss;

    match kind {
        ModelKind::CeMix => {
            let measurements = states
                .iter()
                .map(|t| projector.measure(t.vector()))
                .collect::<Result<Vec<_>>>()?;
            let p_raw: f64 = measurements
                .iter()
                .zip(&weights)
                .map(|(m, w)| w * m.probability)
                .sum();
            let p = p_raw.clamp(0.0, 1.0);
            loss = bce_loss(p, label) * scale;
            let g_p = bce_grad(p, label) * scale;
            for ((t, m), &w) in states.iter().zip(&measurements).zip(&weights) {
                let coef = 2.0 * w * g_p;
                g_states.push(m.projected.scale(coef));
                let residual = t.vector().sub(&m.projected)?;
                accumulate_projector_grad(&mut head, coef, &residual, &m.coefficients);
            }
        }
        _ => {
            let (s, denom, clamped) = superpose_clamped(&states, &weights, SUPERPOSITION_NORM_FLOOR);
            let m = projector.measure(&s)?;
            let p = m.probability.clamp(0.0, 1.0);
            loss = bce_loss(p, label) * scale;
            let g_p = bce_grad(p, label) * scale;
            let g_s = m.projected.scale(2.0 * g_p);
            let residual = s.sub(&m.projected)?;
            accumulate_projector_grad(&mut head, 2.0 * g_p, &residual, &m.coefficients);
            // through S = u / max(‖u‖, floor)
            let g_u = if clamped {
                g_s.scale(1.0 / denom)
            } else {
                let radial = inner_slices(s.as_slice(), g_s.as_slice()).re;
                let mut g = g_s;
                g.axpy(Complex::new(-radial, 0.0), &s)?;
                g.scale(1.0 / denom)
            };
            for &w in &weights {
                g_states.push(g_u.scale(w));
            }
        }
    }

    let rows = tokens
        .iter()
        .zip(states.iter().zip(&g_states))
        .map(|(&id, (t, g_t))| {
            let norm = table.row_norm(id as usize);
            (id, through_normalization(t.vector(), g_t, norm))
        })
        .collect();
    Ok(ItemGrad { loss, rows, head })
}

fn real_item(model: &Model, tokens: &[u32], label: u8, scale: f64) -> Result<ItemGrad> {
    let table = model.real_table().expect("real table");
    let head_params = model.linear_head().expect("linear head");
    let n = table.dim();
    let m = tokens.len() as f64;
    let mut mean = vec![0.0; n];
    for &id in tokens {
        for (acc, x) in mean.iter_mut().zip(table.row(id as usize)?) {
            *acc += x / m;
        }
    }
    let logit = head_params.logit(&mean)?;
    let p = sigmoid(logit);
    let loss = bce_loss(p, label) * scale;
    let g_logit = bce_grad(p, label) * scale * p * (1.0 - p);

    let mut head: Vec<f64> = mean.iter().map(|x| g_logit * x).collect();
    head.push(g_logit);
    let row_grad: Vec<f64> = head_params.weights.iter().map(|w| g_logit * w / m).collect();
    let rows = tokens.iter().map(|&id| (id, row_grad.clone())).collect();
    Ok(ItemGrad { loss, rows, head })
}
