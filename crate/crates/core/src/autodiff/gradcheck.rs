use rand::seq::index;

use crate::data::Batch;
use crate::error::{Error, Result};
use crate::model::Model;
use crate::rng;

use super::backward::{backward, batch_loss};
use super::params::ParameterSet;

fn relative_error(fd: f64, analytic: f64) -> f64 {
    (fd - analytic).abs() / (fd.abs() + analytic.abs()).max(1e-8)
}

fn check_step(h: f64) -> Result<()> {
    if !(1e-7..=1e-3).contains(&h) {
        return Err(Error::Config(format!("finite-difference step {h} outside [1e-7, 1e-3]")));
    }
    Ok(())
}

/// Central-difference estimate of `∂L/∂x_i` for the mean batch loss.
fn central_difference(model: &mut Model, params: &ParameterSet, batch: &Batch, i: usize, h: f64) -> Result<f64> {
    let mut probe = params.clone();
    probe.values[i] = params.values[i] + h;
    probe.apply_to(model)?;
    let plus = batch_loss(model, batch)?;
    probe.values[i] = params.values[i] - h;
    probe.apply_to(model)?;
    let minus = batch_loss(model, batch)?;
    params.apply_to(model)?;
    Ok((plus - minus) / (2.0 * h))
}

/// Compares analytic gradients with central differences on `sample` randomly
/// chosen coordinates and returns the largest relative error
/// `|fd − g| / max(1e-8, |fd| + |g|)`.
pub fn finite_diff_check(model: &Model, batch: &Batch, h: f64, sample: usize, seed: u64) -> Result<f64> {
    check_step(h)?;
    let params = ParameterSet::from_model(model);
    let (_, grads) = backward(model, batch)?;
    let count = sample.min(params.len());
    if count == 0 {
        log::warn!("finite-difference check with no sampled coordinates");
        return Ok(0.0);
    }
    let mut rng = rng::stream(seed, rng::STREAM_GRADCHECK);
    let coords = index::sample(&mut rng, params.len(), count);
    check_coordinates(model, &params, batch, h, coords.iter(), &grads.values)
}

/// As [`finite_diff_check`] but samples up to `sample` coordinates from every
/// parameter group separately, returning the worst error per group.
pub fn finite_diff_check_groups(
    model: &Model,
    batch: &Batch,
    h: f64,
    sample: usize,
    seed: u64,
) -> Result<Vec<(&'static str, f64)>> {
    check_step(h)?;
    let params = ParameterSet::from_model(model);
    let (_, grads) = backward(model, batch)?;
    let mut rng = rng::stream(seed, rng::STREAM_GRADCHECK);
    let mut out = Vec::new();
    for g in &params.groups {
        let len = g.range.len();
        let picks = index::sample(&mut rng, len, sample.min(len));
        let coords = picks.iter().map(|k| g.range.start + k);
        out.push((g.name, check_coordinates(model, &params, batch, h, coords, &grads.values)?));
    }
    Ok(out)
}

fn check_coordinates(
    model: &Model,
    params: &ParameterSet,
    batch: &Batch,
    h: f64,
    coords: impl Iterator<Item = usize>,
    analytic: &[f64],
) -> Result<f64> {
    let mut probe_model = model.clone();
    let mut worst = 0.0f64;
    for i in coords {
        let fd = central_difference(&mut probe_model, params, batch, i, h)?;
        worst = worst.max(relative_error(fd, analytic[i]));
    }
    Ok(worst)
}

/// Checker against a caller-supplied gradient; used to test the checker itself.
pub fn finite_diff_check_against(
    model: &Model,
    batch: &Batch,
    analytic: &[f64],
    h: f64,
    coords: &[usize],
) -> Result<f64> {
    check_step(h)?;
    let params = ParameterSet::from_model(model);
    check_coordinates(model, &params, batch, h, coords.iter().copied(), analytic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Example;
    use crate::model::{ModelConfig, ModelKind};

    fn small_batch() -> Batch {
        let examples = vec![
            Example { tokens: vec![2, 3, 4], label: 1 },
            Example { tokens: vec![5], label: 0 },
            Example { tokens: vec![6, 3, 3, 7], label: 1 },
            Example { tokens: vec![8, 9], label: 0 },
        ];
        Batch::from_examples(examples.iter().enumerate())
    }

    #[test]
    fn analytic_gradients_pass_for_every_kind() {
        for kind in ModelKind::ALL {
            let mut config = ModelConfig::new(kind, 6, 10, 17);
            config.r = 2;
            let m = Model::init(config).unwrap();
            let err = finite_diff_check(&m, &small_batch(), 1e-5, 200, 1).unwrap();
            assert!(err <= 1e-4, "{kind}: {err}");
        }
    }

    #[test]
    fn zeroed_gradient_is_caught() {
        let m = Model::init(ModelConfig::new(ModelKind::CeMix, 6, 10, 3)).unwrap();
        let b = small_batch();
        let (_, g) = backward(&m, &b).unwrap();
        let i = g.values.iter().position(|&x| x.abs() > 1e-4).unwrap();
        let zeros = vec![0.0; g.len()];
        let err = finite_diff_check_against(&m, &b, &zeros, 1e-5, &[i]).unwrap();
        assert!((err - 1.0).abs() < 1e-6, "{err}");
    }

    #[test]
    fn empty_sample_is_vacuous() {
        let m = Model::init(ModelConfig::new(ModelKind::CeSup, 4, 10, 3)).unwrap();
        assert_eq!(finite_diff_check(&m, &small_batch(), 1e-5, 0, 0).unwrap(), 0.0);
    }

    #[test]
    fn step_size_is_validated() {
        let m = Model::init(ModelConfig::new(ModelKind::CeSup, 4, 10, 3)).unwrap();
        assert!(finite_diff_check(&m, &small_batch(), 0.1, 5, 0).is_err());
    }
}
