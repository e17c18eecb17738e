//! Central finite differences against the analytic gradients.

use rand::Rng;

use crate::error::Result;
use crate::grid::ComplexField;
use crate::loss::data_loss;
use crate::model::{HybridModel, ParamId};
use crate::spectrum::ComplexSpectrum;

/// Gradients smaller than this are compared in absolute terms.
pub const RELATIVE_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientProbe {
    pub id: ParamId,
    pub analytic: f64,
    pub numeric: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdReport {
    pub probes: Vec<GradientProbe>,
    pub max_relative_error: f64,
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(RELATIVE_FLOOR)
}

/// Single-sample objective `data_loss + c ||params||^2`.
pub fn sample_objective(model: &HybridModel, field: &ComplexField, label: &ComplexSpectrum, c: f64) -> Result<f64> {
    let pred = model.predict(field)?;
    Ok(data_loss(&pred, label, model.readout.head)?.0 + c * model.squared_norm())
}

/// Compares the analytic gradient of [`sample_objective`] with central
/// differences at `samples` random parameters.
pub fn finite_difference_check(
    model: &HybridModel,
    field: &ComplexField,
    label: &ComplexSpectrum,
    c: f64,
    step: f64,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<FdReport> {
    let ids: Vec<ParamId> = (0..samples).map(|_| model.random_param(rng)).collect();
    check_params(model, field, label, c, step, &ids)
}

pub fn check_params(model: &HybridModel, field: &ComplexField, label: &ComplexSpectrum, c: f64, step: f64, ids: &[ParamId]) -> Result<FdReport> {
    let (head, trace) = model.forward_trace(field)?;
    let (_, grad) = data_loss(&head, label, model.readout.head)?;
    let bundle = model.backward(&trace, &grad)?;
    let mut work = model.clone();
    let mut probes = Vec::with_capacity(ids.len());
    for &id in ids {
        let original = work.param(id);
        let analytic = bundle.get(id) + 2.0 * c * original;
        *work.param_mut(id) = original + step;
        let plus = sample_objective(&work, field, label, c)?;
        *work.param_mut(id) = original - step;
        let minus = sample_objective(&work, field, label, c)?;
        *work.param_mut(id) = original;
        let numeric = (plus - minus) / (2.0 * step);
        probes.push(GradientProbe {
            id,
            analytic,
            numeric,
            relative_error: relative_error(analytic, numeric),
        });
    }
    let max_relative_error = probes.iter().map(|p| p.relative_error).fold(0.0, f64::max);
    Ok(FdReport { probes, max_relative_error })
}
