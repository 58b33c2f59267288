//! Break-even thresholds.
//!
//! Each closed form solves one pairwise cost comparison for a single unknown:
//! the usability rate at which a model starts to pay, the detection rate that
//! deters api use, or the campaign size at which a fixed cost is recovered.
//! [`bisection_check`] solves the same comparisons numerically and is used
//! to cross-check every closed form.

use serde::Serialize;

use crate::cost::{manual_marginal_cost, ModelConfig, ModelKind};
use crate::params::ParamDraw;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    PHatManual,
    PHatVsOpen,
    LambdaHatManual,
    LambdaHatOpen,
    NHat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Bisection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub value: f64,
    pub quantity: Quantity,
    pub method: Method,
    /// A negative solution was reported as 0: already deterred or viable.
    pub clamped: bool,
    /// A rate threshold above 1: no achievable performance pays.
    pub unattainable: bool,
}

impl ThresholdResult {
    fn closed(quantity: Quantity, raw: f64) -> Self {
        let clamped = raw < 0.0;
        let value = if clamped { 0.0 } else { raw };
        let unattainable = matches!(quantity, Quantity::PHatManual | Quantity::PHatVsOpen) && value > 1.0;
        ThresholdResult {
            value,
            quantity,
            method: Method::ClosedForm,
            clamped,
            unattainable,
        }
    }
}

fn check_rate(name: &str, p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must lie in (0, 1], got {p}")))
    }
}

/// Usability rate above which a monitored api model beats manual authorship:
/// `1/alpha + (L/w)(IC + (P + surcharge) lambda)`.
pub fn p_hat_manual(d: &ParamDraw, lambda: f64, surcharge: f64) -> ThresholdResult {
    let raw = 1.0 / d.alpha + d.l / d.w * (d.ic + (d.penalty + surcharge) * lambda);
    ThresholdResult::closed(Quantity::PHatManual, raw)
}

/// Api usability rate at which the api model and an open-source model with
/// rate `p2` and fixed cost `fixed_cost` cost the same over `n` outputs.
pub fn p_hat_vs_open(d: &ParamDraw, p2: f64, lambda: f64, fixed_cost: f64, n: f64) -> Result<ThresholdResult> {
    check_rate("p2", p2)?;
    if !(n >= 1.0) {
        return Err(Error::domain(format!("n must be at least 1, got {n}")));
    }
    let raw = p2 + (p2 * d.penalty * lambda - fixed_cost / n) / d.review_cost();
    Ok(ThresholdResult::closed(Quantity::PHatVsOpen, raw))
}

/// Smallest detection rate that pushes an api user with rate `p1` back to
/// manual authorship.
pub fn lambda_hat_manual(d: &ParamDraw, p1: f64) -> Result<ThresholdResult> {
    check_rate("p1", p1)?;
    if d.penalty <= 0.0 {
        return Err(Error::UndefinedThreshold);
    }
    let raw = (d.w * p1 / d.l - d.review_cost()) / d.penalty;
    Ok(ThresholdResult::closed(Quantity::LambdaHatManual, raw))
}

/// Smallest detection rate that pushes an api user with rate `p1` onto an
/// open-source model with rate `p2` and fixed cost `fixed_cost`.
pub fn lambda_hat_open(d: &ParamDraw, p1: f64, p2: f64, fixed_cost: f64, n: f64) -> Result<ThresholdResult> {
    check_rate("p1", p1)?;
    check_rate("p2", p2)?;
    if !(n >= 1.0) {
        return Err(Error::domain(format!("n must be at least 1, got {n}")));
    }
    if d.penalty <= 0.0 {
        return Err(Error::UndefinedThreshold);
    }
    let raw = d.review_cost() * (p1 - p2) / p2 / d.penalty + p1 * fixed_cost / (n * d.penalty);
    Ok(ThresholdResult::closed(Quantity::LambdaHatOpen, raw))
}

/// Break-even campaign size of a new local model (rate `p_target`, total
/// fixed cost `fixed_cost`) against one competitor.
///
/// The fixed cost that must be recovered is `fixed_cost` minus whatever the
/// competitor already costs up front, so an open-source competitor that was
/// fine-tuned for `FC2` is beaten once `fixed_cost - FC2` is recovered.
pub fn break_even_scale(d: &ParamDraw, p_target: f64, fixed_cost: f64, competitor: &ModelConfig) -> Result<f64> {
    let b = d.review_cost();
    let delta = fixed_cost - competitor.effective_fixed_cost();
    let (numerator_rate, denominator) = match competitor.kind {
        ModelKind::Manual => (p_target, p_target * manual_marginal_cost(d) - b),
        ModelKind::Api => {
            let p1 = competitor.p;
            (
                p_target * p1,
                p_target * competitor.penalty(d) * competitor.lambda + (p_target - p1) * b,
            )
        }
        ModelKind::OpenSource => {
            let p2 = competitor.p;
            (p_target * p2, (p_target - p2) * b)
        }
    };
    if !(denominator > 0.0) {
        return Err(Error::NeverViable {
            competitor: competitor.name.clone(),
        });
    }
    Ok((numerator_rate * delta / denominator).max(0.0))
}

/// Minimum viable scale: the largest break-even size over all competitors.
pub fn min_viable_scale(
    d: &ParamDraw,
    p_target: f64,
    fixed_cost: f64,
    competitors: &[ModelConfig],
) -> Result<ThresholdResult> {
    check_rate("p_target", p_target)?;
    if !(fixed_cost > 0.0) {
        return Err(Error::domain(format!("fixed cost must be positive, got {fixed_cost}")));
    }
    if competitors.is_empty() {
        return Err(Error::domain("minimum viable scale needs at least one competitor"));
    }
    let mut best = 0.0f64;
    for c in competitors {
        c.validate()?;
        best = best.max(break_even_scale(d, p_target, fixed_cost, c)?);
    }
    Ok(ThresholdResult::closed(Quantity::NHat, best))
}

/// Root of a monotone function on `[lo, hi]` by bisection.
///
/// Stops once the bracket is narrower than `tol` relative to its larger
/// endpoint, or when the midpoint can no longer be split. Exact zeros at an
/// endpoint are returned immediately.
pub fn bisection_check<F: Fn(f64) -> f64>(gap: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (gap(a), gap(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.signum() != fb.signum()) || fa.is_nan() || fb.is_nan() {
        return Err(Error::Bracket { lo, hi });
    }
    for _ in 0..2000 {
        let mid = 0.5 * (a + b);
        if b - a <= tol * a.abs().max(b.abs()) || mid == a || mid == b {
            break;
        }
        let fm = gap(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Bisection on a bracket that is grown geometrically from `[lo, lo + step]`
/// until the sign changes or `max` is exceeded.
pub fn bisection_expanding<F: Fn(f64) -> f64>(gap: F, lo: f64, step: f64, max: f64, tol: f64) -> Result<f64> {
    let f_lo = gap(lo);
    let mut hi = lo + step;
    while hi <= max {
        let f_hi = gap(hi);
        if f_hi == 0.0 || f_hi.signum() != f_lo.signum() {
            return bisection_check(&gap, lo, hi, tol);
        }
        hi = lo + (hi - lo) * 2.0;
    }
    Err(Error::Bracket { lo, hi: max })
}

/// Common detection rate at which two monitored api options cost the same
/// per usable output, found by bisection over `[0, 1]`.
///
/// The options' own `lambda` fields are ignored: both are assumed to sit
/// behind the same monitoring.
pub fn api_indifference_lambda(d: &ParamDraw, a: &ModelConfig, b: &ModelConfig, tol: f64) -> Result<f64> {
    for m in [a, b] {
        m.validate()?;
        if m.kind != ModelKind::Api {
            return Err(Error::domain(format!("option `{}` is not an api model", m.name)));
        }
    }
    let per_usable = |m: &ModelConfig, lambda: f64| (d.review_cost() + m.penalty(d) * lambda) / m.p;
    bisection_check(|l| per_usable(a, l) - per_usable(b, l), 0.0, 1.0, tol)
}
