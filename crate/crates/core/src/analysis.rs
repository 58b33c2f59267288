//! Monte Carlo estimators: the six headline metrics, the fixed-cost
//! scenario checks, one-at-a-time sensitivity, and the figure datasets.
//!
//! Every 95% interval is the [2.5%, 97.5%] percentile range of the metric's
//! Monte Carlo distribution. Nothing is resampled.

use std::fmt;
use std::str::FromStr;

use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{
    automation_payback_outputs, cumulative_savings_surface, manual_marginal_cost, monitoring_imposition,
    per_output_savings, realized_imposition, ModelConfig,
};
use crate::params::{sample, Param, ParamDraw, ParamRanges, SampleSet};
use crate::rng::{self, domain};
use crate::stats;
use crate::threshold::{
    api_indifference_lambda, lambda_hat_manual, lambda_hat_open, min_viable_scale, p_hat_manual,
};
use crate::{Error, Result};

/// Headline metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Usability rate above which a team beats manual authorship.
    ThresholdP,
    /// Campaign savings of an unmonitored team over manual authorship.
    MaxSavings,
    /// Detection rate that deters api use when the fallback is manual.
    DeterrentLambda,
    /// Most that monitoring can impose when an open-source fallback exists.
    MaxImpositionOpen,
    /// Scale at which a fine-tuned local model beats an equal api model.
    MinScaleFinetune,
    /// Scale at which training from scratch beats the fine-tuned model.
    MinScaleTraining,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    Rate,
    Usd,
    DetectionsPerOutput,
    Outputs,
}

impl Unit {
    pub fn id(self) -> &'static str {
        match self {
            Unit::Rate => "rate",
            Unit::Usd => "USD",
            Unit::DetectionsPerOutput => "detections/output",
            Unit::Outputs => "outputs",
        }
    }
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::ThresholdP,
        Metric::MaxSavings,
        Metric::DeterrentLambda,
        Metric::MaxImpositionOpen,
        Metric::MinScaleFinetune,
        Metric::MinScaleTraining,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Metric::ThresholdP => "threshold_p",
            Metric::MaxSavings => "max_savings",
            Metric::DeterrentLambda => "deterrent_lambda",
            Metric::MaxImpositionOpen => "max_imposition_open",
            Metric::MinScaleFinetune => "min_scale_finetune",
            Metric::MinScaleTraining => "min_scale_training",
        }
    }

    pub fn unit(self) -> Unit {
        match self {
            Metric::ThresholdP => Unit::Rate,
            Metric::MaxSavings | Metric::MaxImpositionOpen => Unit::Usd,
            Metric::DeterrentLambda => Unit::DetectionsPerOutput,
            Metric::MinScaleFinetune | Metric::MinScaleTraining => Unit::Outputs,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.id() == s)
            .ok_or_else(|| Error::domain(format!("unknown metric `{s}`")))
    }
}

/// Fixed scenario inputs behind the headline metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeadlineConstants {
    /// Team usability rate for the savings metric.
    pub team_p: f64,
    pub savings_n: f64,
    /// Api usability rate for the deterrent-rate metric.
    pub deterrent_p1: f64,
    pub imposition_p1: f64,
    pub imposition_p2: f64,
    pub imposition_n: f64,
    /// Fixed cost of the open-source fallback in the imposition metric.
    pub open_fixed_cost: f64,
    /// Usability rate shared by the fine-tuned model and the cheaper api model.
    pub finetune_p: f64,
    pub finetune_fixed_cost: f64,
    pub finetune_api_lambda: f64,
    /// Rate and total fixed cost of a model trained from scratch.
    pub training_p: f64,
    pub training_fixed_cost: f64,
    /// Rate and per-detection surcharge of the premium api model.
    pub premium_p: f64,
    pub premium_surcharge: f64,
}

impl Default for HeadlineConstants {
    fn default() -> Self {
        HeadlineConstants {
            team_p: 0.75,
            savings_n: 1e7,
            deterrent_p1: 0.75,
            imposition_p1: 0.75,
            imposition_p2: 0.70,
            imposition_n: 1e7,
            open_fixed_cost: 0.0,
            finetune_p: 0.85,
            finetune_fixed_cost: 600.0,
            finetune_api_lambda: 0.001,
            training_p: 1.0,
            training_fixed_cost: 4.6e6,
            premium_p: 1.0,
            premium_surcharge: 20.0,
        }
    }
}

impl HeadlineConstants {
    fn finetuned(&self) -> ModelConfig {
        ModelConfig::open_source("finetuned", self.finetune_p, self.finetune_fixed_cost)
    }

    fn standard_api(&self, lambda: f64) -> ModelConfig {
        ModelConfig::api("standard_api", self.finetune_p, lambda)
    }

    fn premium_api(&self, lambda: f64) -> ModelConfig {
        ModelConfig::api("premium_api", self.premium_p, lambda).with_surcharge(self.premium_surcharge)
    }
}

/// Value of `metric` for one draw.
pub fn metric_value(metric: Metric, d: &ParamDraw, c: &HeadlineConstants) -> Result<f64> {
    Ok(match metric {
        Metric::ThresholdP => p_hat_manual(d, 0.0, 0.0).value,
        Metric::MaxSavings => c.savings_n * per_output_savings(d, c.team_p)?,
        Metric::DeterrentLambda => lambda_hat_manual(d, c.deterrent_p1)?.value,
        Metric::MaxImpositionOpen => {
            let lambda = lambda_hat_open(d, c.imposition_p1, c.imposition_p2, c.open_fixed_cost, c.imposition_n)?.value;
            d.penalty * lambda * c.imposition_n / c.imposition_p1
        }
        Metric::MinScaleFinetune => {
            let api = c.standard_api(c.finetune_api_lambda);
            min_viable_scale(d, c.finetune_p, c.finetune_fixed_cost, &[api])?.value
        }
        Metric::MinScaleTraining => {
            min_viable_scale(d, c.training_p, c.training_fixed_cost, &[c.finetuned()])?.value
        }
    })
}

/// Per-draw values of `metric`, in sample order.
pub fn metric_values(metric: Metric, samples: &SampleSet, c: &HeadlineConstants) -> Result<Vec<f64>> {
    samples.draws().par_iter().map(|d| metric_value(metric, d, c)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateSummary {
    pub metric: String,
    pub mean: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub sample_count: usize,
    pub unit: Unit,
}

/// Mean and 95% percentile interval of `values`.
pub fn summarize(metric: impl Into<String>, unit: Unit, values: &[f64]) -> EstimateSummary {
    let q = stats::quantiles(values, &[0.025, 0.975]);
    EstimateSummary {
        metric: metric.into(),
        mean: stats::mean(values),
        ci_lo: q[0],
        ci_hi: q[1],
        sample_count: values.len(),
        unit,
    }
}

pub fn headline_estimates(samples: &SampleSet, c: &HeadlineConstants) -> Result<Vec<EstimateSummary>> {
    Metric::ALL
        .iter()
        .map(|&m| Ok(summarize(m.id(), m.unit(), &metric_values(m, samples, c)?)))
        .collect()
}

/// The imposition metric under three constructions: raw outputs counted as
/// `n / p1` (the primary estimator), as `n / p2`, and with a Poisson-drawn
/// detection count at the deterrent rate in place of its expectation.
pub fn imposition_estimators(samples: &SampleSet, c: &HeadlineConstants) -> Result<Vec<EstimateSummary>> {
    let per_draw: Vec<[f64; 3]> = samples
        .draws()
        .par_iter()
        .enumerate()
        .map(|(i, d)| {
            let lambda = lambda_hat_open(d, c.imposition_p1, c.imposition_p2, c.open_fixed_cost, c.imposition_n)?.value;
            let primary = d.penalty * lambda * c.imposition_n / c.imposition_p1;
            let alt_p2 = d.penalty * lambda * c.imposition_n / c.imposition_p2;
            let mean_detections = lambda * c.imposition_n / c.imposition_p1;
            let detections = if mean_detections > 0.0 {
                let mut g = rng::stream(samples.seed(), &[domain::IMPOSITION, i as u64]);
                Poisson::new(mean_detections)
                    .map_err(|e| Error::domain(e.to_string()))?
                    .sample(&mut g)
            } else {
                0.0
            };
            Ok([primary, alt_p2, d.penalty * detections])
        })
        .collect::<Result<_>>()?;
    let column = |k: usize| per_draw.iter().map(|v| v[k]).collect::<Vec<_>>();
    Ok(vec![
        summarize(Metric::MaxImpositionOpen.id(), Unit::Usd, &column(0)),
        summarize("max_imposition_open_n_over_p2", Unit::Usd, &column(1)),
        summarize("max_imposition_open_realized", Unit::Usd, &column(2)),
    ])
}

/// Results of the fixed-cost scenarios: two api tiers, a cheap fine-tune,
/// and training from scratch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedCostScenarios {
    /// Common detection rate above which the standard api tier beats the
    /// premium tier.
    pub premium_indifference_lambda: EstimateSummary,
    /// Break-even scale of the fine-tuned model against the api tiers at
    /// that detection rate.
    pub finetune_vs_api: EstimateSummary,
    /// Break-even scale of a from-scratch model against the api tiers only.
    pub training_vs_api: EstimateSummary,
    /// Full-automation payback in multiples of the fixed cost, evaluated at
    /// the sample means of `w/L` and `IC`.
    pub payback_multiple: f64,
}

pub fn fixed_cost_scenarios(samples: &SampleSet, c: &HeadlineConstants) -> Result<FixedCostScenarios> {
    let rows: Vec<[f64; 3]> = samples
        .draws()
        .par_iter()
        .map(|d| {
            let lambda = api_indifference_lambda(d, &c.standard_api(0.0), &c.premium_api(0.0), 1e-13)?;
            let tiers = [c.standard_api(lambda), c.premium_api(lambda)];
            let finetune = min_viable_scale(d, c.finetune_p, c.finetune_fixed_cost, &tiers)?.value;
            let training = min_viable_scale(d, c.training_p, c.training_fixed_cost, &tiers)?.value;
            Ok([lambda, finetune, training])
        })
        .collect::<Result<_>>()?;
    let column = |k: usize| rows.iter().map(|v| v[k]).collect::<Vec<_>>();
    let mean_manual = stats::mean(&samples.draws().iter().map(manual_marginal_cost).collect::<Vec<_>>());
    let mean_ic = stats::mean(&samples.draws().iter().map(|d| d.ic).collect::<Vec<_>>());
    let e_draw = ParamDraw::new(1.0, mean_manual, 1.0, mean_ic, 1.0)?;
    Ok(FixedCostScenarios {
        premium_indifference_lambda: summarize("premium_indifference_lambda", Unit::DetectionsPerOutput, &column(0)),
        finetune_vs_api: summarize("finetune_vs_api", Unit::Outputs, &column(1)),
        training_vs_api: summarize("training_vs_api", Unit::Outputs, &column(2)),
        payback_multiple: automation_payback_outputs(&e_draw, 1.0)?,
    })
}

/// Mean per-draw relative cut in per-output cost from switching to a team.
pub fn mean_relative_reduction(samples: &SampleSet, p: f64) -> Result<f64> {
    let values = samples
        .draws()
        .iter()
        .map(|d| Ok(per_output_savings(d, p)? / manual_marginal_cost(d)))
        .collect::<Result<Vec<_>>>()?;
    Ok(stats::mean(&values))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Varied {
    Param(Param),
    All,
}

impl Varied {
    pub const ALL: [Varied; 6] = [
        Varied::Param(Param::Alpha),
        Varied::Param(Param::W),
        Varied::Param(Param::L),
        Varied::Param(Param::Ic),
        Varied::Param(Param::Penalty),
        Varied::All,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Varied::Param(p) => p.id(),
            Varied::All => "all",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityRow {
    pub varied: Varied,
    pub metric: Metric,
    pub q0: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub q100: f64,
}

impl SensitivityRow {
    pub fn iqr(&self) -> f64 {
        self.q75 - self.q25
    }
}

/// One row per parameter, sampled alone with every other parameter at its
/// midpoint, plus a jointly sampled `all` row. Row `k` uses the seed
/// `derive_key(seed, [SENSITIVITY, k])`.
pub fn sensitivity(
    metric: Metric,
    ranges: &ParamRanges,
    count: usize,
    seed: u64,
    c: &HeadlineConstants,
) -> Result<Vec<SensitivityRow>> {
    Varied::ALL
        .iter()
        .enumerate()
        .map(|(k, &varied)| {
            let row_ranges = match varied {
                Varied::Param(p) => ranges.pinned_except(p),
                Varied::All => *ranges,
            };
            let row_seed = rng::derive_key(seed, &[domain::SENSITIVITY, k as u64]);
            let s = sample(&row_ranges, count, row_seed)?;
            let q = stats::quantiles(&metric_values(metric, &s, c)?, &[0.0, 0.25, 0.5, 0.75, 1.0]);
            Ok(SensitivityRow {
                varied,
                metric,
                q0: q[0],
                q25: q[1],
                q50: q[2],
                q75: q[3],
                q100: q[4],
            })
        })
        .collect()
}

/// Per-output savings curve summary at one usability rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SavingsPoint {
    pub p: f64,
    pub mean: f64,
    pub q25: f64,
    pub q75: f64,
}

pub fn savings_curve(samples: &SampleSet, p_grid: &[f64]) -> Result<Vec<SavingsPoint>> {
    p_grid
        .iter()
        .map(|&p| {
            let v = samples
                .draws()
                .iter()
                .map(|d| per_output_savings(d, p))
                .collect::<Result<Vec<_>>>()?;
            let q = stats::quantiles(&v, &[0.25, 0.75]);
            Ok(SavingsPoint {
                p,
                mean: stats::mean(&v),
                q25: q[0],
                q75: q[1],
            })
        })
        .collect()
}

/// Break-even usability rate of every draw, in sample order.
pub fn break_even_distribution(samples: &SampleSet) -> Vec<f64> {
    samples.draws().iter().map(|d| p_hat_manual(d, 0.0, 0.0).value).collect()
}

/// `(n, p, mean cumulative savings)` triples in row-major order.
pub fn cumulative_savings_rows(samples: &SampleSet, p_grid: &[f64], n_grid: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    let surface = cumulative_savings_surface(p_grid, n_grid, samples)?;
    Ok(n_grid
        .iter()
        .zip(&surface)
        .flat_map(|(&n, row)| p_grid.iter().zip(row).map(move |(&p, &v)| (n, p, v)))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionMode {
    /// Detections at their expectation `lambda n / p`.
    Expected,
    /// Detections drawn from `Poisson(lambda n / p)`.
    Realized,
}

impl DetectionMode {
    pub fn id(self) -> &'static str {
        match self {
            DetectionMode::Expected => "expected",
            DetectionMode::Realized => "realized",
        }
    }
}

/// Cost imposed by monitoring at one `(p, lambda)` point across the samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhasePoint {
    pub p: f64,
    pub lambda: f64,
    pub mode: DetectionMode,
    pub imposed_mean: f64,
    pub imposed_q25: f64,
    pub imposed_q50: f64,
    pub imposed_q75: f64,
    pub cap_mean: f64,
    /// Fraction of draws whose imposition has reached its cap.
    pub share_at_cap: f64,
}

/// Imposed cost at each detection rate for a fixed usability rate.
///
/// Realized detections for draw `i` at grid index `k` come from the stream
/// `(samples.seed, PHASE, p.to_bits(), k, i)`.
pub fn phase_curve(samples: &SampleSet, p: f64, lambdas: &[f64], n: f64, mode: DetectionMode) -> Result<Vec<PhasePoint>> {
    lambdas
        .iter()
        .enumerate()
        .map(|(k, &lambda)| {
            let pairs = samples
                .draws()
                .par_iter()
                .enumerate()
                .map(|(i, d)| match mode {
                    DetectionMode::Expected => monitoring_imposition(n, d, p, lambda),
                    DetectionMode::Realized => {
                        let mean = lambda * n / p;
                        let detections = if mean > 0.0 {
                            let mut g = rng::stream(samples.seed(), &[domain::PHASE, p.to_bits(), k as u64, i as u64]);
                            Poisson::new(mean).map_err(|e| Error::domain(e.to_string()))?.sample(&mut g) as u64
                        } else {
                            0
                        };
                        realized_imposition(n, d, p, detections)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let imposed: Vec<f64> = pairs.iter().map(|x| x.imposed).collect();
            let caps: Vec<f64> = pairs.iter().map(|x| x.cap).collect();
            let q = stats::quantiles(&imposed, &[0.25, 0.5, 0.75]);
            let at_cap = pairs.iter().filter(|x| x.imposed >= x.cap).count();
            Ok(PhasePoint {
                p,
                lambda,
                mode,
                imposed_mean: stats::mean(&imposed),
                imposed_q25: q[0],
                imposed_q50: q[1],
                imposed_q75: q[2],
                cap_mean: stats::mean(&caps),
                share_at_cap: at_cap as f64 / pairs.len() as f64,
            })
        })
        .collect()
}

/// One row of the comparison against published values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PublishedCheck {
    pub check: String,
    pub observed: f64,
    pub published: f64,
    pub lower: f64,
    pub upper: f64,
    pub pass: bool,
}

impl PublishedCheck {
    fn band(check: impl Into<String>, observed: f64, published: f64, lower: f64, upper: f64) -> Self {
        PublishedCheck {
            check: check.into(),
            observed,
            published,
            lower,
            upper,
            pass: observed >= lower && observed <= upper,
        }
    }

    fn relative(check: impl Into<String>, observed: f64, published: f64, tol: f64) -> Self {
        Self::band(check, observed, published, published * (1.0 - tol), published * (1.0 + tol))
    }
}

/// Everything the comparison table needs, computed from one sample set.
pub fn published_checks(samples: &SampleSet, c: &HeadlineConstants) -> Result<Vec<PublishedCheck>> {
    let mut out = Vec::new();
    let manual: Vec<f64> = samples.draws().iter().map(manual_marginal_cost).collect();
    out.push(PublishedCheck::band("manual_cost_mean", stats::mean(&manual), 0.44, 0.42, 0.46));
    let lo = manual.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = manual.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    out.push(PublishedCheck::band("manual_cost_min", lo, 0.06, 0.0564, f64::INFINITY));
    out.push(PublishedCheck::band("manual_cost_max", hi, 1.91, 0.0, 1.906));

    let h = headline_estimates(samples, c)?;
    let get = |m: Metric| h.iter().find(|e| e.metric == m.id()).expect("all metrics present");
    let e = get(Metric::ThresholdP);
    out.push(PublishedCheck::band("threshold_p_mean", e.mean, 0.25, 0.23, 0.27));
    out.push(PublishedCheck::band("threshold_p_ci_lo", e.ci_lo, 0.12, 0.07, 0.17));
    out.push(PublishedCheck::band("threshold_p_ci_hi", e.ci_hi, 0.51, 0.46, 0.56));
    let e = get(Metric::MaxSavings);
    out.push(PublishedCheck::relative("max_savings_mean", e.mean, 3.0e6, 0.15));
    out.push(PublishedCheck::relative("max_savings_ci_lo", e.ci_lo, 430_000.0, 0.25));
    out.push(PublishedCheck::relative("max_savings_ci_hi", e.ci_hi, 9.4e6, 0.25));
    let reduction = mean_relative_reduction(samples, c.team_p)?;
    out.push(PublishedCheck::band("relative_cost_reduction", reduction, 0.67, 0.67, 1.0));
    let e = get(Metric::DeterrentLambda);
    out.push(PublishedCheck::band("deterrent_lambda_mean", e.mean, 0.04, 0.03, 0.05));
    out.push(PublishedCheck::relative("deterrent_lambda_ci_lo", e.ci_lo, 0.009, 0.30));
    out.push(PublishedCheck::relative("deterrent_lambda_ci_hi", e.ci_hi, 0.12, 0.30));
    let e = get(Metric::MaxImpositionOpen);
    out.push(PublishedCheck::band("max_imposition_open_mean", e.mean, 740_000.0, 44_000.0, 3.0e6));
    let e = get(Metric::MinScaleFinetune);
    out.push(PublishedCheck::band("min_scale_finetune_mean", e.mean, 130_000.0, 90_000.0, 170_000.0));
    out.push(PublishedCheck::relative("min_scale_finetune_ci_lo", e.ci_lo, 38_000.0, 0.40));
    out.push(PublishedCheck::relative("min_scale_finetune_ci_hi", e.ci_hi, 420_000.0, 0.40));
    let e = get(Metric::MinScaleTraining);
    out.push(PublishedCheck::band("min_scale_training_mean", e.mean, 410e6, 280e6, 540e6));
    out.push(PublishedCheck::relative("min_scale_training_ci_lo", e.ci_lo, 82e6, 0.40));
    out.push(PublishedCheck::relative("min_scale_training_ci_hi", e.ci_hi, 1.1e9, 0.40));

    let f = fixed_cost_scenarios(samples, c)?;
    out.push(PublishedCheck::band(
        "premium_indifference_lambda_mean",
        f.premium_indifference_lambda.mean,
        0.0009,
        0.0007,
        0.0011,
    ));
    out.push(PublishedCheck::band("finetune_vs_api_mean", f.finetune_vs_api.mean, 250_000.0, 170_000.0, 330_000.0));
    out.push(PublishedCheck::relative("training_vs_api_mean", f.training_vs_api.mean, 310e6, 0.35));
    out.push(PublishedCheck::relative("automation_payback_multiple", f.payback_multiple, 2.33, 0.03));

    for p in [0.3, 0.5, 0.7, 0.9] {
        let pts = phase_curve(samples, p, &[1e-4, 0.1], c.savings_n, DetectionMode::Expected)?;
        out.push(PublishedCheck::band(
            format!("phase_low_share_of_cap_p{p}"),
            pts[0].imposed_mean / pts[0].cap_mean,
            0.0,
            0.0,
            0.05,
        ));
        out.push(PublishedCheck::band(format!("phase_share_at_cap_p{p}"), pts[1].share_at_cap, 1.0, 0.99, 1.0));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{default_ranges, midpoint};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn metric_ids_round_trip() {
        for m in Metric::ALL {
            assert_eq!(m.id().parse::<Metric>().unwrap(), m);
        }
        assert!(matches!("bogus".parse::<Metric>(), Err(Error::Domain(_))));
    }

    #[test]
    fn midpoint_metric_values() {
        let d = midpoint(&default_ranges());
        let c = HeadlineConstants::default();
        assert_abs_diff_eq!(metric_value(Metric::ThresholdP, &d, &c).unwrap(), 0.20040, epsilon = 1e-5);
        assert_abs_diff_eq!(metric_value(Metric::DeterrentLambda, &d, &c).unwrap(), 0.029312, epsilon = 1e-5);
        assert_relative_eq!(metric_value(Metric::MaxImpositionOpen, &d, &c).unwrap(), 69_600.0, max_relative = 0.01);
        assert_abs_diff_eq!(metric_value(Metric::MinScaleFinetune, &d, &c).unwrap(), 74_588.0, epsilon = 10.0);
        assert_relative_eq!(
            metric_value(Metric::MinScaleTraining, &d, &c).unwrap(),
            356.65e6,
            max_relative = 0.005
        );
    }

    #[test]
    fn summaries_are_reproducible() {
        let s = sample(&default_ranges(), 2000, 1).unwrap();
        let c = HeadlineConstants::default();
        assert_eq!(headline_estimates(&s, &c).unwrap(), headline_estimates(&s, &c).unwrap());
        for e in headline_estimates(&s, &c).unwrap() {
            assert!(e.ci_lo <= e.ci_hi);
            assert_eq!(e.sample_count, 2000);
        }
    }

    #[test]
    fn sensitivity_alpha_endpoints() {
        // alpha pinned to each endpoint with the rest at midpoint
        let c = HeadlineConstants::default();
        for (alpha, expected) in [(2.0, 0.5337), (10.0, 0.1337)] {
            let mut r = default_ranges().pinned_except(Param::Ic);
            r.ic_lo = 0.0123;
            r.ic_hi = 0.0123;
            r.alpha_lo = alpha;
            r.alpha_hi = alpha;
            let rows = sensitivity(Metric::ThresholdP, &r, 10, 0, &c).unwrap();
            assert_abs_diff_eq!(rows[0].q50, expected, epsilon = 1e-3);
        }
    }

    #[test]
    fn sensitivity_rows_shape() {
        let c = HeadlineConstants::default();
        let rows = sensitivity(Metric::MinScaleFinetune, &default_ranges(), 2000, 3, &c).unwrap();
        assert_eq!(rows.len(), 6);
        for r in &rows {
            assert!(r.q0 <= r.q25 && r.q25 <= r.q50 && r.q50 <= r.q75 && r.q75 <= r.q100);
        }
        for k in [0, 2, 3] {
            assert_eq!(rows[k].q0, rows[k].q100, "{:?}", rows[k].varied);
        }
    }

    #[test]
    fn phase_curve_modes() {
        let s = sample(&default_ranges(), 500, 2).unwrap();
        let lambdas = [0.0, 1e-4, 1e-2, 1.0];
        let e = phase_curve(&s, 0.7, &lambdas, 1e7, DetectionMode::Expected).unwrap();
        let r = phase_curve(&s, 0.7, &lambdas, 1e7, DetectionMode::Realized).unwrap();
        assert_eq!(e[0].imposed_mean, 0.0);
        assert_eq!(r[0].imposed_mean, 0.0);
        assert_eq!(e[3].share_at_cap, 1.0);
        for w in e.windows(2) {
            assert!(w[0].imposed_mean <= w[1].imposed_mean);
        }
        assert_eq!(r, phase_curve(&s, 0.7, &lambdas, 1e7, DetectionMode::Realized).unwrap());
    }
}
