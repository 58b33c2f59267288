//! Cost formulas for the three content-generation strategies.
//!
//! All quantities are real-valued USD. `n` always counts *usable* outputs; a
//! model with usability rate `p` must produce `n / p` raw outputs, and every
//! raw output is reviewed, billed for inference, and exposed to detection.
//!
//! Per usable output:
//!
//! - manual: `w / L`
//! - api: `(w/(alpha L) + IC + (P + surcharge) lambda) / p`
//! - open source: `(w/(alpha L) + IC) / p`, plus a one-time fixed cost

use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::params::{ParamDraw, SampleSet};
use crate::rng::{self, domain};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Manual,
    Api,
    OpenSource,
}

impl ModelKind {
    pub fn id(self) -> &'static str {
        match self {
            ModelKind::Manual => "manual",
            ModelKind::Api => "api",
            ModelKind::OpenSource => "open_source",
        }
    }
}

fn default_one() -> f64 {
    1.0
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

/// One content-generation option.
///
/// Manual options ignore `p`, `lambda` and `fixed_cost`. Open-source options
/// cannot be monitored and must have `lambda == 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub name: String,
    pub kind: ModelKind,
    #[serde(default = "default_one")]
    pub p: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub penalty_surcharge: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub fixed_cost: f64,
}

impl ModelConfig {
    pub fn manual(name: impl Into<String>) -> Self {
        ModelConfig {
            name: name.into(),
            kind: ModelKind::Manual,
            p: 1.0,
            lambda: 0.0,
            penalty_surcharge: 0.0,
            fixed_cost: 0.0,
        }
    }

    pub fn api(name: impl Into<String>, p: f64, lambda: f64) -> Self {
        ModelConfig {
            name: name.into(),
            kind: ModelKind::Api,
            p,
            lambda,
            penalty_surcharge: 0.0,
            fixed_cost: 0.0,
        }
    }

    pub fn open_source(name: impl Into<String>, p: f64, fixed_cost: f64) -> Self {
        ModelConfig {
            name: name.into(),
            kind: ModelKind::OpenSource,
            p,
            lambda: 0.0,
            penalty_surcharge: 0.0,
            fixed_cost,
        }
    }

    pub fn with_surcharge(mut self, surcharge: f64) -> Self {
        self.penalty_surcharge = surcharge;
        self
    }

    pub fn with_fixed_cost(mut self, fixed_cost: f64) -> Self {
        self.fixed_cost = fixed_cost;
        self
    }

    /// Checks the option's invariants; the error message names the option.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::domain(format!("option `{}`: {msg}", self.name)));
        if self.kind == ModelKind::Manual {
            return Ok(());
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return fail(format!("p must lie in (0, 1], got {}", self.p));
        }
        if !(self.lambda >= 0.0 && self.lambda <= 1.0) {
            return fail(format!("lambda must lie in [0, 1], got {}", self.lambda));
        }
        if self.kind == ModelKind::OpenSource && self.lambda != 0.0 {
            return fail(format!(
                "open_source models cannot be monitored; lambda must be 0, got {}",
                self.lambda
            ));
        }
        if !(self.fixed_cost >= 0.0 && self.fixed_cost.is_finite()) {
            return fail(format!("fixed_cost must be non-negative, got {}", self.fixed_cost));
        }
        if !(self.penalty_surcharge >= 0.0 && self.penalty_surcharge.is_finite()) {
            return fail(format!(
                "penalty_surcharge must be non-negative, got {}",
                self.penalty_surcharge
            ));
        }
        Ok(())
    }

    /// Usability rate with the manual convention applied.
    pub fn effective_p(&self) -> f64 {
        match self.kind {
            ModelKind::Manual => 1.0,
            _ => self.p,
        }
    }

    pub fn effective_lambda(&self) -> f64 {
        match self.kind {
            ModelKind::Api => self.lambda,
            _ => 0.0,
        }
    }

    pub fn effective_fixed_cost(&self) -> f64 {
        match self.kind {
            ModelKind::Manual => 0.0,
            _ => self.fixed_cost,
        }
    }

    /// Penalty per detection for this option under draw `d`.
    pub fn penalty(&self, d: &ParamDraw) -> f64 {
        d.penalty + self.penalty_surcharge
    }

    /// Variable cost per usable output, excluding fixed costs.
    pub fn cost_per_usable(&self, d: &ParamDraw) -> f64 {
        match self.kind {
            ModelKind::Manual => manual_marginal_cost(d),
            _ => (d.review_cost() + self.penalty(d) * self.effective_lambda()) / self.p,
        }
    }
}

/// A campaign target plus the options available to produce it.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignSpec {
    n: u64,
    options: Vec<ModelConfig>,
}

impl CampaignSpec {
    pub fn new(n: u64, options: Vec<ModelConfig>) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("campaign must target at least one usable output"));
        }
        if options.is_empty() {
            return Err(Error::domain("campaign needs at least one option"));
        }
        for o in &options {
            o.validate()?;
        }
        Ok(CampaignSpec { n, options })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn options(&self) -> &[ModelConfig] {
        &self.options
    }
}

/// Cost components of one option over a whole campaign.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptionCost {
    pub name: String,
    pub kind: ModelKind,
    pub labor: f64,
    pub inference: f64,
    pub expected_penalties: f64,
    pub fixed: f64,
    pub total: f64,
}

impl OptionCost {
    fn from_parts(m: &ModelConfig, labor: f64, inference: f64, penalties: f64, fixed: f64) -> Self {
        OptionCost {
            name: m.name.clone(),
            kind: m.kind,
            labor,
            inference,
            expected_penalties: penalties,
            fixed,
            total: labor + inference + penalties + fixed,
        }
    }
}

/// Costs of every option in a campaign and the index of the cheapest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostBreakdown {
    pub options: Vec<OptionCost>,
    pub chosen: usize,
}

impl CostBreakdown {
    pub fn chosen(&self) -> &OptionCost {
        &self.options[self.chosen]
    }
}

pub fn manual_marginal_cost(d: &ParamDraw) -> f64 {
    d.w / d.l
}

fn check_rate(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("usability rate must lie in (0, 1], got {p}")))
    }
}

/// Marginal cost of one usable output from a human-machine team with no
/// monitoring: `(w/(alpha L) + IC) / p`.
pub fn team_marginal_cost(d: &ParamDraw, p: f64) -> Result<f64> {
    check_rate(p)?;
    Ok(d.review_cost() / p)
}

/// Strictly cheaper than manual authorship.
pub fn is_team_cheaper(d: &ParamDraw, p: f64) -> Result<bool> {
    Ok(team_marginal_cost(d, p)? < manual_marginal_cost(d))
}

/// Outputs after which a fully automated model recovers `fixed_cost`.
pub fn automation_payback_outputs(d: &ParamDraw, fixed_cost: f64) -> Result<f64> {
    let manual = manual_marginal_cost(d);
    if manual <= d.ic {
        return Err(Error::NeverPaysBack {
            manual,
            inference: d.ic,
        });
    }
    Ok(fixed_cost / (manual - d.ic))
}

/// Expected detections over a campaign of `n` usable outputs: `lambda n / p`.
pub fn expected_detections(n: f64, p: f64, lambda: f64) -> Result<f64> {
    check_rate(p)?;
    if !(n >= 0.0) || !(lambda >= 0.0) {
        return Err(Error::domain(format!("need n >= 0 and lambda >= 0, got {n} and {lambda}")));
    }
    Ok(lambda * n / p)
}

/// Expected campaign cost of one option, with detections at their mean.
pub fn campaign_cost_expected(n: f64, d: &ParamDraw, m: &ModelConfig) -> Result<OptionCost> {
    m.validate()?;
    Ok(expected_unchecked(n, d, m))
}

fn expected_unchecked(n: f64, d: &ParamDraw, m: &ModelConfig) -> OptionCost {
    match m.kind {
        ModelKind::Manual => OptionCost::from_parts(m, n * manual_marginal_cost(d), 0.0, 0.0, 0.0),
        ModelKind::Api | ModelKind::OpenSource => {
            let raw = n / m.p;
            let labor = raw * d.w / (d.alpha * d.l);
            let inference = raw * d.ic;
            let penalties = raw * m.effective_lambda() * m.penalty(d);
            OptionCost::from_parts(m, labor, inference, penalties, m.fixed_cost)
        }
    }
}

/// A campaign cost with a sampled detection count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealizedCost {
    pub cost: OptionCost,
    pub detections: u64,
}

/// Draws `D ~ Poisson(lambda n / p)` from the stream `(seed, REALIZED)` and
/// charges `(P + surcharge) D`. Deterministic given `seed`.
pub fn campaign_cost_realized(n: f64, d: &ParamDraw, m: &ModelConfig, seed: u64) -> Result<RealizedCost> {
    m.validate()?;
    let expected = expected_unchecked(n, d, m);
    let mean = m.effective_lambda() * n / m.effective_p();
    let detections = if mean > 0.0 {
        let dist = Poisson::new(mean).map_err(|e| Error::domain(format!("poisson mean {mean}: {e}")))?;
        let mut g = rng::stream(seed, &[domain::REALIZED]);
        dist.sample(&mut g) as u64
    } else {
        0
    };
    let penalties = m.penalty(d) * detections as f64;
    let cost = OptionCost::from_parts(m, expected.labor, expected.inference, penalties, expected.fixed);
    Ok(RealizedCost { cost, detections })
}

/// Evaluates every option and picks the cheapest.
///
/// Ties go to manual, then api, then open source, then listing order.
pub fn total_cost(spec: &CampaignSpec, d: &ParamDraw) -> CostBreakdown {
    let n = spec.n as f64;
    let options: Vec<OptionCost> = spec.options.iter().map(|m| expected_unchecked(n, d, m)).collect();
    let mut order: Vec<usize> = (0..options.len()).collect();
    order.sort_by_key(|&i| (options[i].kind, i));
    let mut chosen = order[0];
    for &i in &order[1..] {
        if options[i].total < options[chosen].total {
            chosen = i;
        }
    }
    CostBreakdown { options, chosen }
}

/// Savings per usable output from switching to a team at rate `p`; negative
/// when the team is more expensive.
pub fn per_output_savings(d: &ParamDraw, p: f64) -> Result<f64> {
    Ok(manual_marginal_cost(d) - team_marginal_cost(d, p)?)
}

/// Mean cumulative savings, with rows indexed by `n_grid` and columns by
/// `p_grid`: entry `[i][j] = n_i * mean_d(per_output_savings(d, p_j))`.
pub fn cumulative_savings_surface(p_grid: &[f64], n_grid: &[f64], samples: &SampleSet) -> Result<Vec<Vec<f64>>> {
    if p_grid.is_empty() || n_grid.is_empty() {
        return Err(Error::domain("savings grids must be non-empty"));
    }
    let mut mean_savings = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        check_rate(p)?;
        let total: f64 = samples
            .draws()
            .iter()
            .map(|d| manual_marginal_cost(d) - d.review_cost() / p)
            .sum();
        mean_savings.push(total / samples.count() as f64);
    }
    Ok(n_grid
        .iter()
        .map(|&n| mean_savings.iter().map(|s| n * s).collect())
        .collect())
}

/// Cost that monitoring imposes on an api user who would otherwise pay the
/// unmonitored team cost, capped by the saving the model offered over manual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Imposition {
    /// `min(expected penalties, cap)`.
    pub imposed: f64,
    /// `max(0, manual cost - unmonitored api cost)`.
    pub cap: f64,
}

pub fn monitoring_imposition(n: f64, d: &ParamDraw, p: f64, lambda: f64) -> Result<Imposition> {
    check_rate(p)?;
    let cap = (n * manual_marginal_cost(d) - n / p * d.review_cost()).max(0.0);
    let penalties = n / p * lambda * d.penalty;
    Ok(Imposition {
        imposed: penalties.min(cap),
        cap,
    })
}

/// As [`monitoring_imposition`] but with penalties `P D` for a given
/// detection count.
pub fn realized_imposition(n: f64, d: &ParamDraw, p: f64, detections: u64) -> Result<Imposition> {
    let base = monitoring_imposition(n, d, p, 0.0)?;
    Ok(Imposition {
        imposed: (d.penalty * detections as f64).min(base.cap),
        cap: base.cap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{default_ranges, midpoint, sample};
    use approx::assert_abs_diff_eq;

    fn mid() -> ParamDraw {
        midpoint(&default_ranges())
    }

    #[test]
    fn manual_cost() {
        assert_abs_diff_eq!(manual_marginal_cost(&mid()), 0.36467, epsilon = 1e-5);
        let d = ParamDraw::new(3.0, 7.0, 7.0, 0.01, 1.0).unwrap();
        assert_eq!(manual_marginal_cost(&d), 1.0);
    }

    #[test]
    fn team_cost_examples() {
        let d = mid();
        assert_abs_diff_eq!(team_marginal_cost(&d, 0.75).unwrap(), 0.09744, epsilon = 1e-5);
        assert_abs_diff_eq!(team_marginal_cost(&d, 0.25).unwrap(), 0.29231, epsilon = 1e-5);
        assert!(team_marginal_cost(&d, 0.0).is_err());
        assert!(team_marginal_cost(&d, 1.01).is_err());
        // alpha = 1 and IC -> 0 collapses onto the manual cost
        let e = ParamDraw { alpha: 1.0, ic: 1e-300, ..d };
        assert_abs_diff_eq!(team_marginal_cost(&e, 1.0).unwrap(), manual_marginal_cost(&e), epsilon = 1e-15);
    }

    #[test]
    fn team_cheaper_examples() {
        let d = mid();
        assert!(is_team_cheaper(&d, 0.25).unwrap());
        assert!(!is_team_cheaper(&d, 0.15).unwrap());
        assert_abs_diff_eq!(team_marginal_cost(&d, 0.15).unwrap(), 0.48719, epsilon = 1e-5);
    }

    #[test]
    fn payback() {
        let d = mid();
        assert_abs_diff_eq!(automation_payback_outputs(&d, 1000.0).unwrap(), 2838.0, epsilon = 1.0);
        assert_eq!(automation_payback_outputs(&d, 0.0).unwrap(), 0.0);
        let e = ParamDraw::new(6.0, 0.44, 1.0, 0.01, 1.0).unwrap();
        assert_abs_diff_eq!(automation_payback_outputs(&e, 1.0).unwrap(), 2.33, epsilon = 0.01);
        let broke = ParamDraw::new(6.0, 1.0, 100.0, 0.02, 1.0).unwrap();
        assert!(matches!(automation_payback_outputs(&broke, 1.0), Err(Error::NeverPaysBack { .. })));
    }

    #[test]
    fn detections() {
        assert_abs_diff_eq!(expected_detections(1e6, 0.8, 0.001).unwrap(), 1250.0, epsilon = 1e-9);
        assert_eq!(expected_detections(123.0, 0.4, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(expected_detections(1e7, 0.75, 0.0005).unwrap(), 6666.7, epsilon = 0.1);
        assert!(expected_detections(1.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn expected_campaign_costs() {
        let d = mid();
        let api = campaign_cost_expected(1e6, &d, &ModelConfig::api("api", 0.85, 0.001)).unwrap();
        assert_abs_diff_eq!(api.total, 94_018.0, epsilon = 5.0);
        let os = campaign_cost_expected(1e6, &d, &ModelConfig::open_source("os", 0.85, 600.0)).unwrap();
        assert_abs_diff_eq!(os.total, 86_574.0, epsilon = 5.0);
        assert_eq!(os.fixed, 600.0);
        assert_eq!(os.expected_penalties, 0.0);
        let man = campaign_cost_expected(1e6, &d, &ModelConfig::manual("m")).unwrap();
        assert_abs_diff_eq!(man.total, 364_670.0, epsilon = 5.0);
        for c in [&api, &os, &man] {
            assert_eq!(c.total, c.labor + c.inference + c.expected_penalties + c.fixed);
        }
    }

    #[test]
    fn open_source_with_lambda_rejected() {
        let mut m = ModelConfig::open_source("leaky", 0.8, 0.0);
        m.lambda = 0.01;
        let err = campaign_cost_expected(1.0, &mid(), &m).unwrap_err();
        assert!(err.to_string().contains("leaky"));
    }

    #[test]
    fn realized_zero_lambda_equals_expected() {
        let d = mid();
        let m = ModelConfig::api("api", 0.6, 0.0);
        let r = campaign_cost_realized(1e5, &d, &m, 11).unwrap();
        assert_eq!(r.detections, 0);
        assert_eq!(r.cost, campaign_cost_expected(1e5, &d, &m).unwrap());
    }

    #[test]
    fn realized_is_deterministic() {
        let d = mid();
        let m = ModelConfig::api("api", 0.85, 0.001);
        assert_eq!(
            campaign_cost_realized(1e6, &d, &m, 5).unwrap(),
            campaign_cost_realized(1e6, &d, &m, 5).unwrap()
        );
    }

    #[test]
    fn realized_mean_matches_expected() {
        let d = mid();
        let m = ModelConfig::api("api", 0.85, 0.001);
        let runs: Vec<RealizedCost> = (0..10_000u64)
            .map(|s| campaign_cost_realized(1e6, &d, &m, s).unwrap())
            .collect();
        let det: Vec<f64> = runs.iter().map(|r| r.detections as f64).collect();
        let cost: Vec<f64> = runs.iter().map(|r| r.cost.total).collect();
        let target: f64 = 1e6 / 0.85 * 0.001;
        let sigma = target.sqrt() / 100.0;
        assert!((crate::stats::mean(&det) - target).abs() < 3.0 * sigma);
        let expected = campaign_cost_expected(1e6, &d, &m).unwrap().total;
        assert!((crate::stats::mean(&cost) - expected).abs() < 3.0 * crate::stats::std_error(&cost));
    }

    #[test]
    fn argmin_examples() {
        let d = mid();
        let opts = vec![
            ModelConfig::manual("manual"),
            ModelConfig::api("api", 0.85, 0.001),
            ModelConfig::open_source("os", 0.85, 600.0),
        ];
        let big = total_cost(&CampaignSpec::new(1_000_000, opts.clone()).unwrap(), &d);
        assert_eq!(big.chosen().name, "os");
        let small = total_cost(&CampaignSpec::new(10_000, opts).unwrap(), &d);
        assert_eq!(small.chosen().name, "api");
        assert_abs_diff_eq!(small.options[1].total, 940.2, epsilon = 0.1);
        assert_abs_diff_eq!(small.options[2].total, 1459.74, epsilon = 0.01);
        let only = total_cost(&CampaignSpec::new(10, vec![ModelConfig::manual("m")]).unwrap(), &d);
        assert_eq!(only.chosen, 0);
    }

    #[test]
    fn tie_break_order() {
        // identical api and open-source costs: api wins regardless of listing order
        let d = mid();
        let opts = vec![
            ModelConfig::open_source("os", 0.5, 0.0),
            ModelConfig::api("api", 0.5, 0.0),
            ModelConfig::open_source("os2", 0.5, 0.0),
        ];
        let b = total_cost(&CampaignSpec::new(100, opts).unwrap(), &d);
        assert_eq!(b.chosen().name, "api");
        let opts = vec![ModelConfig::open_source("a", 0.5, 0.0), ModelConfig::open_source("b", 0.5, 0.0)];
        assert_eq!(total_cost(&CampaignSpec::new(100, opts).unwrap(), &d).chosen().name, "a");
    }

    #[test]
    fn campaign_spec_validation() {
        assert!(CampaignSpec::new(0, vec![ModelConfig::manual("m")]).is_err());
        assert!(CampaignSpec::new(1, vec![]).is_err());
        assert!(CampaignSpec::new(1, vec![ModelConfig::api("a", 0.0, 0.0)]).is_err());
    }

    #[test]
    fn savings_examples() {
        let d = mid();
        assert_abs_diff_eq!(per_output_savings(&d, 0.75).unwrap(), 0.26723, epsilon = 1e-5);
        let s = sample(&default_ranges(), 10_000, 1).unwrap();
        let p_grid = [0.25, 0.5, 0.75, 1.0];
        let n_grid = [0.0, 1e6, 1e7];
        let surface = cumulative_savings_surface(&p_grid, &n_grid, &s).unwrap();
        assert!(surface[0].iter().all(|&v| v == 0.0));
        for row in &surface[1..] {
            let last = *row.last().unwrap();
            assert!(row.iter().all(|&v| v <= last));
        }
        let at = surface[2][2];
        assert!((at - 3.0e6).abs() < 0.15 * 3.0e6, "{at}");
        assert!(cumulative_savings_surface(&[], &n_grid, &s).is_err());
        assert!(cumulative_savings_surface(&[0.0], &n_grid, &s).is_err());
    }

    #[test]
    fn imposition_caps() {
        let d = mid();
        let low = monitoring_imposition(1e7, &d, 0.75, 1e-4).unwrap();
        let high = monitoring_imposition(1e7, &d, 0.75, 0.1).unwrap();
        assert!(low.imposed < 0.01 * low.cap);
        assert_eq!(high.imposed, high.cap);
        let none = monitoring_imposition(1e7, &d, 0.1, 0.1).unwrap();
        assert_eq!(none.cap, 0.0);
    }
}
