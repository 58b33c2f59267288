//! Optimal-strategy regions over the `(p1, p2)` plane, where `p1` is the
//! usability rate of a monitored api model and `p2` that of an open-source
//! alternative.
//!
//! With `p_hat` the rate at which an unmonitored model beats manual
//! authorship, the conditions are checked in order:
//!
//! 1. `p1 <= p_hat` and `p2 <= p_hat`: manual regardless of monitoring.
//! 2. `p2 > p_hat` and `p2 >= p1`: open source regardless of monitoring.
//! 3. `p1 > p_hat` and `p2 <= p_hat`: api, falling back to manual.
//! 4. `p2 > p_hat` and `p1 > p2`: api, falling back to open source.
//!
//! In the api cases the deterrent rate `lambda_hat` is the detection rate at
//! which the user switches to the fallback; past it monitoring imposes
//! nothing more, so the most it can impose is `P lambda_hat n / p1`.

use rayon::prelude::*;
use serde::Serialize;

use crate::params::{ParamDraw, SampleSet};
use crate::stats;
use crate::threshold::{lambda_hat_manual, lambda_hat_open, p_hat_manual};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    ManualAlways,
    OpenAlways,
    ApiFallbackManual,
    ApiFallbackOpen,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::ManualAlways,
        Scenario::OpenAlways,
        Scenario::ApiFallbackManual,
        Scenario::ApiFallbackOpen,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Scenario::ManualAlways => "manual_always",
            Scenario::OpenAlways => "open_always",
            Scenario::ApiFallbackManual => "api_fallback_manual",
            Scenario::ApiFallbackOpen => "api_fallback_open",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

fn check_rates(p1: f64, p2: f64) -> Result<()> {
    for (name, p) in [("p1", p1), ("p2", p2)] {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::domain(format!("{name} must lie in (0, 1], got {p}")));
        }
    }
    Ok(())
}

fn classify_with(p_hat: f64, p1: f64, p2: f64) -> Scenario {
    if p1 <= p_hat && p2 <= p_hat {
        Scenario::ManualAlways
    } else if p2 > p_hat && p2 >= p1 {
        Scenario::OpenAlways
    } else if p1 > p_hat && p2 <= p_hat {
        Scenario::ApiFallbackManual
    } else {
        Scenario::ApiFallbackOpen
    }
}

/// Scenario for one draw. `fixed_cost2` and `n` only enter through
/// [`evaluate_cell`]; the classification itself uses variable costs.
pub fn classify(d: &ParamDraw, p1: f64, p2: f64, _fixed_cost2: f64, _n: f64) -> Result<Scenario> {
    check_rates(p1, p2)?;
    Ok(classify_with(p_hat_manual(d, 0.0, 0.0).value, p1, p2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrategyCell {
    pub p1: f64,
    pub p2: f64,
    pub scenario: Scenario,
    pub lambda_hat: f64,
    pub max_imposition: f64,
}

/// Scenario, deterrent rate and maximum imposition for one draw and cell.
pub fn evaluate_cell(d: &ParamDraw, p1: f64, p2: f64, fixed_cost2: f64, n: f64) -> Result<StrategyCell> {
    check_rates(p1, p2)?;
    let scenario = classify_with(p_hat_manual(d, 0.0, 0.0).value, p1, p2);
    let lambda_hat = match scenario {
        Scenario::ManualAlways | Scenario::OpenAlways => 0.0,
        Scenario::ApiFallbackManual => lambda_hat_manual(d, p1)?.value,
        Scenario::ApiFallbackOpen => lambda_hat_open(d, p1, p2, fixed_cost2, n)?.value,
    };
    Ok(StrategyCell {
        p1,
        p2,
        scenario,
        lambda_hat,
        max_imposition: d.penalty * lambda_hat * n / p1,
    })
}

/// Aggregate of one grid cell over a sample set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub p1: f64,
    pub p2: f64,
    pub scenario_mode: Scenario,
    pub scenario_counts: [usize; 4],
    pub lambda_hat_mean: f64,
    pub imposition_mean: f64,
    pub imposition_q25: f64,
    pub imposition_q75: f64,
}

/// Row-major grid of cell summaries: `cells[i * p2_len + j]` holds
/// `(p1_grid[i], p2_grid[j])`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyGrid {
    pub p1_len: usize,
    pub p2_len: usize,
    pub cells: Vec<CellSummary>,
}

impl StrategyGrid {
    pub fn cell(&self, i: usize, j: usize) -> &CellSummary {
        &self.cells[i * self.p2_len + j]
    }
}

/// Evaluates every `(p1, p2)` cell against every draw.
///
/// The modal scenario breaks ties toward the lowest-numbered scenario.
/// Cells are computed in parallel and collected in index order.
pub fn grid(samples: &SampleSet, p1_grid: &[f64], p2_grid: &[f64], n: f64, fixed_cost2: f64) -> Result<StrategyGrid> {
    if p1_grid.is_empty() || p2_grid.is_empty() {
        return Err(Error::domain("strategy grids must be non-empty"));
    }
    for &p1 in p1_grid {
        for &p2 in p2_grid {
            check_rates(p1, p2)?;
        }
    }
    let p_hats: Vec<f64> = samples.draws().iter().map(|d| p_hat_manual(d, 0.0, 0.0).value).collect();
    let coords: Vec<(f64, f64)> = p1_grid
        .iter()
        .flat_map(|&p1| p2_grid.iter().map(move |&p2| (p1, p2)))
        .collect();
    let cells = coords
        .par_iter()
        .map(|&(p1, p2)| summarize_cell(samples.draws(), &p_hats, p1, p2, n, fixed_cost2))
        .collect::<Result<Vec<_>>>()?;
    Ok(StrategyGrid {
        p1_len: p1_grid.len(),
        p2_len: p2_grid.len(),
        cells,
    })
}

fn summarize_cell(
    draws: &[ParamDraw],
    p_hats: &[f64],
    p1: f64,
    p2: f64,
    n: f64,
    fixed_cost2: f64,
) -> Result<CellSummary> {
    let mut counts = [0usize; 4];
    let mut lambda_sum = 0.0;
    let mut impositions = Vec::with_capacity(draws.len());
    for (d, &p_hat) in draws.iter().zip(p_hats) {
        let scenario = classify_with(p_hat, p1, p2);
        counts[scenario.index()] += 1;
        let lambda_hat = match scenario {
            Scenario::ManualAlways | Scenario::OpenAlways => 0.0,
            Scenario::ApiFallbackManual => lambda_hat_manual(d, p1)?.value,
            Scenario::ApiFallbackOpen => lambda_hat_open(d, p1, p2, fixed_cost2, n)?.value,
        };
        lambda_sum += lambda_hat;
        impositions.push(d.penalty * lambda_hat * n / p1);
    }
    let mut mode = Scenario::ManualAlways;
    for s in Scenario::ALL {
        if counts[s.index()] > counts[mode.index()] {
            mode = s;
        }
    }
    let count = draws.len() as f64;
    let imposition_mean = impositions.iter().sum::<f64>() / count;
    impositions.sort_by(f64::total_cmp);
    Ok(CellSummary {
        p1,
        p2,
        scenario_mode: mode,
        scenario_counts: counts,
        lambda_hat_mean: lambda_sum / count,
        imposition_mean,
        imposition_q25: stats::quantile_sorted(&impositions, 0.25),
        imposition_q75: stats::quantile_sorted(&impositions, 0.75),
    })
}
