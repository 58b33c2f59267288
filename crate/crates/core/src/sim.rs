//! Event-level campaign simulator.
//!
//! Raw outputs are generated until `n_usable` of them pass review. Each raw
//! output is usable with probability `p` and, independently, triggers a
//! detection with probability `lambda`; every detection costs the option's
//! penalty. The per-output Bernoulli detection process is memoryless, so each
//! detection restarts the wait for the next one.
//!
//! The output stream is cut into fixed chunks of [`CHUNK_OUTPUTS`] raw
//! outputs. Chunk `k` draws its usable and detection counts as binomials from
//! stream `(seed, SIM, k, 0)`; a binomial count followed by a uniformly random
//! arrangement is the same law as independent per-output trials. Only the
//! chunk in which the target is reached needs the arrangement: it is walked
//! output by output using stream `(seed, SIM, k, 1)`, sampling each position
//! conditionally on the counts still to place. [`Execution::Stepwise`] walks
//! every chunk that way and must agree exactly with [`Execution::Chunked`].

use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::cost::{manual_marginal_cost, ModelConfig, ModelKind};
use crate::params::ParamDraw;
use crate::rng::{self, domain};
use crate::{Error, Result};

/// Raw outputs per chunk.
pub const CHUNK_OUTPUTS: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    /// Whole chunks are settled from their counts; only the last is walked.
    Chunked,
    /// Every chunk is walked output by output.
    Stepwise,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub raw_outputs: u64,
    pub usable_outputs: u64,
    pub detections: u64,
    pub labor_cost: f64,
    pub inference_cost: f64,
    pub penalty_cost: f64,
    pub fixed_cost: f64,
    pub total_cost: f64,
    pub seed: u64,
}

struct Walk {
    outputs: u64,
    usable: u64,
    detections: u64,
}

fn walk_chunk(seed: u64, chunk: u64, usable_total: u64, detections_total: u64, needed: u64) -> Walk {
    let mut g = rng::stream(seed, &[domain::SIM, chunk, 1]);
    let (mut usable_left, mut detections_left) = (usable_total, detections_total);
    let (mut usable, mut detections) = (0, 0);
    for j in 0..CHUNK_OUTPUTS {
        let slots = (CHUNK_OUTPUTS - j) as f64;
        let is_usable = rng::unit_f64(&mut g) < usable_left as f64 / slots;
        let is_detected = rng::unit_f64(&mut g) < detections_left as f64 / slots;
        if is_usable {
            usable_left -= 1;
            usable += 1;
        }
        if is_detected {
            detections_left -= 1;
            detections += 1;
        }
        if usable == needed {
            return Walk {
                outputs: j + 1,
                usable,
                detections,
            };
        }
    }
    Walk {
        outputs: CHUNK_OUTPUTS,
        usable,
        detections,
    }
}

pub fn simulate_campaign(n_usable: u64, d: &ParamDraw, m: &ModelConfig, seed: u64) -> Result<SimResult> {
    simulate_campaign_with(n_usable, d, m, seed, Execution::Chunked)
}

pub fn simulate_campaign_with(
    n_usable: u64,
    d: &ParamDraw,
    m: &ModelConfig,
    seed: u64,
    execution: Execution,
) -> Result<SimResult> {
    m.validate()?;
    if m.kind == ModelKind::Manual {
        return Err(Error::UnsupportedSimulation(m.name.clone()));
    }
    if n_usable == 0 {
        return Err(Error::domain("simulation needs at least one usable output"));
    }
    let usable_dist = Binomial::new(CHUNK_OUTPUTS, m.p).map_err(|e| Error::domain(e.to_string()))?;
    let detect_dist =
        Binomial::new(CHUNK_OUTPUTS, m.effective_lambda()).map_err(|e| Error::domain(e.to_string()))?;

    let (mut raw, mut usable, mut detections) = (0u64, 0u64, 0u64);
    let mut chunk = 0u64;
    while usable < n_usable {
        let mut g = rng::stream(seed, &[domain::SIM, chunk, 0]);
        let chunk_usable = usable_dist.sample(&mut g);
        let chunk_detections = detect_dist.sample(&mut g);
        let needed = n_usable - usable;
        if execution == Execution::Chunked && chunk_usable < needed {
            raw += CHUNK_OUTPUTS;
            usable += chunk_usable;
            detections += chunk_detections;
        } else {
            let w = walk_chunk(seed, chunk, chunk_usable, chunk_detections, needed);
            raw += w.outputs;
            usable += w.usable;
            detections += w.detections;
        }
        chunk += 1;
    }

    let labor_cost = raw as f64 * d.w / (d.alpha * d.l);
    let inference_cost = raw as f64 * d.ic;
    let penalty_cost = detections as f64 * m.penalty(d);
    let fixed_cost = m.fixed_cost;
    Ok(SimResult {
        raw_outputs: raw,
        usable_outputs: usable,
        detections,
        labor_cost,
        inference_cost,
        penalty_cost,
        fixed_cost,
        total_cost: labor_cost + inference_cost + penalty_cost + fixed_cost,
        seed,
    })
}

/// Manual campaigns are deterministic: `n w / L`, no detections.
pub fn simulate_manual(n_usable: u64, d: &ParamDraw) -> Result<SimResult> {
    if n_usable == 0 {
        return Err(Error::domain("simulation needs at least one usable output"));
    }
    let labor_cost = n_usable as f64 * manual_marginal_cost(d);
    Ok(SimResult {
        raw_outputs: n_usable,
        usable_outputs: n_usable,
        detections: 0,
        labor_cost,
        inference_cost: 0.0,
        penalty_cost: 0.0,
        fixed_cost: 0.0,
        total_cost: labor_cost,
        seed: 0,
    })
}
