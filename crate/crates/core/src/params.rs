//! The five uncertain parameters and their seeded sampling.
//!
//! | field     | meaning                                   | unit          |
//! |-----------|-------------------------------------------|---------------|
//! | `alpha`   | review speedup over manual writing        | dimensionless |
//! | `w`       | hourly wage of a content author           | USD/hour      |
//! | `l`       | manual productivity                       | outputs/hour  |
//! | `ic`      | inference cost of one raw model output     | USD/output    |
//! | `penalty` | cost of evading one detection             | USD           |
//!
//! The penalty is drawn as `m * w` with `m` uniform on the multiplier range
//! and `w` the wage of the same draw, so penalty and wage are correlated.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rng::{self, domain};
use crate::{Error, Result};

/// Uniform sampling bounds for each parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamRanges {
    pub alpha_lo: f64,
    pub alpha_hi: f64,
    pub w_lo: f64,
    pub w_hi: f64,
    #[serde(rename = "L_lo")]
    pub l_lo: f64,
    #[serde(rename = "L_hi")]
    pub l_hi: f64,
    pub ic_lo: f64,
    pub ic_hi: f64,
    pub pmult_lo: f64,
    pub pmult_hi: f64,
}

impl Default for ParamRanges {
    fn default() -> Self {
        default_ranges()
    }
}

/// Which single parameter a one-at-a-time sweep lets vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    Alpha,
    W,
    L,
    Ic,
    Penalty,
}

impl Param {
    pub const ALL: [Param; 5] = [Param::Alpha, Param::W, Param::L, Param::Ic, Param::Penalty];

    pub fn id(self) -> &'static str {
        match self {
            Param::Alpha => "alpha",
            Param::W => "w",
            Param::L => "L",
            Param::Ic => "IC",
            Param::Penalty => "P",
        }
    }
}

impl ParamRanges {
    pub fn validate(&self) -> Result<()> {
        let pairs = [
            ("alpha", self.alpha_lo, self.alpha_hi),
            ("w", self.w_lo, self.w_hi),
            ("L", self.l_lo, self.l_hi),
            ("ic", self.ic_lo, self.ic_hi),
            ("pmult", self.pmult_lo, self.pmult_hi),
        ];
        for (name, lo, hi) in pairs {
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::domain(format!("{name} range must be finite")));
            }
            if lo <= 0.0 {
                return Err(Error::domain(format!("{name}_lo must be positive, got {lo}")));
            }
            if lo > hi {
                return Err(Error::domain(format!("{name}_lo {lo} exceeds {name}_hi {hi}")));
            }
        }
        Ok(())
    }

    /// Copy of these ranges with every parameter except `varied` pinned to
    /// its midpoint.
    pub fn pinned_except(&self, varied: Param) -> ParamRanges {
        let mid = |lo: f64, hi: f64| (lo + hi) / 2.0;
        let pin = |lo: f64, hi: f64, keep: bool| if keep { (lo, hi) } else { (mid(lo, hi), mid(lo, hi)) };
        let (alpha_lo, alpha_hi) = pin(self.alpha_lo, self.alpha_hi, varied == Param::Alpha);
        let (w_lo, w_hi) = pin(self.w_lo, self.w_hi, varied == Param::W);
        let (l_lo, l_hi) = pin(self.l_lo, self.l_hi, varied == Param::L);
        let (ic_lo, ic_hi) = pin(self.ic_lo, self.ic_hi, varied == Param::Ic);
        let (pmult_lo, pmult_hi) = pin(self.pmult_lo, self.pmult_hi, varied == Param::Penalty);
        ParamRanges {
            alpha_lo,
            alpha_hi,
            w_lo,
            w_hi,
            l_lo,
            l_hi,
            ic_lo,
            ic_hi,
            pmult_lo,
            pmult_hi,
        }
    }
}

/// Default sampling ranges.
pub fn default_ranges() -> ParamRanges {
    ParamRanges {
        alpha_lo: 2.0,
        alpha_hi: 10.0,
        w_lo: 1.41,
        w_hi: 9.53,
        l_lo: 5.0,
        l_hi: 25.0,
        ic_lo: 0.0006,
        ic_hi: 0.024,
        pmult_lo: 0.5,
        pmult_hi: 2.0,
    }
}

/// One joint draw of the uncertain parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamDraw {
    pub alpha: f64,
    pub w: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub ic: f64,
    pub penalty: f64,
}

impl ParamDraw {
    /// Checked constructor; every field must be finite and strictly positive.
    pub fn new(alpha: f64, w: f64, l: f64, ic: f64, penalty: f64) -> Result<Self> {
        let d = ParamDraw { alpha, w, l, ic, penalty };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("w", self.w),
            ("L", self.l),
            ("ic", self.ic),
            ("penalty", self.penalty),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    /// Cost of one raw model output under human review: `w/(alpha L) + IC`.
    pub fn review_cost(&self) -> f64 {
        self.w / (self.alpha * self.l) + self.ic
    }
}

/// Midpoint of every range; the penalty is the multiplier midpoint times the
/// wage midpoint.
pub fn midpoint(r: &ParamRanges) -> ParamDraw {
    let w = (r.w_lo + r.w_hi) / 2.0;
    ParamDraw {
        alpha: (r.alpha_lo + r.alpha_hi) / 2.0,
        w,
        l: (r.l_lo + r.l_hi) / 2.0,
        ic: (r.ic_lo + r.ic_hi) / 2.0,
        penalty: (r.pmult_lo + r.pmult_hi) / 2.0 * w,
    }
}

/// Ordered, seeded collection of parameter draws.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    draws: Vec<ParamDraw>,
    seed: u64,
}

impl SampleSet {
    /// Wraps externally built draws (e.g. a single midpoint draw).
    pub fn from_draws(draws: Vec<ParamDraw>, seed: u64) -> Result<Self> {
        if draws.is_empty() {
            return Err(Error::EmptySample);
        }
        for d in &draws {
            d.validate()?;
        }
        Ok(SampleSet { draws, seed })
    }

    pub fn draws(&self) -> &[ParamDraw] {
        &self.draws
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn count(&self) -> usize {
        self.draws.len()
    }
}

/// Draw `index` of the sample set identified by `(ranges, seed)`.
///
/// Fields are drawn from the stream `(seed, PARAMS, index)` in the order
/// alpha, w, L, IC, penalty multiplier.
pub fn draw_at(r: &ParamRanges, seed: u64, index: u64) -> ParamDraw {
    let mut g = rng::stream(seed, &[domain::PARAMS, index]);
    let alpha = rng::uniform(&mut g, r.alpha_lo, r.alpha_hi);
    let w = rng::uniform(&mut g, r.w_lo, r.w_hi);
    let l = rng::uniform(&mut g, r.l_lo, r.l_hi);
    let ic = rng::uniform(&mut g, r.ic_lo, r.ic_hi);
    let m = rng::uniform(&mut g, r.pmult_lo, r.pmult_hi);
    ParamDraw { alpha, w, l, ic, penalty: m * w }
}

/// Samples `count` independent draws. The result depends only on
/// `(ranges, count, seed)`, never on the rayon pool size.
pub fn sample(r: &ParamRanges, count: usize, seed: u64) -> Result<SampleSet> {
    if count == 0 {
        return Err(Error::EmptySample);
    }
    r.validate()?;
    let draws = (0..count as u64)
        .into_par_iter()
        .map(|i| draw_at(r, seed, i))
        .collect();
    Ok(SampleSet { draws, seed })
}

/// Per-output inference cost from a per-token price and an output length.
pub fn inference_cost_per_output(token_price: f64, tokens_per_output: f64) -> Result<f64> {
    if !(token_price > 0.0 && tokens_per_output > 0.0) {
        return Err(Error::domain(format!(
            "token price and output length must be positive, got {token_price} and {tokens_per_output}"
        )));
    }
    Ok(token_price * tokens_per_output)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_bounds() {
        let r = default_ranges();
        assert_eq!((r.alpha_lo, r.alpha_hi), (2.0, 10.0));
        assert_eq!((r.w_lo, r.w_hi), (1.41, 9.53));
        assert_eq!((r.l_lo, r.l_hi), (5.0, 25.0));
        assert_eq!((r.ic_lo, r.ic_hi), (0.0006, 0.024));
        assert_eq!((r.pmult_lo, r.pmult_hi), (0.5, 2.0));
        r.validate().unwrap();
    }

    #[test]
    fn midpoint_values() {
        let d = midpoint(&default_ranges());
        assert_eq!(d.alpha, 6.0);
        assert_relative_eq!(d.w, 5.47, epsilon = 1e-12);
        assert_eq!(d.l, 15.0);
        assert_relative_eq!(d.ic, 0.0123, epsilon = 1e-12);
        assert_relative_eq!(d.penalty, 6.8375, epsilon = 1e-12);
    }

    #[test]
    fn invalid_ranges_rejected() {
        let mut r = default_ranges();
        r.w_lo = 10.0;
        assert!(matches!(r.validate(), Err(Error::Domain(_))));
        let mut r = default_ranges();
        r.ic_lo = 0.0;
        assert!(r.validate().is_err());
    }

    #[test]
    fn empty_sample_is_an_error() {
        assert_eq!(sample(&default_ranges(), 0, 1), Err(Error::EmptySample));
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample(&default_ranges(), 10, 42).unwrap();
        let b = sample(&default_ranges(), 10, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.count(), 10);
        let c = sample(&default_ranges(), 10, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn prefix_stable() {
        // draw i depends on (seed, i) only, so a longer run extends a shorter one
        let short = sample(&default_ranges(), 5, 9).unwrap();
        let long = sample(&default_ranges(), 50, 9).unwrap();
        assert_eq!(short.draws(), &long.draws()[..5]);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| sample(&default_ranges(), 2000, 5).unwrap());
        let b = four.install(|| sample(&default_ranges(), 2000, 5).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn draws_respect_ranges_and_penalty_coupling() {
        let s = sample(&default_ranges(), 20_000, 3).unwrap();
        for d in s.draws() {
            assert!((2.0..=10.0).contains(&d.alpha));
            assert!((1.41..=9.53).contains(&d.w));
            assert!((5.0..=25.0).contains(&d.l));
            assert!((0.0006..=0.024).contains(&d.ic));
            let ratio = d.penalty / d.w;
            assert!((0.5 - 1e-12..=2.0 + 1e-12).contains(&ratio));
        }
    }

    #[test]
    fn pinned_ranges_hold_midpoints() {
        let r = default_ranges().pinned_except(Param::W);
        let s = sample(&r, 100, 1).unwrap();
        for d in s.draws() {
            assert_eq!(d.alpha, 6.0);
            assert_eq!(d.l, 15.0);
            assert_relative_eq!(d.penalty, 1.25 * d.w, max_relative = 1e-12);
        }
    }

    #[test]
    fn token_pricing() {
        assert_relative_eq!(inference_cost_per_output(0.000015, 40.0).unwrap(), 0.0006, max_relative = 1e-12);
        assert_relative_eq!(inference_cost_per_output(0.00006, 40.0).unwrap(), 0.0024, max_relative = 1e-12);
        assert!(matches!(inference_cost_per_output(0.0, 40.0), Err(Error::Domain(_))));
        assert!(inference_cost_per_output(0.00006, -1.0).is_err());
    }
}
