//! Distributional checks against independent reference distributions.

use opcost::cost::ModelConfig;
use opcost::params::{default_ranges, sample, ParamDraw};
use opcost::sim::{simulate_campaign, simulate_campaign_with, Execution};
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, DiscreteCDF, NegativeBinomial};

const ALPHA: f64 = 0.001;

/// Asymptotic two-sided KS critical value at `ALPHA`.
fn ks_critical(n: usize) -> f64 {
    (-(ALPHA / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

fn ks_uniform(mut xs: Vec<f64>, lo: f64, hi: f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = (x - lo) / (hi - lo);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

#[test]
fn marginals_are_uniform() {
    let r = default_ranges();
    let n = 20_000;
    let s = sample(&r, n, 11).unwrap();
    let d = s.draws();
    let crit = ks_critical(n);
    let cases: [(&str, Vec<f64>, f64, f64); 5] = [
        ("alpha", d.iter().map(|x| x.alpha).collect(), r.alpha_lo, r.alpha_hi),
        ("w", d.iter().map(|x| x.w).collect(), r.w_lo, r.w_hi),
        ("l", d.iter().map(|x| x.l).collect(), r.l_lo, r.l_hi),
        ("ic", d.iter().map(|x| x.ic).collect(), r.ic_lo, r.ic_hi),
        ("pmult", d.iter().map(|x| x.penalty / x.w).collect(), r.pmult_lo, r.pmult_hi),
    ];
    for (name, xs, lo, hi) in cases {
        let stat = ks_uniform(xs, lo, hi);
        assert!(stat < crit, "{name}: D={stat} >= {crit}");
    }
}

#[test]
fn marginals_are_uncorrelated() {
    let s = sample(&default_ranges(), 20_000, 12).unwrap();
    let a: Vec<f64> = s.draws().iter().map(|x| x.alpha).collect();
    let l: Vec<f64> = s.draws().iter().map(|x| x.l).collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (ma, ml) = (mean(&a), mean(&l));
    let cov: f64 = a.iter().zip(&l).map(|(x, y)| (x - ma) * (y - ml)).sum::<f64>();
    let var = |v: &[f64], m: f64| v.iter().map(|x| (x - m).powi(2)).sum::<f64>();
    let rho = cov / (var(&a, ma) * var(&l, ml)).sqrt();
    // |rho| ~ N(0, 1/n) under independence
    assert!(rho.abs() < 4.0 / (20_000f64).sqrt(), "{rho}");
}

fn draw() -> ParamDraw {
    ParamDraw::new(5.0, 4.0, 15.0, 0.01, 6.0).unwrap()
}

/// Extra raw outputs beyond `n` follow a negative binomial with `n` successes.
fn check_raw_outputs(n: u64, p: f64, runs: u64) {
    let m = ModelConfig::api("a", p, 0.0);
    let nb = NegativeBinomial::new(n as f64, p).unwrap();
    let failures: Vec<u64> = (0..runs)
        .map(|k| simulate_campaign(n, &draw(), &m, 1000 + k).unwrap().raw_outputs - n)
        .collect();

    // bins with expected count >= 5, tails pooled
    let mut edges = vec![0u64];
    let mut acc = 0.0;
    let mut x = 0u64;
    while nb.sf(x) * runs as f64 >= 5.0 {
        acc += nb.pmf(x) * runs as f64;
        x += 1;
        if acc >= 5.0 {
            edges.push(x);
            acc = 0.0;
        }
    }
    let last = *edges.last().unwrap();
    let bins = edges.len();
    let mut stat = 0.0;
    for b in 0..bins {
        let lo = edges[b];
        let (observed, expected) = if b + 1 < bins {
            let hi = edges[b + 1];
            let o = failures.iter().filter(|&&f| f >= lo && f < hi).count();
            let e = if lo == 0 { nb.cdf(hi - 1) } else { nb.cdf(hi - 1) - nb.cdf(lo - 1) };
            (o, e)
        } else {
            let o = failures.iter().filter(|&&f| f >= last).count();
            (o, if last == 0 { 1.0 } else { nb.sf(last - 1) })
        };
        let e = expected * runs as f64;
        stat += (observed as f64 - e).powi(2) / e;
    }
    let crit = ChiSquared::new((bins - 1) as f64).unwrap().inverse_cdf(1.0 - ALPHA);
    assert!(stat < crit, "n={n} p={p}: chi2={stat} >= {crit} over {bins} bins");
}

#[test]
fn raw_outputs_within_one_chunk() {
    check_raw_outputs(40, 0.3, 4000);
}

#[test]
fn raw_outputs_across_chunks() {
    check_raw_outputs(9000, 0.6, 4000);
}

#[test]
fn detections_track_raw_outputs() {
    let m = ModelConfig::api("a", 0.5, 0.01);
    let runs = 2000u64;
    let (mut sum, mut expected) = (0.0, 0.0);
    for k in 0..runs {
        let r = simulate_campaign(5000, &draw(), &m, k).unwrap();
        sum += r.detections as f64;
        expected += r.raw_outputs as f64 * 0.01;
    }
    // detections | raw ~ Binomial(raw, lambda); the sum over runs is close to normal
    let z = (sum - expected) / (expected * 0.99).sqrt();
    assert!(z.abs() < 4.0, "z={z}");
}

#[test]
fn stepwise_matches_chunked() {
    let m = ModelConfig::api("a", 0.37, 0.02);
    for seed in 0..50 {
        for n in [1, 17, 4096, 10_001] {
            assert_eq!(
                simulate_campaign_with(n, &draw(), &m, seed, Execution::Chunked).unwrap(),
                simulate_campaign_with(n, &draw(), &m, seed, Execution::Stepwise).unwrap(),
            );
        }
    }
}
