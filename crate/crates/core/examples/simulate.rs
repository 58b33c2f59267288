//! Stochastic campaigns: simulated costs against the expected-value model.

use opcost::cost::{campaign_cost_expected, ModelConfig};
use opcost::params::ParamDraw;
use opcost::sim::simulate_campaign;

fn main() -> opcost::Result<()> {
    let d = ParamDraw::new(5.0, 5.0, 15.0, 0.01, 7.5)?;
    let m = ModelConfig::api("hosted", 0.75, 0.001);
    let n = 100_000u64;
    let runs = 200;

    let results: Vec<_> = (0..runs).map(|k| simulate_campaign(n, &d, &m, k)).collect::<opcost::Result<_>>()?;
    let mean = |f: &dyn Fn(&opcost::sim::SimResult) -> f64| results.iter().map(f).sum::<f64>() / runs as f64;
    let expected = campaign_cost_expected(n as f64, &d, &m)?;

    println!("{runs} runs of {n} usable outputs");
    println!("raw outputs   {:>12.1}  expected {:>12.1}", mean(&|r| r.raw_outputs as f64), n as f64 / m.p);
    println!("detections    {:>12.2}  expected {:>12.2}", mean(&|r| r.detections as f64), n as f64 / m.p * m.lambda);
    println!("total cost    {:>12.2}  expected {:>12.2}", mean(&|r| r.total_cost), expected.total);
    let worst = results.iter().map(|r| r.penalty_cost).fold(0.0, f64::max);
    println!("worst penalty bill: {worst:.2}");
    Ok(())
}
