//! Expected campaign cost of several production options for one task.

use opcost::cost::{total_cost, CampaignSpec, ModelConfig};
use opcost::params::ParamDraw;

fn main() -> opcost::Result<()> {
    // alpha, wage, outputs/hour, inference cost, penalty per detection
    let d = ParamDraw::new(5.0, 5.0, 15.0, 0.01, 6.0)?;
    let options = vec![
        ModelConfig::manual("team"),
        ModelConfig::api("hosted", 0.75, 0.001),
        ModelConfig::api("hosted_premium", 0.9, 0.0009).with_surcharge(20.0),
        ModelConfig::open_source("finetuned", 0.85, 600.0),
    ];
    for n in [1_000u64, 10_000, 1_000_000] {
        let b = total_cost(&CampaignSpec::new(n, options.clone())?, &d);
        println!("n = {n}");
        for o in &b.options {
            println!(
                "  {:<15} labor {:>12.2}  inference {:>10.2}  penalties {:>10.2}  fixed {:>8.2}  total {:>12.2}",
                o.name, o.labor, o.inference, o.expected_penalties, o.fixed, o.total
            );
        }
        println!("  -> {}", b.chosen().name);
    }
    Ok(())
}
