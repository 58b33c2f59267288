//! Monte Carlo estimates of the headline metrics with 95% intervals.

use opcost::analysis::{fixed_cost_scenarios, headline_estimates, HeadlineConstants};
use opcost::params::{default_ranges, sample};

fn main() -> opcost::Result<()> {
    let s = sample(&default_ranges(), 10_000, 0)?;
    let c = HeadlineConstants::default();
    for e in headline_estimates(&s, &c)? {
        println!(
            "{:<28} {:>14.6}  [{:>14.6}, {:>14.6}]  {}",
            e.metric,
            e.mean,
            e.ci_lo,
            e.ci_hi,
            e.unit.id()
        );
    }
    let f = fixed_cost_scenarios(&s, &c)?;
    println!("premium tier indifference rate: {:.3e}", f.premium_indifference_lambda.mean);
    println!("fine-tune pays off after:       {:.0} outputs", f.finetune_vs_api.mean);
    println!("training pays off after:        {:.3e} outputs", f.training_vs_api.mean);
    Ok(())
}
