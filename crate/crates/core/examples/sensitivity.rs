//! One-at-a-time sensitivity of a metric to each input range.
//!
//!     cargo run --example sensitivity -- api_deterrent_lambda

use opcost::analysis::{sensitivity, HeadlineConstants, Metric};
use opcost::params::default_ranges;

fn main() -> opcost::Result<()> {
    let metric: Metric = match std::env::args().nth(1) {
        Some(s) => s.parse()?,
        None => Metric::ALL[0],
    };
    let rows = sensitivity(metric, &default_ranges(), 5000, 0, &HeadlineConstants::default())?;
    println!("{metric} ({})", metric.unit().id());
    println!("{:>8} {:>12} {:>12} {:>12} {:>12}", "varied", "q25", "q50", "q75", "iqr");
    for r in rows {
        println!("{:>8} {:>12.5} {:>12.5} {:>12.5} {:>12.5}", r.varied.id(), r.q25, r.q50, r.q75, r.iqr());
    }
    Ok(())
}
