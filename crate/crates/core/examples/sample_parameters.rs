//! Draw task parameters from the default ranges and print summary quantiles.
//!
//!     cargo run --example sample_parameters -- 5000 7

use opcost::params::{default_ranges, sample, Param};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let count: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10_000);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);

    let s = sample(&default_ranges(), count, seed)?;
    println!("{count} draws, seed {seed}");
    for p in Param::ALL {
        let mut xs: Vec<f64> = s
            .draws()
            .iter()
            .map(|d| match p {
                Param::Alpha => d.alpha,
                Param::W => d.w,
                Param::L => d.l,
                Param::Ic => d.ic,
                Param::Penalty => d.penalty,
            })
            .collect();
        xs.sort_by(f64::total_cmp);
        let q = |f: f64| xs[((xs.len() - 1) as f64 * f).round() as usize];
        println!("{:>8}  min {:>10.5}  median {:>10.5}  max {:>10.5}", p.id(), q(0.0), q(0.5), q(1.0));
    }
    let first = &s.draws()[0];
    println!("draw 0 review cost per raw output: {:.5}", first.review_cost());
    Ok(())
}
