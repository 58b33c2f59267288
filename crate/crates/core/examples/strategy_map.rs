//! Coarse text rendering of the four-way strategy map over (p1, p2).
//!
//! Each cell shows the modal scenario over the sample set:
//! `M` manual, `O` open weights, `a` api falling back to manual,
//! `A` api falling back to open weights.

use opcost::params::{default_ranges, sample};
use opcost::strategy::{grid, Scenario};

fn main() -> opcost::Result<()> {
    let s = sample(&default_ranges(), 2000, 0)?;
    let axis: Vec<f64> = (1..=20).map(|i| i as f64 * 0.05).collect();
    let g = grid(&s, &axis, &axis, 1e7, 0.0)?;

    println!("rows: api usability p1 (top = 1.0), columns: open usability p2");
    for i in (0..axis.len()).rev() {
        let row: String = (0..axis.len())
            .map(|j| match g.cell(i, j).scenario_mode {
                Scenario::ManualAlways => 'M',
                Scenario::OpenAlways => 'O',
                Scenario::ApiFallbackManual => 'a',
                Scenario::ApiFallbackOpen => 'A',
            })
            .collect();
        println!("{:>5.2} {row}", axis[i]);
    }
    let c = g.cell(14, 9);
    println!(
        "cell p1={:.2} p2={:.2}: mean monitoring threshold {:.3e}, mean cap on imposition {:.0} USD",
        c.p1, c.p2, c.lambda_hat_mean, c.imposition_mean
    );
    Ok(())
}
