//! Load a scenario file, evaluate its options, and emit a CSV table.
//!
//!     cargo run --example scenario_files -- crates/core/scenarios/api_tiers.json

use opcost::cost::{total_cost, CampaignSpec};
use opcost::params::sample;
use opcost::scenario::{emit_table, load_scenario, parse_scenario, Field, EVALUATE};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/three_options.json").into());
    let s = load_scenario(path.as_ref())?;
    println!("{} options, campaign of {} outputs, {} samples", s.options.len(), s.campaign_n, s.samples);

    let spec = CampaignSpec::new(s.campaign_n, s.options.clone())?;
    let draws = sample(&s.ranges, s.samples, s.seed)?;
    // mean of each cost component over the parameter draws
    let k = s.options.len();
    let mut means = vec![[0.0; 5]; k];
    for d in draws.draws() {
        for (acc, o) in means.iter_mut().zip(total_cost(&spec, d).options) {
            for (a, x) in acc.iter_mut().zip([o.labor, o.inference, o.expected_penalties, o.fixed, o.total]) {
                *a += x / draws.count() as f64;
            }
        }
    }
    let chosen = (0..k).min_by(|&a, &b| means[a][4].total_cmp(&means[b][4])).unwrap_or(0);
    let rows: Vec<Vec<Field>> = s
        .options
        .iter()
        .zip(&means)
        .enumerate()
        .map(|(i, (m, c))| {
            let mut row: Vec<Field> = vec![m.name.clone().into(), m.kind.id().into()];
            row.extend(c.iter().map(|&x| Field::from(x)));
            row.push((i == chosen).into());
            row
        })
        .collect();
    print!("{}", emit_table(&EVALUATE, &rows)?);

    // round trip, and what a typo looks like
    assert_eq!(parse_scenario(&s.to_json())?, s);
    let err = parse_scenario(r#"{"schema": 1, "campaign_n": 5, "options": [], "sampels": 10}"#).unwrap_err();
    println!("rejected: {err}");
    Ok(())
}
