//! Closed-form break-even points for a single draw.

use opcost::cost::ModelConfig;
use opcost::params::ParamDraw;
use opcost::threshold::{lambda_hat_manual, lambda_hat_open, min_viable_scale, p_hat_manual, p_hat_vs_open};

fn main() -> opcost::Result<()> {
    let d = ParamDraw::new(4.0, 6.0, 12.0, 0.005, 9.0)?;
    let n = 1e7;

    let p = p_hat_manual(&d, 0.0, 0.0);
    println!("usability needed to beat the team:            {:.4}", p.value);
    let p = p_hat_manual(&d, 0.001, 0.0);
    println!("  ... with monitoring at 1e-3:                {:.4}", p.value);
    println!("api usability needed to beat open (p2=0.7):   {:.4}", p_hat_vs_open(&d, 0.7, 0.001, 0.0, n)?.value);

    let l = lambda_hat_manual(&d, 0.75)?;
    println!("monitoring rate deterring api use (p1=0.75):  {:.3e} clamped={}", l.value, l.clamped);
    let l = lambda_hat_open(&d, 0.75, 0.7, 0.0, n)?;
    println!("  ... when open weights reach 0.70:           {:.3e} clamped={}", l.value, l.clamped);

    let api = ModelConfig::api("hosted", 0.85, 0.001);
    let open = ModelConfig::open_source("finetuned", 0.85, 600.0);
    for fc in [600.0, 4.6e6] {
        let s = min_viable_scale(&d, 1.0, fc, &[api.clone(), open.clone()])?;
        println!("outputs before a {fc:>9} investment pays off:   {:.0}", s.value);
    }
    Ok(())
}
