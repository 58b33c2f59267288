//! `opcost` command-line driver.
//!
//! Every subcommand reads a scenario (the shipped headline scenario when
//! `--scenario` is omitted), writes its tables under `--out`, and prints one
//! summary line per metric. Exit codes: 0 on success, 2 for scenario
//! validation or I/O errors, 3 for domain errors raised while computing.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{
    self, break_even_distribution, cumulative_savings_rows, fixed_cost_scenarios, headline_estimates,
    imposition_estimators, phase_curve, published_checks, savings_curve, DetectionMode, EstimateSummary, Metric,
    Unit,
};
use crate::cost::{campaign_cost_expected, ModelConfig, ModelKind};
use crate::params::{midpoint, sample, SampleSet};
use crate::rng;
use crate::scenario::{self, emit_table, parse_scenario, Field, ScenarioFile, Schema};
use crate::sim::{simulate_campaign, SimResult};
use crate::stats;
use crate::strategy::grid;
use crate::threshold::{lambda_hat_manual, lambda_hat_open, min_viable_scale, p_hat_manual};
use crate::{Error, Result};

/// The scenario used when `--scenario` is omitted.
pub const DEFAULT_SCENARIO: &str = include_str!("../scenarios/paper_headline.json");

#[derive(Debug, Parser)]
#[command(name = "opcost", version, about = "Monte Carlo cost model for content-generation campaigns")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Scenario JSON file.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Master seed; overrides OPCOST_SEED and the scenario seed.
    #[arg(long, env = "OPCOST_SEED")]
    pub seed: Option<u64>,
    /// Sample count override.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Worker threads. Affects speed only.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the parameter draws.
    Sample(Common),
    /// Expected campaign cost of every option and the cheapest one.
    Evaluate(Common),
    /// Break-even thresholds for the scenario's options.
    Thresholds(Common),
    /// Optimal-strategy map over the (p1, p2) plane.
    StrategyMap(Common),
    /// One-at-a-time sensitivity of the scenario's metrics.
    Sensitivity(Common),
    /// Headline estimates with 95% intervals.
    Headline(Common),
    /// Event-level campaign simulations at the midpoint draw, as JSON lines.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Runs per option.
        #[arg(long, default_value_t = 100)]
        runs: u64,
    },
    /// Every figure dataset, the headline table and a comparison against
    /// published values.
    ReproducePaper(Common),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Sample(c)
            | Command::Evaluate(c)
            | Command::Thresholds(c)
            | Command::StrategyMap(c)
            | Command::Sensitivity(c)
            | Command::Headline(c)
            | Command::ReproducePaper(c) => c,
            Command::Simulate { common, .. } => common,
        }
    }
}

/// Parses `args` and runs the command, printing errors to stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli.command) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a command and returns its summary lines.
pub fn run(command: &Command) -> Result<Vec<String>> {
    let common = command.common();
    let mut scenario = match &common.scenario {
        Some(p) => scenario::load_scenario(p)?,
        None => parse_scenario(DEFAULT_SCENARIO)?,
    };
    if let Some(seed) = common.seed {
        scenario.seed = seed;
    }
    if let Some(n) = common.samples {
        if n == 0 {
            return Err(Error::invalid("--samples", "must be at least 1"));
        }
        scenario.samples = n;
    }
    let ctx = Ctx {
        scenario,
        out: common.out.clone(),
    };
    let body = || match command {
        Command::Sample(_) => ctx.sample(),
        Command::Evaluate(_) => ctx.evaluate(),
        Command::Thresholds(_) => ctx.thresholds(),
        Command::StrategyMap(_) => ctx.strategy_map(),
        Command::Sensitivity(_) => ctx.sensitivity(),
        Command::Headline(_) => ctx.headline(),
        Command::Simulate { runs, .. } => ctx.simulate(*runs),
        Command::ReproducePaper(_) => ctx.reproduce(),
    };
    match common.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::domain(e.to_string()))?
            .install(body),
        None => body(),
    }
}

struct Ctx {
    scenario: ScenarioFile,
    out: PathBuf,
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn summary_row(e: &EstimateSummary) -> Vec<Field> {
    vec![
        e.metric.clone().into(),
        e.mean.into(),
        e.ci_lo.into(),
        e.ci_hi.into(),
        e.unit.id().into(),
        e.sample_count.into(),
    ]
}

fn summary_line(e: &EstimateSummary) -> String {
    format!(
        "{}: mean={} ci95=[{}, {}] {}",
        e.metric,
        scenario::fmt_sig9(e.mean),
        scenario::fmt_sig9(e.ci_lo),
        scenario::fmt_sig9(e.ci_hi),
        e.unit.id()
    )
}

impl Ctx {
    fn write(&self, file: &str, schema: &Schema, rows: &[Vec<Field>]) -> Result<()> {
        self.write_raw(file, &emit_table(schema, rows)?)
    }

    fn write_raw(&self, file: &str, text: &str) -> Result<()> {
        fs::create_dir_all(&self.out).map_err(|e| io_err(&self.out, e))?;
        let path = self.out.join(file);
        fs::write(&path, text).map_err(|e| io_err(&path, e))
    }

    fn samples(&self) -> Result<SampleSet> {
        sample(&self.scenario.ranges, self.scenario.samples, self.scenario.seed)
    }

    fn n(&self) -> f64 {
        self.scenario.campaign_n as f64
    }

    fn sample(&self) -> Result<Vec<String>> {
        let s = self.samples()?;
        let rows: Vec<Vec<Field>> = s
            .draws()
            .iter()
            .enumerate()
            .map(|(i, d)| vec![i.into(), d.alpha.into(), d.w.into(), d.l.into(), d.ic.into(), d.penalty.into()])
            .collect();
        self.write("samples.csv", &scenario::SAMPLES, &rows)?;
        let manual: Vec<f64> = s.draws().iter().map(crate::cost::manual_marginal_cost).collect();
        Ok(vec![format!(
            "manual_cost: mean={} over {} draws",
            scenario::fmt_sig9(stats::mean(&manual)),
            s.count()
        )])
    }

    fn evaluate(&self) -> Result<Vec<String>> {
        let s = self.samples()?;
        let options = &self.scenario.options;
        if options.is_empty() {
            return Err(Error::invalid("options", "evaluate needs at least one option"));
        }
        let per_draw: Vec<Vec<crate::cost::OptionCost>> = s
            .draws()
            .par_iter()
            .map(|d| options.iter().map(|o| campaign_cost_expected(self.n(), d, o)).collect())
            .collect::<Result<_>>()?;
        let count = per_draw.len() as f64;
        let mut shares = vec![0usize; options.len()];
        for costs in &per_draw {
            shares[argmin(options, &costs.iter().map(|c| c.total).collect::<Vec<_>>())] += 1;
        }
        let mean_of = |k: usize, f: fn(&crate::cost::OptionCost) -> f64| {
            per_draw.iter().map(|costs| f(&costs[k])).sum::<f64>() / count
        };
        let totals: Vec<f64> = (0..options.len()).map(|k| mean_of(k, |c| c.total)).collect();
        let rows: Vec<Vec<Field>> = options
            .iter()
            .enumerate()
            .map(|(k, o)| {
                vec![
                    o.name.clone().into(),
                    o.kind.id().into(),
                    mean_of(k, |c| c.labor).into(),
                    mean_of(k, |c| c.inference).into(),
                    mean_of(k, |c| c.expected_penalties).into(),
                    mean_of(k, |c| c.fixed).into(),
                    totals[k].into(),
                    (shares[k] as f64 / count).into(),
                ]
            })
            .collect();
        self.write("evaluate.csv", &scenario::EVALUATE, &rows)?;
        let best = &options[argmin(options, &totals)];
        let mut lines: Vec<String> = options
            .iter()
            .enumerate()
            .map(|(k, o)| {
                format!(
                    "{}: mean_total={} chosen_share={}",
                    o.name,
                    scenario::fmt_sig9(totals[k]),
                    scenario::fmt_sig9(shares[k] as f64 / count)
                )
            })
            .collect();
        lines.push(format!("chosen={} kind={}", best.name, best.kind.id()));
        Ok(lines)
    }

    fn thresholds(&self) -> Result<Vec<String>> {
        let s = self.samples()?;
        let n = self.n();
        let options = &self.scenario.options;
        let mut rows = Vec::new();
        let mut lines = Vec::new();
        let mut push = |quantity: &str, option: String, values: Vec<f64>| {
            let e = analysis::summarize(quantity, Unit::Rate, &values);
            lines.push(format!(
                "{quantity}[{option}]: mean={} ci95=[{}, {}]",
                scenario::fmt_sig9(e.mean),
                scenario::fmt_sig9(e.ci_lo),
                scenario::fmt_sig9(e.ci_hi)
            ));
            rows.push(vec![
                quantity.into(),
                option.into(),
                e.mean.into(),
                e.ci_lo.into(),
                e.ci_hi.into(),
                e.sample_count.into(),
            ]);
        };
        let each = |f: &(dyn Fn(&crate::params::ParamDraw) -> Result<f64> + Sync)| -> Result<Vec<f64>> {
            s.draws().par_iter().map(f).collect()
        };
        for o in options.iter().filter(|o| o.kind != ModelKind::Manual) {
            let values = each(&|d| Ok(p_hat_manual(d, o.effective_lambda(), o.penalty_surcharge).value))?;
            push("p_hat_manual", o.name.clone(), values);
        }
        for a in options.iter().filter(|o| o.kind == ModelKind::Api) {
            push("lambda_hat_manual", a.name.clone(), each(&|d| Ok(lambda_hat_manual(d, a.p)?.value))?);
            for b in options.iter().filter(|o| o.kind == ModelKind::OpenSource && o.p < a.p) {
                let values = each(&|d| Ok(lambda_hat_open(d, a.p, b.p, b.fixed_cost, n)?.value))?;
                push("lambda_hat_open", format!("{}|{}", a.name, b.name), values);
            }
        }
        for o in options.iter().filter(|o| o.kind == ModelKind::OpenSource && o.fixed_cost > 0.0) {
            let competitors: Vec<ModelConfig> = options
                .iter()
                .filter(|c| c.kind != ModelKind::Manual && c.effective_fixed_cost() < o.fixed_cost)
                .cloned()
                .collect();
            if competitors.is_empty() {
                continue;
            }
            // draws where some competitor always stays cheaper have no finite scale
            let values = each(&|d| match min_viable_scale(d, o.p, o.fixed_cost, &competitors) {
                Ok(r) => Ok(r.value),
                Err(Error::NeverViable { .. }) => Ok(f64::INFINITY),
                Err(e) => Err(e),
            })?;
            push("min_viable_scale", o.name.clone(), values);
        }
        self.write("thresholds.csv", &scenario::THRESHOLDS, &rows)?;
        Ok(lines)
    }

    fn strategy_rows(&self, s: &SampleSet) -> Result<(Vec<Vec<Field>>, [usize; 4])> {
        let g = &self.scenario.grids;
        let map = grid(s, &g.p1_points(), &g.p2_points(), self.n(), self.scenario.headline.open_fixed_cost)?;
        let mut modes = [0usize; 4];
        let rows = map
            .cells
            .iter()
            .map(|c| {
                modes[c.scenario_mode as usize] += 1;
                vec![
                    c.p1.into(),
                    c.p2.into(),
                    c.scenario_mode.id().into(),
                    c.lambda_hat_mean.into(),
                    c.imposition_mean.into(),
                    c.imposition_q25.into(),
                    c.imposition_q75.into(),
                ]
            })
            .collect();
        Ok((rows, modes))
    }

    fn strategy_map(&self) -> Result<Vec<String>> {
        let (rows, modes) = self.strategy_rows(&self.samples()?)?;
        self.write("figure4.csv", &scenario::FIGURE4, &rows)?;
        Ok(crate::strategy::Scenario::ALL
            .iter()
            .map(|s| format!("{}: {} cells", s.id(), modes[*s as usize]))
            .collect())
    }

    fn sensitivity_rows(&self) -> Result<(Vec<Vec<Field>>, Vec<String>)> {
        let sc = &self.scenario;
        let per_metric = sc
            .metrics
            .par_iter()
            .map(|&m| analysis::sensitivity(m, &sc.ranges, sc.samples, metric_seed(sc.seed, m), &sc.headline))
            .collect::<Result<Vec<_>>>()?;
        let mut rows = Vec::new();
        let mut lines = Vec::new();
        for table in per_metric {
            for r in &table {
                rows.push(vec![
                    r.metric.id().into(),
                    r.varied.id().into(),
                    r.q0.into(),
                    r.q25.into(),
                    r.q50.into(),
                    r.q75.into(),
                    r.q100.into(),
                ]);
            }
            let iqrs: Vec<String> =
                table.iter().map(|r| format!("{}={}", r.varied.id(), scenario::fmt_sig9(r.iqr()))).collect();
            lines.push(format!("{}: iqr {}", table[0].metric.id(), iqrs.join(" ")));
        }
        Ok((rows, lines))
    }

    fn sensitivity(&self) -> Result<Vec<String>> {
        let (rows, lines) = self.sensitivity_rows()?;
        self.write("figure5.csv", &scenario::FIGURE5, &rows)?;
        Ok(lines)
    }

    fn headline_tables(&self, s: &SampleSet) -> Result<Vec<String>> {
        let c = &self.scenario.headline;
        let all = headline_estimates(s, c)?;
        let chosen: Vec<&EstimateSummary> = all
            .iter()
            .filter(|e| self.scenario.metrics.iter().any(|m| m.id() == e.metric))
            .collect();
        self.write(
            "headline.csv",
            &scenario::HEADLINE,
            &chosen.iter().map(|e| summary_row(e)).collect::<Vec<_>>(),
        )?;
        let mut lines: Vec<String> = chosen.iter().map(|e| summary_line(e)).collect();
        if self.scenario.metrics.contains(&Metric::MaxImpositionOpen) {
            let alt = imposition_estimators(s, c)?;
            self.write(
                "imposition_estimators.csv",
                &scenario::IMPOSITION_ESTIMATORS,
                &alt.iter().map(summary_row).collect::<Vec<_>>(),
            )?;
            lines.extend(alt.iter().skip(1).map(summary_line));
        }
        Ok(lines)
    }

    fn headline(&self) -> Result<Vec<String>> {
        self.headline_tables(&self.samples()?)
    }

    fn simulate(&self, runs: u64) -> Result<Vec<String>> {
        #[derive(Serialize)]
        struct Record<'a> {
            option: &'a str,
            run: u64,
            #[serde(flatten)]
            result: SimResult,
        }
        let d = midpoint(&self.scenario.ranges);
        let n = self.scenario.campaign_n;
        let mut text = String::new();
        let mut lines = Vec::new();
        for (k, o) in self.scenario.options.iter().enumerate() {
            if o.kind == ModelKind::Manual {
                continue;
            }
            let results = (0..runs)
                .into_par_iter()
                .map(|r| simulate_campaign(n, &d, o, rng::derive_key(self.scenario.seed, &[k as u64, r])))
                .collect::<Result<Vec<_>>>()?;
            let totals: Vec<f64> = results.iter().map(|r| r.total_cost).collect();
            let detections: Vec<f64> = results.iter().map(|r| r.detections as f64).collect();
            lines.push(format!(
                "{}: runs={} mean_total={} mean_detections={}",
                o.name,
                runs,
                scenario::fmt_sig9(stats::mean(&totals)),
                scenario::fmt_sig9(stats::mean(&detections))
            ));
            for (run, result) in results.into_iter().enumerate() {
                let rec = Record {
                    option: &o.name,
                    run: run as u64,
                    result,
                };
                text.push_str(&serde_json::to_string(&rec).expect("record serializes"));
                text.push('\n');
            }
        }
        self.write_raw("simulate.jsonl", &text)?;
        Ok(lines)
    }

    fn reproduce(&self) -> Result<Vec<String>> {
        let s = self.samples()?;
        let g = &self.scenario.grids;
        let c = &self.scenario.headline;
        let mut lines = Vec::new();

        let curve = savings_curve(&s, &g.p_points())?;
        let rows: Vec<Vec<Field>> =
            curve.iter().map(|p| vec![p.p.into(), p.mean.into(), p.q25.into(), p.q75.into()]).collect();
        self.write("figure1a.csv", &scenario::FIGURE1A, &rows)?;
        let p_hat = break_even_distribution(&s);
        let rows: Vec<Vec<Field>> = p_hat.iter().enumerate().map(|(i, &v)| vec![i.into(), v.into()]).collect();
        self.write("figure1b.csv", &scenario::FIGURE1B, &rows)?;

        let surface = cumulative_savings_rows(&s, &g.p_points(), &g.n_points())?;
        let rows: Vec<Vec<Field>> = surface.iter().map(|&(n, p, v)| vec![n.into(), p.into(), v.into()]).collect();
        self.write("figure2.csv", &scenario::FIGURE2, &rows)?;

        let mut rows = Vec::new();
        for &p in &g.phase_p_points() {
            for mode in [DetectionMode::Expected, DetectionMode::Realized] {
                for pt in phase_curve(&s, p, &g.lambda_points(), c.savings_n, mode)? {
                    rows.push(vec![
                        pt.p.into(),
                        pt.lambda.into(),
                        pt.mode.id().into(),
                        pt.imposed_mean.into(),
                        pt.imposed_q25.into(),
                        pt.imposed_q50.into(),
                        pt.imposed_q75.into(),
                        pt.cap_mean.into(),
                        pt.share_at_cap.into(),
                    ]);
                }
            }
        }
        self.write("figure3.csv", &scenario::FIGURE3, &rows)?;

        let (rows, _) = self.strategy_rows(&s)?;
        self.write("figure4.csv", &scenario::FIGURE4, &rows)?;
        let (rows, _) = self.sensitivity_rows()?;
        self.write("figure5.csv", &scenario::FIGURE5, &rows)?;

        lines.extend(self.headline_tables(&s)?);
        let f = fixed_cost_scenarios(&s, c)?;
        let mut rows: Vec<Vec<Field>> = [&f.premium_indifference_lambda, &f.finetune_vs_api, &f.training_vs_api]
            .into_iter()
            .map(summary_row)
            .collect();
        rows.push(vec![
            "automation_payback_multiple".into(),
            f.payback_multiple.into(),
            f.payback_multiple.into(),
            f.payback_multiple.into(),
            "fixed_cost_multiple".into(),
            s.count().into(),
        ]);
        self.write("fixed_cost_scenarios.csv", &scenario::HEADLINE, &rows)?;
        for e in [&f.premium_indifference_lambda, &f.finetune_vs_api, &f.training_vs_api] {
            lines.push(summary_line(e));
        }
        lines.push(format!("automation_payback_multiple: {}", scenario::fmt_sig9(f.payback_multiple)));

        let checks = published_checks(&s, c)?;
        let rows: Vec<Vec<Field>> = checks
            .iter()
            .map(|k| {
                vec![
                    k.check.clone().into(),
                    k.observed.into(),
                    k.published.into(),
                    k.lower.into(),
                    k.upper.into(),
                    k.pass.into(),
                ]
            })
            .collect();
        self.write("comparison.csv", &scenario::COMPARISON, &rows)?;
        let passed = checks.iter().filter(|k| k.pass).count();
        lines.push(format!("comparison: {passed}/{} checks pass", checks.len()));
        for k in checks.iter().filter(|k| !k.pass) {
            lines.push(format!(
                "  outside band: {} observed={} band=[{}, {}]",
                k.check,
                scenario::fmt_sig9(k.observed),
                scenario::fmt_sig9(k.lower),
                scenario::fmt_sig9(k.upper)
            ));
        }
        Ok(lines)
    }
}

fn metric_seed(seed: u64, m: Metric) -> u64 {
    let k = Metric::ALL.iter().position(|&x| x == m).expect("known metric") as u64;
    rng::derive_key(seed, &[rng::domain::SENSITIVITY, u64::MAX, k])
}

/// Index of the cheapest option; ties go to manual, then api, then open
/// source, then the earlier option.
fn argmin(options: &[ModelConfig], totals: &[f64]) -> usize {
    (0..options.len())
        .min_by(|&a, &b| {
            totals[a]
                .total_cmp(&totals[b])
                .then(options[a].kind.cmp(&options[b].kind))
                .then(a.cmp(&b))
        })
        .expect("non-empty options")
}
