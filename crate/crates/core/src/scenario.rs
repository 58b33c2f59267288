//! Scenario files and CSV emission.
//!
//! A scenario is a JSON document with a mandatory `"schema": 1` field.
//! Unknown keys anywhere are rejected, and every validation error names the
//! offending key path (`options[1].lambda`, `grids.p1`, ...).
//!
//! ```
//! let s = opcost::scenario::parse_scenario(
//!     r#"{"schema": 1, "options": [{"name": "m", "kind": "manual"}], "campaign_n": 1000}"#,
//! )
//! .unwrap();
//! assert_eq!((s.samples, s.seed), (10_000, 0));
//! ```

use serde::{Deserialize, Serialize};

use crate::analysis::{HeadlineConstants, Metric};
use crate::cost::ModelConfig;
use crate::params::ParamRanges;
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// A one-dimensional grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GridSpec {
    Values(Vec<f64>),
    /// `num` evenly spaced points from `start` to `stop` inclusive.
    Linspace { start: f64, stop: f64, num: usize },
    /// `num` points `10^e` with `e` evenly spaced from `start_exp` to `stop_exp`.
    Logspace { start_exp: f64, stop_exp: f64, num: usize },
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        let spaced = |a: f64, b: f64, num: usize| -> Vec<f64> {
            match num {
                0 => vec![],
                1 => vec![a],
                _ => (0..num).map(|i| a + (b - a) * i as f64 / (num - 1) as f64).collect(),
            }
        };
        match self {
            GridSpec::Values(v) => v.clone(),
            GridSpec::Linspace { start, stop, num } => spaced(*start, *stop, *num),
            GridSpec::Logspace {
                start_exp,
                stop_exp,
                num,
            } => spaced(*start_exp, *stop_exp, *num).into_iter().map(|e| 10f64.powf(e)).collect(),
        }
    }
}

/// Optional grid overrides.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Grids {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p1: Option<GridSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p2: Option<GridSpec>,
    /// Detection rates for the phase curves.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<GridSpec>,
    /// Campaign sizes for the cumulative savings surface.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<GridSpec>,
    /// Usability rates for the savings curve and surface.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<GridSpec>,
    /// Usability rates at which phase curves are drawn.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_p: Option<GridSpec>,
}

fn rate_grid() -> GridSpec {
    GridSpec::Linspace {
        start: 0.01,
        stop: 1.0,
        num: 100,
    }
}

impl Grids {
    pub fn p1_points(&self) -> Vec<f64> {
        self.p1.clone().unwrap_or_else(rate_grid).points()
    }

    pub fn p2_points(&self) -> Vec<f64> {
        self.p2.clone().unwrap_or_else(rate_grid).points()
    }

    pub fn lambda_points(&self) -> Vec<f64> {
        self.lambda
            .clone()
            .unwrap_or(GridSpec::Logspace {
                start_exp: -5.0,
                stop_exp: 0.0,
                num: 51,
            })
            .points()
    }

    pub fn n_points(&self) -> Vec<f64> {
        self.n
            .clone()
            .unwrap_or(GridSpec::Linspace {
                start: 0.0,
                stop: 1e7,
                num: 51,
            })
            .points()
    }

    pub fn p_points(&self) -> Vec<f64> {
        self.p.clone().unwrap_or_else(rate_grid).points()
    }

    pub fn phase_p_points(&self) -> Vec<f64> {
        self.phase_p
            .clone()
            .unwrap_or(GridSpec::Values(vec![0.3, 0.5, 0.7, 0.9]))
            .points()
    }

    fn validate(&self) -> Result<()> {
        let rate_grids = [("p1", &self.p1), ("p2", &self.p2), ("p", &self.p), ("phase_p", &self.phase_p)];
        for (key, g) in rate_grids {
            if let Some(g) = g {
                check_grid(key, g, |x| x > 0.0 && x <= 1.0, "rates must lie in (0, 1]")?;
            }
        }
        if let Some(g) = &self.lambda {
            check_grid("lambda", g, |x| (0.0..=1.0).contains(&x), "detection rates must lie in [0, 1]")?;
        }
        if let Some(g) = &self.n {
            check_grid("n", g, |x| x.is_finite() && x >= 0.0, "campaign sizes must be finite and non-negative")?;
        }
        Ok(())
    }
}

fn check_grid(key: &str, g: &GridSpec, ok: impl Fn(f64) -> bool, message: &str) -> Result<()> {
    let path = format!("grids.{key}");
    let points = g.points();
    if points.is_empty() {
        return Err(Error::invalid(path, "grid is empty"));
    }
    if let Some(bad) = points.iter().find(|&&x| !ok(x)) {
        return Err(Error::invalid(path, format!("{message}, got {bad}")));
    }
    Ok(())
}

fn default_samples() -> usize {
    10_000
}

fn default_metrics() -> Vec<Metric> {
    Metric::ALL.to_vec()
}

fn is_default<T: Default + PartialEq>(x: &T) -> bool {
    *x == T::default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema: u32,
    #[serde(default)]
    pub ranges: ParamRanges,
    pub options: Vec<ModelConfig>,
    pub campaign_n: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "is_default")]
    pub grids: Grids,
    #[serde(default = "default_metrics")]
    pub metrics: Vec<Metric>,
    /// Scenario constants behind the headline metrics.
    #[serde(default, skip_serializing_if = "is_default")]
    pub headline: HeadlineConstants,
}

impl ScenarioFile {
    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::invalid(
                "schema",
                format!("unsupported schema {}, expected {SCHEMA_VERSION}", self.schema),
            ));
        }
        self.ranges.validate().map_err(|e| Error::invalid("ranges", plain(e)))?;
        for (i, o) in self.options.iter().enumerate() {
            o.validate().map_err(|e| Error::invalid(format!("options[{i}]"), plain(e)))?;
        }
        if self.samples == 0 {
            return Err(Error::invalid("samples", "must be at least 1"));
        }
        self.grids.validate()?;
        if self.metrics.is_empty() {
            return Err(Error::invalid("metrics", "list must not be empty"));
        }
        validate_headline(&self.headline)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

fn validate_headline(c: &HeadlineConstants) -> Result<()> {
    let rates = [
        ("team_p", c.team_p),
        ("deterrent_p1", c.deterrent_p1),
        ("imposition_p1", c.imposition_p1),
        ("imposition_p2", c.imposition_p2),
        ("finetune_p", c.finetune_p),
        ("training_p", c.training_p),
        ("premium_p", c.premium_p),
    ];
    for (key, p) in rates {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::invalid(format!("headline.{key}"), format!("rate must lie in (0, 1], got {p}")));
        }
    }
    if !(0.0..=1.0).contains(&c.finetune_api_lambda) {
        return Err(Error::invalid("headline.finetune_api_lambda", "detection rate must lie in [0, 1]"));
    }
    let amounts = [
        ("savings_n", c.savings_n),
        ("imposition_n", c.imposition_n),
        ("open_fixed_cost", c.open_fixed_cost),
        ("finetune_fixed_cost", c.finetune_fixed_cost),
        ("training_fixed_cost", c.training_fixed_cost),
        ("premium_surcharge", c.premium_surcharge),
    ];
    for (key, v) in amounts {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::invalid(format!("headline.{key}"), format!("must be finite and non-negative, got {v}")));
        }
    }
    Ok(())
}

fn plain(e: Error) -> String {
    match e {
        Error::Domain(m) => m,
        other => other.to_string(),
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<ScenarioFile> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let parsed: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let message = inner.to_string();
        if inner.is_data() {
            Error::Invalid { path, message }
        } else {
            Error::Syntax { path, message }
        }
    })?;
    parsed.validate()?;
    Ok(parsed)
}

/// Reads and parses a scenario file.
pub fn load_scenario(path: &std::path::Path) -> Result<ScenarioFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_scenario(&text)
}

/// `%.9g`-style formatting: nine significant digits, trailing zeros
/// dropped, exponent form outside `[1e-5, 1e9)`.
pub fn fmt_sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..9).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        trim_zeros(&format!("{x:.*}", (8 - exp) as usize)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Str(String),
    Int(u64),
    Float(f64),
}

impl Field {
    fn render(&self) -> String {
        match self {
            Field::Str(s) => s.clone(),
            Field::Int(i) => i.to_string(),
            Field::Float(x) => fmt_sig9(*x),
        }
    }
}

impl From<f64> for Field {
    fn from(x: f64) -> Self {
        Field::Float(x)
    }
}

impl From<u64> for Field {
    fn from(x: u64) -> Self {
        Field::Int(x)
    }
}

impl From<usize> for Field {
    fn from(x: usize) -> Self {
        Field::Int(x as u64)
    }
}

impl From<&str> for Field {
    fn from(s: &str) -> Self {
        Field::Str(s.to_string())
    }
}

impl From<String> for Field {
    fn from(s: String) -> Self {
        Field::Str(s)
    }
}

impl From<bool> for Field {
    fn from(b: bool) -> Self {
        Field::Str(if b { "pass" } else { "fail" }.to_string())
    }
}

/// Named column layout of an output table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Schema {
    pub name: &'static str,
    pub columns: &'static [&'static str],
}

pub const HEADLINE: Schema = Schema {
    name: "headline",
    columns: &["metric", "mean", "ci_lo", "ci_hi", "unit", "samples"],
};
pub const SAMPLES: Schema = Schema {
    name: "samples",
    columns: &["sample", "alpha", "w", "L", "IC", "P"],
};
pub const EVALUATE: Schema = Schema {
    name: "evaluate",
    columns: &["option", "kind", "labor", "inference", "expected_penalties", "fixed", "total", "chosen"],
};
pub const THRESHOLDS: Schema = Schema {
    name: "thresholds",
    columns: &["quantity", "option", "mean", "ci_lo", "ci_hi", "samples"],
};
pub const FIGURE1A: Schema = Schema {
    name: "figure1a",
    columns: &["p", "mean_savings", "q25", "q75"],
};
pub const FIGURE1B: Schema = Schema {
    name: "figure1b",
    columns: &["sample", "p_hat"],
};
pub const FIGURE2: Schema = Schema {
    name: "figure2",
    columns: &["n", "p", "mean_savings"],
};
pub const FIGURE3: Schema = Schema {
    name: "figure3",
    columns: &[
        "p",
        "lambda",
        "mode",
        "imposed_mean",
        "imposed_q25",
        "imposed_q50",
        "imposed_q75",
        "cap_mean",
        "share_at_cap",
    ],
};
pub const FIGURE4: Schema = Schema {
    name: "figure4",
    columns: &[
        "p1",
        "p2",
        "scenario_mode",
        "lambda_hat_mean",
        "imposition_mean",
        "imposition_q25",
        "imposition_q75",
    ],
};
pub const FIGURE5: Schema = Schema {
    name: "figure5",
    columns: &["metric", "varied", "q0", "q25", "q50", "q75", "q100"],
};
pub const IMPOSITION_ESTIMATORS: Schema = Schema {
    name: "imposition_estimators",
    columns: &["estimator", "mean", "ci_lo", "ci_hi", "unit", "samples"],
};
pub const COMPARISON: Schema = Schema {
    name: "comparison",
    columns: &["check", "observed", "published", "lower", "upper", "result"],
};

/// Renders `rows` as CSV under `schema`. Every row must have exactly one
/// field per column; an empty row set yields the header alone.
pub fn emit_table(schema: &Schema, rows: &[Vec<Field>]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| Error::Schema(format!("{}: {e}", schema.name));
    w.write_record(schema.columns).map_err(io)?;
    for (i, row) in rows.iter().enumerate() {
        if row.len() != schema.columns.len() {
            return Err(Error::Schema(format!(
                "{} row {i} has {} fields, expected {}",
                schema.name,
                row.len(),
                schema.columns.len()
            )));
        }
        w.write_record(row.iter().map(Field::render)).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Schema(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::ModelKind;

    const MINIMAL: &str = r#"{"schema": 1, "options": [{"name": "m", "kind": "manual"}], "campaign_n": 1000}"#;

    #[test]
    fn minimal_document_gets_defaults() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.samples, 10_000);
        assert_eq!(s.seed, 0);
        assert_eq!(s.ranges, crate::params::default_ranges());
        assert_eq!(s.metrics, Metric::ALL.to_vec());
        assert_eq!(s.options[0].kind, ModelKind::Manual);
    }

    #[test]
    fn open_source_with_lambda_names_the_option() {
        let doc = r#"{"schema": 1, "campaign_n": 10, "options": [
            {"name": "m", "kind": "manual"},
            {"name": "llama", "kind": "open_source", "p": 0.8, "lambda": 0.01}]}"#;
        match parse_scenario(doc) {
            Err(Error::Invalid { path, message }) => {
                assert_eq!(path, "options[1]");
                assert!(message.contains("llama"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_fatal_with_path() {
        let doc = r#"{"schema": 1, "campaign_n": 10, "options": [{"name": "a", "kind": "api", "lamda": 0.1}]}"#;
        match parse_scenario(doc) {
            Err(e @ Error::Invalid { .. }) => {
                assert!(e.to_string().contains("options[0]"), "{e}");
                assert_eq!(e.exit_code(), 2);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_scenario(r#"{"schema": 1, "campaign_n": 1, "options": [], "sample": 5}"#).is_err());
    }

    #[test]
    fn bad_values_and_syntax() {
        let bad_p = r#"{"schema": 1, "campaign_n": 1, "options": [{"name": "a", "kind": "api", "p": 1.5}]}"#;
        assert!(matches!(parse_scenario(bad_p), Err(Error::Invalid { path, .. }) if path == "options[0]"));
        let bad_schema = r#"{"schema": 2, "campaign_n": 1, "options": []}"#;
        assert!(matches!(parse_scenario(bad_schema), Err(Error::Invalid { path, .. }) if path == "schema"));
        let no_schema = r#"{"campaign_n": 1, "options": []}"#;
        assert!(matches!(parse_scenario(no_schema), Err(Error::Invalid { .. })));
        assert!(matches!(parse_scenario("{\"schema\": 1,"), Err(Error::Syntax { .. })));
        let bad_grid = r#"{"schema": 1, "campaign_n": 1, "options": [], "grids": {"p1": {"values": [0.0, 0.5]}}}"#;
        assert!(matches!(parse_scenario(bad_grid), Err(Error::Invalid { path, .. }) if path == "grids.p1"));
    }

    #[test]
    fn shipped_headline_scenario() {
        let s = parse_scenario(include_str!("../scenarios/paper_headline.json")).unwrap();
        let c = &s.headline;
        assert_eq!(c.team_p, 0.75);
        assert_eq!(c.imposition_p2, 0.70);
        assert_eq!(c.finetune_fixed_cost, 600.0);
        assert_eq!(c.finetune_api_lambda, 0.001);
        assert_eq!(c.savings_n, 1e7);
        assert_eq!(c.imposition_n, 1e7);
        assert_eq!(s.samples, 10_000);
    }

    #[test]
    fn grid_points() {
        let g = Grids::default();
        let p1 = g.p1_points();
        assert_eq!(p1.len(), 100);
        assert!((p1[0] - 0.01).abs() < 1e-15 && p1[99] == 1.0);
        let l = g.lambda_points();
        assert!((l[0] - 1e-5).abs() < 1e-20 && l[50] == 1.0);
    }

    #[test]
    fn sig9_formatting() {
        assert_eq!(fmt_sig9(0.0), "0");
        assert_eq!(fmt_sig9(0.25), "0.25");
        assert_eq!(fmt_sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_sig9(3_050_123.456_789), "3050123.46");
        assert_eq!(fmt_sig9(74_588.0), "74588");
        assert_eq!(fmt_sig9(1e9), "1e+09");
        assert_eq!(fmt_sig9(4.07e8), "407000000");
        assert_eq!(fmt_sig9(1.234e-6), "1.234e-06");
        assert_eq!(fmt_sig9(0.0001), "0.0001");
        assert_eq!(fmt_sig9(-2.5), "-2.5");
        assert_eq!(fmt_sig9(999_999_999.7), "1e+09");
    }

    #[test]
    fn emit_headers_and_schema_checks() {
        assert_eq!(emit_table(&HEADLINE, &[]).unwrap(), "metric,mean,ci_lo,ci_hi,unit,samples\n");
        let row = vec![
            Field::from("threshold_p"),
            0.25.into(),
            0.12.into(),
            0.5.into(),
            "rate".into(),
            10_000usize.into(),
        ];
        assert_eq!(
            emit_table(&HEADLINE, std::slice::from_ref(&row)).unwrap(),
            "metric,mean,ci_lo,ci_hi,unit,samples\nthreshold_p,0.25,0.12,0.5,rate,10000\n"
        );
        assert!(matches!(emit_table(&HEADLINE, &[row[..3].to_vec()]), Err(Error::Schema(_))));
        let quoted = emit_table(&FIGURE1B, &[vec!["a,b".into(), 1.0.into()]]).unwrap();
        assert!(quoted.ends_with("\"a,b\",1\n"));
    }
}
