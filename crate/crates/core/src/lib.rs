//! Monte Carlo cost model for large-scale content-generation campaigns.
//!
//! Three ways of producing `n` usable outputs are compared: manual
//! authorship, a monitored API-accessible language model reviewed by a human,
//! and a locally run open-source model with an up-front fixed cost. The crate
//! provides:
//!
//! - [`params`]: the five uncertain parameters and deterministic sampling.
//! - [`cost`]: per-output and campaign cost formulas and the three-way argmin.
//! - [`threshold`]: closed-form break-even thresholds with a bisection cross-check.
//! - [`strategy`]: optimal-strategy classification over the `(p1, p2)` plane.
//! - [`analysis`]: headline estimates, sensitivity rows and figure datasets.
//! - [`sim`]: an event-level campaign simulator used as an independent oracle.
//! - [`scenario`]: JSON scenario files and CSV emission.
//! - [`cli`]: the `opcost` command-line driver.
//!
//! ```
//! use opcost::cost::{total_cost, CampaignSpec, ModelConfig};
//! use opcost::params::{default_ranges, midpoint};
//!
//! let draw = midpoint(&default_ranges());
//! let spec = CampaignSpec::new(
//!     1_000_000,
//!     vec![
//!         ModelConfig::manual("manual"),
//!         ModelConfig::api("api", 0.85, 0.001),
//!         ModelConfig::open_source("finetuned", 0.85, 600.0),
//!     ],
//! )
//! .unwrap();
//! let breakdown = total_cost(&spec, &draw);
//! assert_eq!(breakdown.chosen().name, "finetuned");
//! ```

pub mod analysis;
pub mod cli;
pub mod cost;
pub mod error;
pub mod params;
pub mod rng;
pub mod scenario;
pub mod sim;
pub mod stats;
pub mod strategy;
pub mod threshold;

pub use error::{Error, Result};
