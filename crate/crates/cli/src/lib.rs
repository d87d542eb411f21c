//! Scenario configuration, run dispatch and report emission for the `aivsim`
//! binary.

pub mod report;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::Parser;
use serde_json::Value;

use aivsim_core::sim::{self, SimConfig};
use aivsim_core::{Metrics, Scenario};

/// Process exit codes. Faulted runs complete but are distinguishable.
pub mod exit_code {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const ROUTING: i32 = 3;
    pub const FAULTED: i32 = 4;
}

#[derive(Debug, Parser)]
#[command(
    name = "aivsim",
    about = "Deterministic AIV fleet simulator: auction-based task allocation \
             and battery charge management across eight strategies",
    version
)]
pub struct Cli {
    /// Scenarios to run: sc1..sc8, comma-separated or repeated.
    #[arg(long, value_delimiter = ',', default_value = "sc3")]
    pub scenario: Vec<String>,

    /// Bags to process per run.
    #[arg(long)]
    pub bags: Option<u32>,

    /// Fleet size.
    #[arg(long)]
    pub aivs: Option<u32>,

    /// Base seed; replication k runs with seed + k.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Seeded replications per scenario.
    #[arg(long, default_value_t = 1)]
    pub replications: u32,

    /// Config file (JSON mirroring the sim config schema).
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Generic override: dotted path into the config, e.g.
    /// `--set battery.charge_rate_per_s=0.05` or `--set dt_s=0.05`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,

    /// Output format.
    #[arg(long, default_value = "table", value_parser = ["table", "csv", "json"])]
    pub format: String,

    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Write per-run event logs (newline-delimited JSON). With several runs
    /// the scenario/replication is suffixed onto the file stem.
    #[arg(long)]
    pub trace: Option<PathBuf>,

    /// Emit the scenario-by-metric comparison matrix (medians over
    /// replications) instead of per-run listings.
    #[arg(long)]
    pub compare: bool,
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub scenario: Scenario,
    pub replication: u32,
    pub seed: u64,
    pub metrics: Metrics,
}

pub struct Session {
    pub resolved_base: SimConfig,
    pub scenarios: Vec<Scenario>,
    pub replications: u32,
    pub records: Vec<RunRecord>,
    pub speed_cap_violations: u64,
}

/// Resolve the effective config: shipped defaults, then the config file,
/// then flag overrides. Unknown keys and type mismatches are rejected with
/// the offending key named.
pub fn parse_config(cli: &Cli) -> anyhow::Result<(SimConfig, Vec<Scenario>)> {
    let mut value = serde_json::to_value(SimConfig::default()).expect("default serializes");

    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config file `{}`", path.display()))?;
        let file_value: Value = serde_json::from_str(&text)
            .with_context(|| format!("parsing config file `{}`", path.display()))?;
        merge(&mut value, file_value);
    }

    for pair in &cli.overrides {
        let (key, raw) = pair
            .split_once('=')
            .ok_or_else(|| anyhow!("override `{pair}` is not KEY=VALUE"))?;
        let parsed: Value = serde_json::from_str(raw).unwrap_or(Value::String(raw.to_string()));
        set_path(&mut value, key, parsed)
            .ok_or_else(|| anyhow!("override key `{key}` does not address an object field"))?;
    }

    if let Some(bags) = cli.bags {
        value["n_bags"] = bags.into();
    }
    if let Some(aivs) = cli.aivs {
        value["n_aivs"] = aivs.into();
    }
    if let Some(seed) = cli.seed {
        value["seed"] = seed.into();
    }

    let scenarios: Vec<Scenario> = cli
        .scenario
        .iter()
        .map(|s| Scenario::parse(s).ok_or_else(|| anyhow!("unknown scenario `{s}`")))
        .collect::<Result<_, _>>()?;
    if scenarios.is_empty() {
        return Err(anyhow!("at least one scenario is required"));
    }
    if cli.replications == 0 {
        return Err(anyhow!("replications must be at least 1"));
    }

    let config: SimConfig = serde_json::from_value(value).map_err(|e| anyhow!("config: {e}"))?;
    config.validate().map_err(|e| anyhow!("config: {e}"))?;
    Ok((config, scenarios))
}

fn merge(base: &mut Value, add: Value) {
    match (base, add) {
        (Value::Object(b), Value::Object(a)) => {
            // A tagged object (e.g. an arrival process) switching variants
            // replaces wholesale; merging across variants would leave stale
            // fields from the old one behind.
            let switches_variant = matches!(
                (b.get("kind"), a.get("kind")),
                (Some(old), Some(new)) if old != new
            );
            if switches_variant {
                *b = a;
                return;
            }
            for (k, v) in a {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn set_path(root: &mut Value, dotted: &str, new: Value) -> Option<()> {
    let mut cursor = root;
    let mut parts = dotted.split('.').peekable();
    while let Some(part) = parts.next() {
        let object = cursor.as_object_mut()?;
        if parts.peek().is_none() {
            object.insert(part.to_string(), new);
            return Some(());
        }
        cursor = object
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    None
}

/// Execute every (scenario, replication) pair in order.
pub fn execute(
    base: &SimConfig,
    scenarios: &[Scenario],
    replications: u32,
    trace: Option<&Path>,
) -> anyhow::Result<Session> {
    let mut records = Vec::new();
    let mut cap_violations = 0;
    let single = scenarios.len() == 1 && replications == 1;
    for &scenario in scenarios {
        for rep in 0..replications {
            let config = SimConfig {
                scenario,
                seed: base.seed + rep as u64,
                ..base.clone()
            };
            let out = sim::run(&config).map_err(map_sim_error)?;
            cap_violations += out.speed_cap_violations;
            if let Some(path) = trace {
                let target = if single {
                    path.to_path_buf()
                } else {
                    suffixed(path, scenario, rep)
                };
                fs::write(&target, out.log.to_ndjson())
                    .with_context(|| format!("writing trace `{}`", target.display()))?;
            }
            records.push(RunRecord {
                scenario,
                replication: rep,
                seed: config.seed,
                metrics: out.metrics,
            });
        }
    }
    Ok(Session {
        resolved_base: base.clone(),
        scenarios: scenarios.to_vec(),
        replications,
        records,
        speed_cap_violations: cap_violations,
    })
}

fn suffixed(path: &Path, scenario: Scenario, rep: u32) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("trace");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("ndjson");
    path.with_file_name(format!("{stem}.{scenario}.rep{rep}.{ext}"))
}

fn map_sim_error(e: sim::SimError) -> anyhow::Error {
    anyhow!("{e}")
}

/// Run the whole request and emit the report. Returns the process exit code.
pub fn run_and_report(cli: &Cli) -> anyhow::Result<i32> {
    let (config, scenarios) = match parse_config(cli) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e:#}");
            return Ok(exit_code::CONFIG);
        }
    };
    let session = match execute(&config, &scenarios, cli.replications, cli.trace.as_deref()) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e:#}");
            let text = format!("{e:#}");
            return Ok(if text.contains("route") || text.contains("graph") {
                exit_code::ROUTING
            } else {
                exit_code::CONFIG
            });
        }
    };

    let rendered = match cli.format.as_str() {
        "csv" => report::to_csv(&session),
        "json" => report::to_json(&session),
        _ => report::to_table(&session, cli.compare),
    };
    match &cli.out {
        Some(path) => fs::write(path, rendered)
            .with_context(|| format!("writing report `{}`", path.display()))?,
        None => print!("{rendered}"),
    }

    let faulted = session.records.iter().any(|r| r.metrics.faults > 0);
    let incomplete = session.records.iter().any(|r| !r.metrics.complete);
    Ok(if faulted || incomplete {
        exit_code::FAULTED
    } else {
        exit_code::OK
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::parse_from(std::iter::once("aivsim").chain(args.iter().copied()))
    }

    #[test]
    fn flags_override_defaults() {
        let c = cli(&["--scenario", "sc1", "--bags", "100", "--seed", "42"]);
        let (config, scenarios) = parse_config(&c).unwrap();
        assert_eq!(scenarios, vec![Scenario::Sc1]);
        assert_eq!(config.n_bags, 100);
        assert_eq!(config.seed, 42);
    }

    #[test]
    fn unknown_scenario_is_named_in_the_error() {
        let c = cli(&["--scenario", "sc9"]);
        let err = parse_config(&c).unwrap_err().to_string();
        assert!(err.contains("unknown scenario"), "{err}");
        assert!(err.contains("sc9"), "{err}");
    }

    #[test]
    fn set_overrides_reach_nested_fields() {
        let c = cli(&["--set", "battery.discharge_per_m=0.0", "--set", "dt_s=0.05"]);
        let (config, _) = parse_config(&c).unwrap();
        assert_eq!(config.battery.discharge_per_m, 0.0);
        assert_eq!(config.dt_s, 0.05);
    }

    #[test]
    fn unknown_config_key_is_rejected_by_name() {
        let c = cli(&["--set", "bogus_key=3"]);
        let err = parse_config(&c).unwrap_err().to_string();
        assert!(err.contains("bogus_key"), "{err}");
    }

    #[test]
    fn config_file_can_switch_the_arrival_variant() {
        let dir = std::env::temp_dir().join("aivsim_cli_variant_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("burst.json");
        std::fs::write(
            &path,
            r#"{"arrivals": {"kind": "piecewise_poisson",
                "segments": [{"start_s": 0.0, "rate_per_s": 0.1}]}}"#,
        )
        .unwrap();
        let mut c = cli(&["--scenario", "sc7"]);
        c.config = Some(path);
        let (config, _) = parse_config(&c).unwrap();
        assert!(matches!(
            config.arrivals,
            aivsim_core::sim::ArrivalSpec::PiecewisePoisson { .. }
        ));
    }

    #[test]
    fn scenario_list_parses_comma_separated() {
        let c = cli(&["--scenario", "sc1,sc2,sc3"]);
        let (_, scenarios) = parse_config(&c).unwrap();
        assert_eq!(scenarios.len(), 3);
    }
}
