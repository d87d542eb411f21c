//! Report rendering: scenario comparison tables, CSV rows and JSON
//! documents. Every artifact embeds the resolved config so a report is
//! reproducible from its own header.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use aivsim_core::{Metrics, Scenario};

use crate::{RunRecord, Session};

fn median_of(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values[values.len() / 2]
}

fn min_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Median/min/max across replications; vector metrics aggregate element-wise
/// medians.
pub struct Aggregate {
    pub scenario: Scenario,
    pub median: Metrics,
    pub min_sim_time_s: f64,
    pub max_sim_time_s: f64,
}

pub fn aggregate(records: &[&RunRecord]) -> Aggregate {
    let scenario = records[0].scenario;
    let n_aivs = records[0].metrics.missions_per_aiv.len();
    let scalar = |f: &dyn Fn(&Metrics) -> f64| -> f64 {
        median_of(records.iter().map(|r| f(&r.metrics)).collect())
    };
    let vector = |f: &dyn Fn(&Metrics, usize) -> f64| -> Vec<f64> {
        (0..n_aivs)
            .map(|i| median_of(records.iter().map(|r| f(&r.metrics, i)).collect()))
            .collect()
    };
    let sims: Vec<f64> = records.iter().map(|r| r.metrics.sim_time_s).collect();
    let median = Metrics {
        max_pending: scalar(&|m| m.max_pending as f64).round() as u32,
        sim_time_s: scalar(&|m| m.sim_time_s),
        avg_mission_time_per_aiv: vector(&|m, i| m.avg_mission_time_per_aiv[i]),
        missions_per_aiv: vector(&|m, i| m.missions_per_aiv[i] as f64)
            .into_iter()
            .map(|x| x.round() as u32)
            .collect(),
        work_rate_per_aiv: vector(&|m, i| m.work_rate_per_aiv[i]),
        recharge_time_s: scalar(&|m| m.recharge_time_s),
        recharge_wait_s: scalar(&|m| m.recharge_wait_s),
        n_recharges: scalar(&|m| m.n_recharges as f64).round() as u32,
        recharges_per_aiv: vector(&|m, i| m.recharges_per_aiv[i] as f64)
            .into_iter()
            .map(|x| x.round() as u32)
            .collect(),
        faults: records.iter().map(|r| r.metrics.faults).sum(),
        complete: records.iter().all(|r| r.metrics.complete),
    };
    Aggregate {
        scenario,
        median,
        min_sim_time_s: min_of(&sims),
        max_sim_time_s: max_of(&sims),
    }
}

pub fn aggregates_by_scenario(session: &Session) -> Vec<Aggregate> {
    let mut groups: BTreeMap<Scenario, Vec<&RunRecord>> = BTreeMap::new();
    for r in &session.records {
        groups.entry(r.scenario).or_default().push(r);
    }
    session
        .scenarios
        .iter()
        .filter_map(|sc| groups.get(sc).map(|g| aggregate(g)))
        .collect()
}

fn config_header(session: &Session) -> String {
    let config = serde_json::to_string(&session.resolved_base).expect("config serializes");
    format!("# config {config}\n")
}

fn fmt_vec_f64(v: &[f64], round: bool) -> String {
    let items: Vec<String> = v
        .iter()
        .map(|x| {
            if round {
                format!("{}", x.round() as i64)
            } else {
                format!("{x:.2}")
            }
        })
        .collect();
    format!("[{}]", items.join(", "))
}

fn fmt_vec_u32(v: &[u32]) -> String {
    let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(", "))
}

/// Comparison orientation: scenarios as columns, metrics as rows, so runs
/// read side by side. Reported times are rounded to whole seconds.
pub fn to_table(session: &Session, compare_only: bool) -> String {
    let mut out = config_header(session);
    let aggregates = aggregates_by_scenario(session);

    if !compare_only {
        for r in &session.records {
            let m = &r.metrics;
            let _ = writeln!(
                out,
                "run {} rep {} seed {}: pending {} sim {} s missions {} mission_times {} \
                 work {} recharges {} ({} s, wait {} s) faults {}{}",
                r.scenario,
                r.replication,
                r.seed,
                m.max_pending,
                m.sim_time_s.round() as i64,
                fmt_vec_u32(&m.missions_per_aiv),
                fmt_vec_f64(&m.avg_mission_time_per_aiv, true),
                fmt_vec_f64(&m.work_rate_per_aiv, false),
                m.n_recharges,
                m.recharge_time_s.round() as i64,
                m.recharge_wait_s.round() as i64,
                m.faults,
                if m.complete { "" } else { " [INCOMPLETE]" },
            );
        }
        out.push('\n');
    }

    let label_width = 28;
    let col_width = aggregates
        .iter()
        .map(|a| {
            fmt_vec_f64(&a.median.work_rate_per_aiv, false)
                .len()
                .max(a.scenario.name().len())
        })
        .max()
        .unwrap_or(8)
        .max(10);

    let mut header = format!("{:<label_width$}", "metric (median)");
    for a in &aggregates {
        let _ = write!(header, " | {:>col_width$}", a.scenario.name());
    }
    let _ = writeln!(out, "{header}");
    let _ = writeln!(out, "{}", "-".repeat(header.len()));

    type Render = Box<dyn Fn(&Aggregate) -> String>;
    let rows: Vec<(&str, Render)> = vec![
        ("max_pending", Box::new(|a: &Aggregate| a.median.max_pending.to_string())),
        (
            "sim_time_s",
            Box::new(|a: &Aggregate| (a.median.sim_time_s.round() as i64).to_string()),
        ),
        (
            "avg_mission_time_per_aiv_s",
            Box::new(|a: &Aggregate| fmt_vec_f64(&a.median.avg_mission_time_per_aiv, true)),
        ),
        (
            "missions_per_aiv",
            Box::new(|a: &Aggregate| fmt_vec_u32(&a.median.missions_per_aiv)),
        ),
        (
            "work_rate_per_aiv",
            Box::new(|a: &Aggregate| fmt_vec_f64(&a.median.work_rate_per_aiv, false)),
        ),
        (
            "recharge_time_s",
            Box::new(|a: &Aggregate| (a.median.recharge_time_s.round() as i64).to_string()),
        ),
        (
            "recharge_wait_s",
            Box::new(|a: &Aggregate| (a.median.recharge_wait_s.round() as i64).to_string()),
        ),
        ("n_recharges", Box::new(|a: &Aggregate| a.median.n_recharges.to_string())),
        (
            "recharges_per_aiv",
            Box::new(|a: &Aggregate| fmt_vec_u32(&a.median.recharges_per_aiv)),
        ),
        ("faults", Box::new(|a: &Aggregate| a.median.faults.to_string())),
        (
            "sim_time_min_max_s",
            Box::new(|a: &Aggregate| {
                format!(
                    "{}..{}",
                    a.min_sim_time_s.round() as i64,
                    a.max_sim_time_s.round() as i64
                )
            }),
        ),
    ];
    for (label, render) in rows {
        let mut line = format!("{label:<label_width$}");
        for a in &aggregates {
            let _ = write!(line, " | {:>col_width$}", render(a));
        }
        let _ = writeln!(out, "{line}");
    }
    out
}

/// One data row per run, then one `median` row per scenario. Full float
/// precision; the resolved config rides in a leading comment line.
pub fn to_csv(session: &Session) -> String {
    let n_aivs = session.resolved_base.n_aivs as usize;
    let mut out = config_header(session);
    let mut header = String::from("scenario,replication,seed,max_pending,sim_time_s");
    for prefix in ["avg_mission_time_s", "missions", "work_rate", "recharges"] {
        for i in 0..n_aivs {
            let _ = write!(header, ",{prefix}_{i}");
        }
    }
    header.push_str(",recharge_time_s,recharge_wait_s,n_recharges,faults");
    let _ = writeln!(out, "{header}");

    let mut write_row = |scenario: Scenario, replication: &str, seed: &str, m: &Metrics| {
        let mut row = format!(
            "{scenario},{replication},{seed},{},{}",
            m.max_pending, m.sim_time_s
        );
        for v in &m.avg_mission_time_per_aiv {
            let _ = write!(row, ",{v}");
        }
        for v in &m.missions_per_aiv {
            let _ = write!(row, ",{v}");
        }
        for v in &m.work_rate_per_aiv {
            let _ = write!(row, ",{v}");
        }
        for v in &m.recharges_per_aiv {
            let _ = write!(row, ",{v}");
        }
        let _ = write!(
            row,
            ",{},{},{},{}",
            m.recharge_time_s, m.recharge_wait_s, m.n_recharges, m.faults
        );
        out.push_str(&row);
        out.push('\n');
    };

    for r in &session.records {
        write_row(
            r.scenario,
            &r.replication.to_string(),
            &r.seed.to_string(),
            &r.metrics,
        );
    }
    for a in aggregates_by_scenario(session) {
        write_row(a.scenario, "median", "", &a.median);
    }
    out
}

pub fn to_json(session: &Session) -> String {
    let runs: Vec<Value> = session
        .records
        .iter()
        .map(|r| {
            json!({
                "scenario": r.scenario,
                "replication": r.replication,
                "seed": r.seed,
                "metrics": r.metrics,
            })
        })
        .collect();
    let aggregates: Vec<Value> = aggregates_by_scenario(session)
        .into_iter()
        .map(|a| {
            json!({
                "scenario": a.scenario,
                "median": a.median,
                "sim_time_min_s": a.min_sim_time_s,
                "sim_time_max_s": a.max_sim_time_s,
            })
        })
        .collect();
    let doc = json!({
        "config": session.resolved_base,
        "replications": session.replications,
        "runs": runs,
        "aggregates": aggregates,
        "speed_cap_violations": session.speed_cap_violations,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    text
}
