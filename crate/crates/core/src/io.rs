//! File formats.
//!
//! Structured inputs are TOML with a `schema = "dhn-…/1"` key; tables are CSV
//! whose first line is `# dhn-…/1`. Floats are written in Rust's shortest
//! round-trip form so re-imported files reproduce the exact values.

use crate::design::{DesignLayout, DesignVector, VarClass};
use crate::error::{Error, Result};
use crate::network::{build_graph, NetworkDescription, NetworkGraph};
use crate::periods::{PeriodEnvironment, PeriodSet};
use crate::scenario::{Scenario, SCENARIO_SCHEMA};
use crate::timeagg::TimeSeries;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const PERIODS_SCHEMA: &str = "dhn-periods/1";
pub const TIMESERIES_SCHEMA: &str = "dhn-timeseries/1";
pub const DESIGN_SCHEMA: &str = "dhn-design/1";

fn display(path: &Path) -> String {
    path.display().to_string()
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", display(path))))
}

/// Writes a file, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", display(path))))
}

/// Parses TOML text, reporting the 1-based line of a syntax or type error.
pub fn parse_toml<T: DeserializeOwned>(text: &str, file: &str) -> Result<T> {
    toml::from_str(text).map_err(|e: toml::de::Error| {
        let line = e.span().map_or(0, |s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        Error::Parse { file: file.to_string(), line, msg: e.message().to_string() }
    })
}

fn read_toml<T: DeserializeOwned>(path: &Path) -> Result<T> {
    parse_toml(&read_text(path)?, &display(path))
}

fn check_schema(found: &str, expected: &str, file: &str) -> Result<()> {
    if found != expected {
        return Err(Error::Parse { file: file.into(), line: 1, msg: format!("schema `{found}`, expected `{expected}`") });
    }
    Ok(())
}

pub fn read_network(path: &Path) -> Result<NetworkGraph> {
    let desc: NetworkDescription = read_toml(path)?;
    build_graph(&desc)
}

pub fn read_scenario(path: &Path) -> Result<Scenario> {
    let s: Scenario = read_toml(path)?;
    check_schema(&s.schema, SCENARIO_SCHEMA, &display(path))?;
    s.validate()?;
    Ok(s)
}

/// One period as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct PeriodRecord {
    t_inf_c: f64,
    g_irr_w_m2: f64,
    weight: f64,
    demand_w: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct PeriodFile {
    schema: String,
    active_hours: f64,
    #[serde(default)]
    excluded_fraction: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    peak: Option<usize>,
    #[serde(rename = "period")]
    periods: Vec<PeriodRecord>,
}

pub fn periods_to_string(set: &PeriodSet) -> Result<String> {
    let file = PeriodFile {
        schema: PERIODS_SCHEMA.into(),
        active_hours: set.active_hours,
        excluded_fraction: set.excluded_fraction,
        peak: set.peak,
        periods: set
            .periods
            .iter()
            .map(|p| PeriodRecord { t_inf_c: p.t_inf, g_irr_w_m2: p.g_irr, weight: p.weight, demand_w: p.demand.clone() })
            .collect(),
    };
    toml::to_string(&file).map_err(|e| Error::Io(e.to_string()))
}

pub fn parse_periods(text: &str, file: &str) -> Result<PeriodSet> {
    let f: PeriodFile = parse_toml(text, file)?;
    check_schema(&f.schema, PERIODS_SCHEMA, file)?;
    Ok(PeriodSet {
        periods: f
            .periods
            .into_iter()
            .map(|r| PeriodEnvironment { t_inf: r.t_inf_c, g_irr: r.g_irr_w_m2, demand: r.demand_w, weight: r.weight })
            .collect(),
        peak: f.peak,
        active_hours: f.active_hours,
        excluded_fraction: f.excluded_fraction,
    })
}

pub fn read_periods(path: &Path) -> Result<PeriodSet> {
    parse_periods(&read_text(path)?, &display(path))
}

pub fn write_periods(path: &Path, set: &PeriodSet) -> Result<()> {
    write_text(path, &periods_to_string(set)?)
}

/// Splits off the schema comment line of a CSV table.
fn csv_body<'a>(text: &'a str, schema: &str, file: &str) -> Result<&'a str> {
    let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
    let found = first.trim().trim_start_matches('#').trim();
    check_schema(found, schema, file)?;
    Ok(rest)
}

fn csv_error(e: csv::Error, file: &str) -> Error {
    // Data lines start after the schema line.
    let line = e.position().map_or(0, |p| p.line() as usize + 1);
    Error::Parse { file: file.into(), line, msg: e.to_string() }
}

fn parse_f64(s: &str, file: &str, line: usize) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Parse { file: file.into(), line, msg: format!("`{s}` is not a number") })
}

/// Hourly series: columns `t_inf_c`, `g_irr_w_m2`, then one demand column
/// (W) per consumer, headed by the consumer id.
pub fn parse_timeseries(text: &str, file: &str) -> Result<TimeSeries> {
    let body = csv_body(text, TIMESERIES_SCHEMA, file)?;
    let mut rdr = csv::ReaderBuilder::new().from_reader(body.as_bytes());
    let header = rdr.headers().map_err(|e| csv_error(e, file))?.clone();
    if header.len() < 3 || &header[0] != "t_inf_c" || &header[1] != "g_irr_w_m2" {
        return Err(Error::Parse { file: file.into(), line: 2, msg: "header must start with t_inf_c,g_irr_w_m2".into() });
    }
    let mut s = TimeSeries {
        consumer_ids: header.iter().skip(2).map(str::to_string).collect(),
        t_inf: vec![],
        g_irr: vec![],
        demand: vec![],
    };
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(e, file))?;
        let line = rec.position().map_or(0, |p| p.line() as usize + 1);
        s.t_inf.push(parse_f64(&rec[0], file, line)?);
        s.g_irr.push(parse_f64(&rec[1], file, line)?);
        s.demand.push(rec.iter().skip(2).map(|v| parse_f64(v, file, line)).collect::<Result<_>>()?);
    }
    Ok(s)
}

pub fn read_timeseries(path: &Path) -> Result<TimeSeries> {
    parse_timeseries(&read_text(path)?, &display(path))
}

pub fn timeseries_to_string(s: &TimeSeries) -> String {
    let mut out = format!("# {TIMESERIES_SCHEMA}\nt_inf_c,g_irr_w_m2");
    for id in &s.consumer_ids {
        out.push(',');
        out.push_str(id);
    }
    out.push('\n');
    for h in 0..s.len() {
        out.push_str(&format!("{},{}", s.t_inf[h], s.g_irr[h]));
        for v in &s.demand[h] {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

/// Design table: one row per design variable with its class, period and the
/// id of the producer or consumer it belongs to.
pub fn design_to_string(graph: &NetworkGraph, design: &DesignVector) -> String {
    let l = design.layout;
    let mut out = format!("# {DESIGN_SCHEMA}\nindex,class,period,entity,value\n");
    for (i, v) in design.values.iter().enumerate() {
        let (period, local) = match l.period_of(i) {
            None => (String::new(), i),
            Some(t) => (t.to_string(), i - l.global_index(t, l.n_producers) + l.n_producers),
        };
        let class = l.class_of(i);
        let entity = match class {
            VarClass::Phi => &graph.edges[graph.producers[local]].id,
            VarClass::Alpha => &graph.edges[graph.consumers[local - l.n_producers]].id,
            VarClass::Gamma => &graph.edges[graph.producers[local - l.n_producers - l.n_consumers]].id,
            VarClass::Tau => {
                let j = local - 2 * l.n_producers - l.n_consumers;
                &graph.edges[graph.producers[graph.temp_controlled[j]]].id
            }
        };
        out.push_str(&format!("{i},{},{period},{entity},{v}\n", class.name()));
    }
    out
}

pub fn parse_design(text: &str, file: &str, layout: DesignLayout) -> Result<DesignVector> {
    let body = csv_body(text, DESIGN_SCHEMA, file)?;
    let mut rdr = csv::ReaderBuilder::new().from_reader(body.as_bytes());
    let mut values = vec![f64::NAN; layout.len()];
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(e, file))?;
        let line = rec.position().map_or(0, |p| p.line() as usize + 1);
        let i: usize = rec[0].trim().parse().map_err(|_| Error::Parse { file: file.into(), line, msg: "bad index".into() })?;
        if i >= values.len() {
            return Err(Error::Parse { file: file.into(), line, msg: format!("index {i} outside the design") });
        }
        values[i] = parse_f64(&rec[4], file, line)?;
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::ShapeMismatch(format!("{file}: design table does not cover every variable")));
    }
    DesignVector::from_values(layout, values)
}

pub fn read_design(path: &Path, layout: DesignLayout) -> Result<DesignVector> {
    parse_design(&read_text(path)?, &display(path), layout)
}

/// Reads a TOML file into any serde type, with file/line error context.
pub fn read_structured<T: DeserializeOwned>(path: &Path) -> Result<T> {
    read_toml(path)
}
