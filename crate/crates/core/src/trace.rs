//! Trace persistence: CSV or JSON-lines, both carrying a header that echoes
//! the full scenario so any trace can be re-run bit-identically.
//!
//! Numbers are serialized with the shortest decimal form that round-trips
//! exactly, so write-then-read equality is bitwise.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::scenario::{parse_scenario_str, scenario_to_toml, ScenarioError};
use crate::sim::{SimConfig, SimTrace, TraceRow};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceFormat {
    Csv,
    JsonLines,
}

impl TraceFormat {
    pub fn extension(self) -> &'static str {
        match self {
            TraceFormat::Csv => "csv",
            TraceFormat::JsonLines => "jsonl",
        }
    }

    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "csv" => Some(TraceFormat::Csv),
            "jsonl" => Some(TraceFormat::JsonLines),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed trace {path}: {message} (line {line})")]
    Malformed {
        path: String,
        message: String,
        line: usize,
    },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

const COLUMNS: [&str; 18] = [
    "t", "x_A", "y_A", "psi_A", "x_o", "y_o", "a", "b", "theta_E", "gamma", "psi_T", "psi_O",
    "psi_D", "omega_raw", "omega", "V", "V_tilde", "Gamma",
];

fn header_line(target_count: usize) -> String {
    let mut h = COLUMNS.join(",");
    for i in 1..=target_count {
        let _ = write!(h, ",gamma_T{i}");
    }
    h
}

fn row_values(row: &TraceRow) -> Vec<f64> {
    let mut v = vec![
        row.t,
        row.x_a,
        row.y_a,
        row.psi_a,
        row.x_o,
        row.y_o,
        row.a,
        row.b,
        row.theta_e,
        row.gamma,
        row.psi_t,
        row.psi_o,
        row.psi_d,
        row.omega_raw,
        row.omega,
        row.v_lyap,
        row.v_tilde,
        row.big_gamma,
    ];
    v.extend_from_slice(&row.gamma_targets);
    v
}

fn row_from_values(values: &[f64], target_count: usize) -> TraceRow {
    TraceRow {
        t: values[0],
        x_a: values[1],
        y_a: values[2],
        psi_a: values[3],
        x_o: values[4],
        y_o: values[5],
        a: values[6],
        b: values[7],
        theta_e: values[8],
        gamma: values[9],
        psi_t: values[10],
        psi_o: values[11],
        psi_d: values[12],
        omega_raw: values[13],
        omega: values[14],
        v_lyap: values[15],
        v_tilde: values[16],
        big_gamma: values[17],
        gamma_targets: values[18..18 + target_count].to_vec(),
    }
}

/// Render a trace to one of the supported formats.
pub fn trace_to_string(trace: &SimTrace, format: TraceFormat) -> String {
    let scenario = scenario_to_toml(&trace.config);
    match format {
        TraceFormat::Csv => {
            let mut out = String::new();
            let _ = writeln!(out, "# convoy-sim trace v{TOOL_VERSION}");
            let _ = writeln!(out, "# units: meters, radians, seconds");
            let _ = writeln!(out, "# n_targets = {}", trace.target_count);
            let _ = writeln!(out, "# scenario:");
            for line in scenario.lines() {
                let _ = writeln!(out, "#   {line}");
            }
            let _ = writeln!(out, "{}", header_line(trace.target_count));
            for row in &trace.rows {
                let vals = row_values(row);
                let mut first = true;
                for v in vals {
                    if !first {
                        out.push(',');
                    }
                    let _ = write!(out, "{v}");
                    first = false;
                }
                out.push('\n');
            }
            out
        }
        TraceFormat::JsonLines => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "{{\"trace\":\"convoy-sim\",\"version\":{},\"units\":\"meters, radians, seconds\",\"n_targets\":{},\"scenario\":{}}}",
                serde_json::to_string(TOOL_VERSION).unwrap(),
                trace.target_count,
                serde_json::to_string(&scenario).unwrap(),
            );
            let names: Vec<String> = header_line(trace.target_count)
                .split(',')
                .map(str::to_string)
                .collect();
            for row in &trace.rows {
                out.push('{');
                let mut first = true;
                for (name, v) in names.iter().zip(row_values(row)) {
                    if !first {
                        out.push(',');
                    }
                    let _ = write!(out, "\"{name}\":{v}");
                    first = false;
                }
                out.push_str("}\n");
            }
            out
        }
    }
}

/// Write a trace file.
pub fn write_trace(trace: &SimTrace, path: &Path, format: TraceFormat) -> Result<(), TraceError> {
    std::fs::write(path, trace_to_string(trace, format)).map_err(|source| TraceError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn malformed(path: &Path, message: impl Into<String>, line: usize) -> TraceError {
    TraceError::Malformed {
        path: path.display().to_string(),
        message: message.into(),
        line,
    }
}

/// Read a trace back, recovering both the rows and the embedded scenario.
pub fn read_trace(path: &Path) -> Result<SimTrace, TraceError> {
    let text = std::fs::read_to_string(path).map_err(|source| TraceError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let format = TraceFormat::from_path(path)
        .ok_or_else(|| malformed(path, "unknown extension (expected .csv or .jsonl)", 0))?;
    match format {
        TraceFormat::Csv => read_csv(&text, path),
        TraceFormat::JsonLines => read_jsonl(&text, path),
    }
}

fn parse_values(path: &Path, line: &str, lineno: usize) -> Result<Vec<f64>, TraceError> {
    line.split(',')
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| malformed(path, format!("bad number {s:?}"), lineno))
        })
        .collect()
}

fn read_csv(text: &str, path: &Path) -> Result<SimTrace, TraceError> {
    let mut scenario_lines = Vec::new();
    let mut in_scenario = false;
    let mut target_count = None;
    let mut rows = Vec::new();
    let mut saw_header = false;
    for (i, line) in text.lines().enumerate() {
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim_start();
            if in_scenario {
                scenario_lines.push(line.strip_prefix("#   ").unwrap_or(rest).to_string());
            } else if rest == "scenario:" {
                in_scenario = true;
            } else if let Some(n) = rest.strip_prefix("n_targets = ") {
                target_count =
                    Some(n.trim().parse::<usize>().map_err(|_| {
                        malformed(path, "bad n_targets", i + 1)
                    })?);
            }
            continue;
        }
        in_scenario = false;
        if !saw_header {
            let n = target_count
                .ok_or_else(|| malformed(path, "missing n_targets header", i + 1))?;
            if line != header_line(n) {
                return Err(malformed(path, "unexpected column header", i + 1));
            }
            saw_header = true;
            continue;
        }
        let n = target_count.unwrap();
        let values = parse_values(path, line, i + 1)?;
        if values.len() != 18 + n {
            return Err(malformed(path, "wrong column count", i + 1));
        }
        rows.push(row_from_values(&values, n));
    }
    if !saw_header {
        return Err(malformed(path, "missing column header", 0));
    }
    let config = config_from_echo(&scenario_lines.join("\n"), path)?;
    Ok(SimTrace {
        config,
        target_count: target_count.unwrap(),
        rows,
    })
}

fn read_jsonl(text: &str, path: &Path) -> Result<SimTrace, TraceError> {
    let mut lines = text.lines().enumerate();
    let (_, first) = lines
        .next()
        .ok_or_else(|| malformed(path, "empty file", 0))?;
    let header: serde_json::Value = serde_json::from_str(first)
        .map_err(|e| malformed(path, format!("bad header: {e}"), 1))?;
    let target_count = header["n_targets"]
        .as_u64()
        .ok_or_else(|| malformed(path, "missing n_targets", 1))? as usize;
    let scenario = header["scenario"]
        .as_str()
        .ok_or_else(|| malformed(path, "missing scenario echo", 1))?
        .to_string();
    let names: Vec<String> = header_line(target_count)
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let obj: serde_json::Value = serde_json::from_str(line)
            .map_err(|e| malformed(path, format!("bad row: {e}"), i + 1))?;
        let values: Vec<f64> = names
            .iter()
            .map(|name| {
                obj[name]
                    .as_f64()
                    .ok_or_else(|| malformed(path, format!("missing field {name}"), i + 1))
            })
            .collect::<Result<_, _>>()?;
        rows.push(row_from_values(&values, target_count));
    }
    let config = config_from_echo(&scenario, path)?;
    Ok(SimTrace {
        config,
        target_count,
        rows,
    })
}

fn config_from_echo(scenario: &str, path: &Path) -> Result<SimConfig, TraceError> {
    Ok(parse_scenario_str(
        scenario,
        &format!("{} (embedded scenario)", path.display()),
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::run_simulation;

    fn sample_trace(duration: f64) -> SimTrace {
        let text = r#"
name = "trace_test"
direction = "ccw"
duration = 1.0

[limits]
v_a_min = 10.0
v_a_max = 20.0
v_t_max = 3.0
omega_max = 0.3
standoff = 0.0

[gains]
k_gamma = 0.5
k_psi = 1.0

[agent]
x = 600.0
y = -200.0
psi = 0.7853981633974483
speed = 15.0

[ellipse]
x = 300.0
y = 200.0
a = 250.0
b = 150.0
theta = 0.7853981633974483
"#;
        let mut cfg = parse_scenario_str(text, "inline").unwrap();
        cfg.duration = duration;
        run_simulation(&cfg).unwrap()
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let trace = sample_trace(50.0); // 1001 ticks
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_trace(&trace, &path, TraceFormat::Csv).unwrap();
        let back = read_trace(&path).unwrap();
        assert_eq!(trace, back);
    }

    #[test]
    fn jsonl_round_trip_is_exact() {
        let trace = sample_trace(50.0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.jsonl");
        write_trace(&trace, &path, TraceFormat::JsonLines).unwrap();
        let back = read_trace(&path).unwrap();
        assert_eq!(trace, back);
    }

    #[test]
    fn formats_encode_identical_values() {
        let trace = sample_trace(5.0);
        let dir = tempfile::tempdir().unwrap();
        let c = dir.path().join("t.csv");
        let j = dir.path().join("t.jsonl");
        write_trace(&trace, &c, TraceFormat::Csv).unwrap();
        write_trace(&trace, &j, TraceFormat::JsonLines).unwrap();
        assert_eq!(read_trace(&c).unwrap(), read_trace(&j).unwrap());
    }

    #[test]
    fn header_only_file_for_empty_trace() {
        let mut trace = sample_trace(1.0);
        trace.rows.clear();
        let text = trace_to_string(&trace, TraceFormat::Csv);
        let data_lines: Vec<&str> = text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .collect();
        assert_eq!(data_lines.len(), 1); // just the column header
        assert!(data_lines[0].starts_with("t,x_A,y_A"));
    }

    #[test]
    fn csv_columns_match_spec_order() {
        let trace = sample_trace(1.0);
        let text = trace_to_string(&trace, TraceFormat::Csv);
        let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
        assert_eq!(
            header,
            "t,x_A,y_A,psi_A,x_o,y_o,a,b,theta_E,gamma,psi_T,psi_O,psi_D,omega_raw,omega,V,V_tilde,Gamma"
        );
    }
}
