//! JSON and CSV formats emitted by the command-line tool.

use serde::{Deserialize, Serialize};

use crate::weights::AnalyticalSolution;

/// 17 significant digits, enough to recover every `f64`.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

fn parse_float(field: &str) -> Result<Option<f64>, String> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse::<f64>()
        .map(Some)
        .map_err(|_| format!("`{field}` is not a number"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightsReport {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub theta: f64,
    pub slem: f64,
    pub weights: Vec<f64>,
    pub residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_slem: Option<f64>,
}

impl WeightsReport {
    pub fn from_solution(sol: &AnalyticalSolution) -> Self {
        let p = sol.params;
        Self {
            n: p.n(),
            k: p.k(),
            m: p.m(),
            l: p.l(),
            theta: sol.theta,
            slem: sol.slem,
            weights: sol.weights.as_slice().to_vec(),
            residual: sol.residual,
            oracle_slem: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serialises")
    }
}

/// One row of a parameter sweep. Failed cells keep `slem`/`theta` empty.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub l: usize,
    pub slem: Option<f64>,
    pub theta: Option<f64>,
}

pub const SWEEP_HEADER: &str = "n,k,m,L,slem,theta";

pub fn render_sweep_csv(meta: &[String], rows: &[SweepRecord]) -> String {
    let mut out = String::new();
    for line in meta {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n,
            r.k,
            r.m,
            r.l,
            opt(r.slem),
            opt(r.theta)
        ));
    }
    out
}

/// Returns the metadata lines (without `# `) and the rows.
pub fn parse_sweep_csv(text: &str) -> Result<(Vec<String>, Vec<SweepRecord>), String> {
    let mut meta = Vec::new();
    let mut rows = Vec::new();
    let mut header_seen = false;
    for line in text.lines() {
        if let Some(comment) = line.strip_prefix("# ") {
            meta.push(comment.to_string());
            continue;
        }
        if !header_seen {
            if line != SWEEP_HEADER {
                return Err(format!("unexpected header `{line}`"));
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(format!("expected 6 fields in `{line}`"));
        }
        let int = |s: &str| s.parse::<usize>().map_err(|e| format!("`{s}`: {e}"));
        rows.push(SweepRecord {
            n: int(fields[0])?,
            k: int(fields[1])?,
            m: int(fields[2])?,
            l: int(fields[3])?,
            slem: parse_float(fields[4])?,
            theta: parse_float(fields[5])?,
        });
    }
    Ok((meta, rows))
}

pub const SIM_HEADER: &str = "t,geo_mean_distance,log10_geo_mean";

pub fn render_sim_csv(meta: &[String], geo_mean: &[f64]) -> String {
    let mut out = String::new();
    for line in meta {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(SIM_HEADER);
    out.push('\n');
    for (t, e) in geo_mean.iter().enumerate() {
        out.push_str(&format!("{t},{},{}\n", fmt_float(*e), fmt_float(e.log10())));
    }
    out
}

pub fn parse_sim_csv(text: &str) -> Result<(Vec<String>, Vec<f64>), String> {
    let mut meta = Vec::new();
    let mut values = Vec::new();
    let mut header_seen = false;
    for line in text.lines() {
        if let Some(comment) = line.strip_prefix("# ") {
            meta.push(comment.to_string());
            continue;
        }
        if !header_seen {
            if line != SIM_HEADER {
                return Err(format!("unexpected header `{line}`"));
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 || fields[0].parse::<usize>().ok() != Some(values.len()) {
            return Err(format!("malformed row `{line}`"));
        }
        values.push(parse_float(fields[1])?.unwrap_or(f64::NAN));
    }
    Ok((meta, values))
}
