use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Where an optimum or bound came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    /// Exhaustive enumeration; the optimum is its own upper bound.
    Exact,
    /// An external MILP solver's incumbent and reported bound.
    Solver,
}

/// Quality figures of the heuristic against reference values.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    pub gap_full: Option<f64>,
    pub gap_fixed: Option<f64>,
    /// Percent of the full optimum lost by fixing the stage-one projects.
    pub decline: Option<f64>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
}

/// `num / den`, or `None` when the quotient is undefined.
pub fn ratio(num: f64, den: f64) -> Option<f64> {
    let q = num / den;
    (den != 0.0 && q.is_finite()).then_some(q)
}

fn gap(obj: Option<f64>, ub: Option<f64>) -> Option<f64> {
    let (obj, ub) = (obj?, ub?);
    ratio(ub - obj, ub)
}

pub fn compute_metrics(
    obj_a: f64,
    ub_full: Option<f64>,
    ub_fixed: Option<f64>,
    obj_full: Option<f64>,
    obj_fixed: Option<f64>,
) -> Metrics {
    Metrics {
        gap_full: gap(obj_full, ub_full),
        gap_fixed: gap(obj_fixed, ub_fixed),
        decline: match (obj_full, obj_fixed) {
            (Some(full), Some(fixed)) => ratio(100.0 * (full - fixed), full),
            _ => None,
        },
        r1: ub_full.and_then(|ub| ratio(obj_a, ub)),
        r2: ub_fixed.and_then(|ub| ratio(obj_a, ub)),
    }
}

/// One benchmark row. Empty optional cells mean "not computed" or "undefined".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub instance: String,
    pub clusters: usize,
    pub projects: usize,
    pub obj_a: f64,
    pub obj_stage_one: f64,
    pub obj_full: Option<f64>,
    pub ub_full: Option<f64>,
    pub gap_full: Option<f64>,
    pub full_source: Option<Source>,
    pub obj_fixed: Option<f64>,
    pub ub_fixed: Option<f64>,
    pub gap_fixed: Option<f64>,
    pub fixed_source: Option<Source>,
    pub decline: Option<f64>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub time_stage_one: f64,
    pub time_stage_two: f64,
    pub time_total: f64,
}

pub const CSV_HEADER: &str = "instance,clusters,projects,obj_a,obj_stage_one,obj_full,ub_full,gap_full,full_source,\
obj_fixed,ub_fixed,gap_fixed,fixed_source,decline,r1,r2,iterations,converged,time_stage_one,time_stage_two,time_total";

impl MetricsRecord {
    pub fn apply(&mut self, metrics: Metrics) {
        self.gap_full = metrics.gap_full;
        self.gap_fixed = metrics.gap_fixed;
        self.decline = metrics.decline;
        self.r1 = metrics.r1;
        self.r2 = metrics.r2;
    }
}

pub fn write_csv<W: Write>(records: &[MetricsRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<MetricsRecord>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| Ok(row?)).collect()
}

pub fn to_csv_string(records: &[MetricsRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(records, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

fn cell(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "-".to_owned(), |x| format!("{x:.digits$}"))
}

/// Fixed-width text table, one line per record.
pub fn render_table(records: &[MetricsRecord]) -> String {
    let mut out = format!(
        "{:<16} {:>4} {:>6} {:>12} {:>12} {:>7} {:>12} {:>12} {:>7} {:>7} {:>12} {:>6} {:>6} {:>9}\n",
        "instance", "n", "proj", "obj", "ub", "gap", "obj_fp", "ub_fp", "gap_fp", "decl%", "obj_A", "r1", "r2", "time_s"
    );
    for r in records {
        let src = |s: Option<Source>| match s {
            Some(Source::Exact) => "*",
            _ => "",
        };
        out.push_str(&format!(
            "{:<16} {:>4} {:>6} {:>12} {:>12} {:>7} {:>12} {:>12} {:>7} {:>7} {:>12.2} {:>6} {:>6} {:>9.3}\n",
            r.instance,
            r.clusters,
            r.projects,
            format!("{}{}", src(r.full_source), cell(r.obj_full, 2)),
            cell(r.ub_full, 2),
            cell(r.gap_full, 4),
            format!("{}{}", src(r.fixed_source), cell(r.obj_fixed, 2)),
            cell(r.ub_fixed, 2),
            cell(r.gap_fixed, 4),
            cell(r.decline, 2),
            r.obj_a,
            cell(r.r1, 2),
            cell(r.r2, 2),
            r.time_total,
        ));
    }
    if records.iter().any(|r| r.full_source == Some(Source::Exact) || r.fixed_source == Some(Source::Exact)) {
        out.push_str("* exact optimum from enumeration\n");
    }
    out
}
