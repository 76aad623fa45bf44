//! Text, CSV and JSON rendering of results.

use std::io::{self, Write};

use densub::SubsetStats;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// One solver run. `seconds` is the only field that varies between
/// identical invocations.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub dataset: String,
    pub reward: String,
    pub algo: String,
    pub objective: Option<f64>,
    pub size: Option<usize>,
    pub seconds: Option<f64>,
    pub guarantee: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<String>>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    dataset: &'a str,
    reward: &'a str,
    algo: &'a str,
    objective: String,
    size: Option<usize>,
    seconds: Option<f64>,
    guarantee: &'a str,
}

fn csv_error(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

/// Writes a single run; JSON output is one object rather than an array.
pub fn write_row(out: &mut impl Write, format: Format, row: &Row) -> io::Result<()> {
    if format == Format::Json {
        let text = serde_json::to_string_pretty(row).map_err(io::Error::other)?;
        return writeln!(out, "{text}");
    }
    write_rows(out, format, std::slice::from_ref(row))
}

pub fn write_rows(out: &mut impl Write, format: Format, rows: &[Row]) -> io::Result<()> {
    match format {
        Format::Json => {
            let text = serde_json::to_string_pretty(rows).map_err(io::Error::other)?;
            writeln!(out, "{text}")
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                let objective = match (&r.error, r.objective) {
                    (Some(e), _) => format!("error: {e}"),
                    (None, Some(x)) => x.to_string(),
                    (None, None) => String::new(),
                };
                w.serialize(CsvRow {
                    dataset: &r.dataset,
                    reward: &r.reward,
                    algo: &r.algo,
                    objective,
                    size: r.size,
                    seconds: r.seconds,
                    guarantee: &r.guarantee,
                })
                .map_err(csv_error)?;
            }
            w.flush()
        }
        Format::Text => {
            for r in rows {
                writeln!(out, "dataset: {}", r.dataset)?;
                writeln!(out, "reward: {}", r.reward)?;
                writeln!(out, "algo: {}", r.algo)?;
                if let Some(e) = &r.error {
                    writeln!(out, "error: {e}")?;
                    continue;
                }
                if let Some(x) = r.objective {
                    writeln!(out, "density: {x}")?;
                }
                if let Some(s) = r.size {
                    writeln!(out, "size: {s}")?;
                }
                if let Some(s) = r.seconds {
                    writeln!(out, "seconds: {s:.6}")?;
                }
                writeln!(out, "guarantee: {}", r.guarantee)?;
                if let Some(m) = &r.members {
                    writeln!(out, "members: {}", m.join(","))?;
                }
            }
            Ok(())
        }
    }
}

/// Edge-composition counts in the column order atleast-two, atleast-half,
/// all-but-one, contained edges, size.
#[derive(Debug, Clone, Serialize)]
pub struct StatsRow {
    pub dataset: String,
    pub reward: String,
    #[serde(flatten)]
    pub stats: StatsFields,
}

#[derive(Debug, Clone, Serialize)]
pub struct StatsFields {
    pub atleast_two: usize,
    pub atleast_half: usize,
    pub all_but_one: usize,
    pub contained: usize,
    pub size: usize,
    pub density: f64,
}

impl From<SubsetStats> for StatsFields {
    fn from(s: SubsetStats) -> Self {
        StatsFields {
            atleast_two: s.atleast_two,
            atleast_half: s.atleast_half,
            all_but_one: s.all_but_one,
            contained: s.contained,
            size: s.size,
            density: s.density,
        }
    }
}

pub fn write_stats(out: &mut impl Write, json: bool, row: &StatsRow) -> io::Result<()> {
    if json {
        let text = serde_json::to_string_pretty(row).map_err(io::Error::other)?;
        return writeln!(out, "{text}");
    }
    let s = &row.stats;
    writeln!(out, "atleast-two,atleast-half,all-but-one,contained,size,density")?;
    writeln!(
        out,
        "{},{},{},{},{},{}",
        s.atleast_two, s.atleast_half, s.all_but_one, s.contained, s.size, s.density
    )
}
