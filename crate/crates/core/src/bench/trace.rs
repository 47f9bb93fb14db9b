use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column header of every trace CSV.
pub const CSV_COLUMNS: [&str; 7] = [
    "method",
    "seed",
    "iteration",
    "evals",
    "best_value",
    "iter_time_ms",
    "cum_time_ms",
];

/// One optimizer iteration. Row 0 is the initial design.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub evals: usize,
    /// Incumbent in problem units; `+inf` while nothing has succeeded.
    pub best_value: f64,
    pub iter_time_ms: f64,
    pub cum_time_ms: f64,
    /// Time spent fitting surrogates and scoring, within `iter_time_ms`.
    pub gp_fit_ms: f64,
    pub gp_fits: usize,
    /// Indices of the best candidate evaluated in this iteration. Not part
    /// of the CSV.
    pub suggested: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace {
    pub method: String,
    pub seed: u64,
    pub rows: Vec<TraceRow>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    method: String,
    seed: u64,
    iteration: usize,
    evals: usize,
    best_value: f64,
    iter_time_ms: f64,
    cum_time_ms: f64,
}

impl ConvergenceTrace {
    pub fn new(method: impl Into<String>, seed: u64) -> Self {
        Self {
            method: method.into(),
            seed,
            rows: Vec::new(),
        }
    }

    /// Label used in plot legends.
    pub fn label(&self) -> String {
        format!("{} (seed {})", self.method, self.seed)
    }

    pub fn final_best(&self) -> f64 {
        self.rows.last().map_or(f64::INFINITY, |r| r.best_value)
    }

    pub fn total_evals(&self) -> usize {
        self.rows.last().map_or(0, |r| r.evals)
    }

    pub fn total_time_ms(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.cum_time_ms)
    }

    pub fn total_gp_fits(&self) -> usize {
        self.rows.iter().map(|r| r.gp_fits).sum()
    }

    /// Evaluations spent when the incumbent first reached `threshold`.
    pub fn evals_to_reach(&self, threshold: f64) -> Option<usize> {
        self.rows
            .iter()
            .find(|r| r.best_value <= threshold)
            .map(|r| r.evals)
    }

    pub fn check_invariants(&self) -> Result<()> {
        let bad = |reason: String| Error::Parse {
            what: format!("trace {}", self.label()),
            reason,
        };
        for w in self.rows.windows(2) {
            if w[1].evals <= w[0].evals {
                return Err(bad(format!(
                    "evals not increasing at iteration {}",
                    w[1].iteration
                )));
            }
            if w[1].best_value > w[0].best_value {
                return Err(bad(format!(
                    "best value rose at iteration {}",
                    w[1].iteration
                )));
            }
            if w[1].cum_time_ms < w[0].cum_time_ms {
                return Err(bad(format!(
                    "time went backwards at iteration {}",
                    w[1].iteration
                )));
            }
        }
        Ok(())
    }
}

pub fn write_csv<W: Write>(traces: &[ConvergenceTrace], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for t in traces {
        for r in &t.rows {
            w.serialize(CsvRow {
                method: t.method.clone(),
                seed: t.seed,
                iteration: r.iteration,
                evals: r.evals,
                best_value: r.best_value,
                iter_time_ms: r.iter_time_ms,
                cum_time_ms: r.cum_time_ms,
            })?;
        }
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn write_csv_file(traces: &[ConvergenceTrace], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(traces, std::io::BufWriter::new(file))
}

/// Parses trace CSV, grouping rows into one trace per `(method, seed)` in
/// order of first appearance. Columns not stored in the CSV come back
/// zeroed or empty.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<ConvergenceTrace>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_COLUMNS {
        return Err(Error::Parse {
            what: "trace csv".into(),
            reason: format!("unexpected header {header:?}"),
        });
    }
    let mut traces: Vec<ConvergenceTrace> = Vec::new();
    for row in r.deserialize() {
        let row: CsvRow = row?;
        let pos = traces
            .iter()
            .position(|t| t.method == row.method && t.seed == row.seed);
        let trace = match pos {
            Some(i) => &mut traces[i],
            None => {
                traces.push(ConvergenceTrace::new(row.method.clone(), row.seed));
                traces.last_mut().unwrap()
            }
        };
        trace.rows.push(TraceRow {
            iteration: row.iteration,
            evals: row.evals,
            best_value: row.best_value,
            iter_time_ms: row.iter_time_ms,
            cum_time_ms: row.cum_time_ms,
            gp_fit_ms: 0.0,
            gp_fits: 0,
            suggested: Vec::new(),
        });
    }
    Ok(traces)
}

pub fn read_csv_file(path: impl AsRef<Path>) -> Result<Vec<ConvergenceTrace>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(std::io::BufReader::new(file))
}

/// Per-iteration medians across traces of the same method, truncated to the
/// shortest trace.
pub fn write_median_csv<W: Write>(traces: &[ConvergenceTrace], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "method",
        "runs",
        "iteration",
        "evals",
        "median_best_value",
        "median_iter_time_ms",
        "median_cum_time_ms",
    ])?;
    let mut methods: Vec<&str> = Vec::new();
    for t in traces {
        if !methods.contains(&t.method.as_str()) {
            methods.push(&t.method);
        }
    }
    for m in methods {
        let group: Vec<&ConvergenceTrace> = traces.iter().filter(|t| t.method == m).collect();
        let len = group.iter().map(|t| t.rows.len()).min().unwrap_or(0);
        for i in 0..len {
            let col = |f: fn(&TraceRow) -> f64| median(group.iter().map(|t| f(&t.rows[i])));
            w.write_record([
                m.to_string(),
                group.len().to_string(),
                group[0].rows[i].iteration.to_string(),
                group[0].rows[i].evals.to_string(),
                col(|r| r.best_value).to_string(),
                col(|r| r.iter_time_ms).to_string(),
                col(|r| r.cum_time_ms).to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn median(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.into_iter().collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace() -> ConvergenceTrace {
        let mut t = ConvergenceTrace::new("score", 7);
        for i in 0..4 {
            t.rows.push(TraceRow {
                iteration: i,
                evals: 20 + i,
                best_value: 10.0 / (i as f64 + 1.0) + 1e-17,
                iter_time_ms: 0.1 * i as f64 + 1.0 / 3.0,
                cum_time_ms: i as f64 * 0.7,
                gp_fit_ms: 0.0,
                gp_fits: 0,
                suggested: Vec::new(),
            });
        }
        t
    }

    #[test]
    fn csv_header_is_exact() {
        let mut buf = Vec::new();
        write_csv(&[trace()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "method,seed,iteration,evals,best_value,iter_time_ms,cum_time_ms"
        );
        assert_eq!(text.lines().count(), 5);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let mut a = trace();
        let mut b = trace();
        b.method = "bo".into();
        a.rows[0].best_value = f64::INFINITY;
        let mut buf = Vec::new();
        write_csv(&[a.clone(), b.clone()], &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, vec![a, b]);
    }

    #[test]
    fn rejects_foreign_headers() {
        assert!(read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median([3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median([4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median([]).is_nan());
    }

    #[test]
    fn invariant_check_catches_regressions() {
        let mut t = trace();
        t.check_invariants().unwrap();
        t.rows[2].best_value = 100.0;
        assert!(t.check_invariants().is_err());
    }
}
