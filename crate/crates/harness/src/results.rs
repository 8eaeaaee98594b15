//! The results file: one CSV row per trial.
//!
//! Column layout is fixed: `algorithm,instance,trial,seed,cost,generations,time_ms`,
//! with `cost` either a nonnegative integer or the literal `INF`. Rows are
//! fully determined by the experiment config except for `time_ms`.

use rostering_core::problem::ExtendedCost;
use rostering_core::stats::TrialSet;
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use thiserror::Error;

pub const RESULTS_HEADER: &str = "algorithm,instance,trial,seed,cost,generations,time_ms";

#[derive(Debug, Error)]
pub enum ResultsError {
    #[error("failed to read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("failed to write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: missing header line")]
    MissingHeader { path: String },
    #[error("{path}: header {got:?} does not match {RESULTS_HEADER:?}")]
    BadHeader { path: String, got: String },
    #[error("{path}:{line}: expected 7 comma-separated fields, got {got}")]
    FieldCount {
        path: String,
        line: usize,
        got: usize,
    },
    #[error("{path}:{line}: {message}")]
    BadField {
        path: String,
        line: usize,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultRow {
    pub algorithm: String,
    pub instance: String,
    pub trial: u32,
    pub seed: u64,
    pub cost: ExtendedCost,
    pub generations: u32,
    pub time_ms: u64,
}

impl ResultRow {
    fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.algorithm,
            self.instance,
            self.trial,
            self.seed,
            self.cost,
            self.generations,
            self.time_ms
        )
    }
}

pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<(), ResultsError> {
    let mut out = String::with_capacity(rows.len() * 32 + RESULTS_HEADER.len() + 1);
    out.push_str(RESULTS_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_line());
        out.push('\n');
    }
    fs::write(path, out).map_err(|source| ResultsError::Write {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>, ResultsError> {
    let display = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| ResultsError::Read {
        path: display.clone(),
        source,
    })?;
    parse_results(&text, &display)
}

pub fn parse_results(text: &str, origin: &str) -> Result<Vec<ResultRow>, ResultsError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| ResultsError::MissingHeader {
        path: origin.to_string(),
    })?;
    if header != RESULTS_HEADER {
        return Err(ResultsError::BadHeader {
            path: origin.to_string(),
            got: header.to_string(),
        });
    }
    let mut rows = Vec::new();
    for (index, line) in lines {
        if line.is_empty() {
            continue;
        }
        let line_no = index + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(ResultsError::FieldCount {
                path: origin.to_string(),
                line: line_no,
                got: fields.len(),
            });
        }
        let field = |i: usize, what: &str| -> Result<&str, ResultsError> {
            let value = fields[i];
            if value.is_empty() {
                return Err(ResultsError::BadField {
                    path: origin.to_string(),
                    line: line_no,
                    message: format!("{what} is empty"),
                });
            }
            Ok(value)
        };
        let parse_num = |i: usize, what: &str| -> Result<u64, ResultsError> {
            field(i, what)?.parse::<u64>().map_err(|_| ResultsError::BadField {
                path: origin.to_string(),
                line: line_no,
                message: format!("{what} must be a nonnegative integer, got {:?}", fields[i]),
            })
        };
        rows.push(ResultRow {
            algorithm: field(0, "algorithm")?.to_string(),
            instance: field(1, "instance")?.to_string(),
            trial: parse_num(2, "trial")? as u32,
            seed: parse_num(3, "seed")?,
            cost: field(4, "cost")?.parse().map_err(|message| ResultsError::BadField {
                path: origin.to_string(),
                line: line_no,
                message,
            })?,
            generations: parse_num(5, "generations")? as u32,
            time_ms: parse_num(6, "time_ms")?,
        });
    }
    Ok(rows)
}

/// Groups rows into one [`TrialSet`] per (algorithm, instance) cell, ordered
/// by cell key.
pub fn trial_sets(rows: &[ResultRow]) -> Vec<TrialSet> {
    let mut groups: BTreeMap<(String, String), Vec<ExtendedCost>> = BTreeMap::new();
    for row in rows {
        groups
            .entry((row.algorithm.clone(), row.instance.clone()))
            .or_default()
            .push(row.cost);
    }
    groups
        .into_iter()
        .map(|((algorithm, instance), costs)| TrialSet::new(algorithm, instance, costs))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_rows() -> Vec<ResultRow> {
        vec![
            ResultRow {
                algorithm: "V1".into(),
                instance: "week1".into(),
                trial: 0,
                seed: 7,
                cost: ExtendedCost::Feasible(12),
                generations: 200,
                time_ms: 33,
            },
            ResultRow {
                algorithm: "V1".into(),
                instance: "week1".into(),
                trial: 1,
                seed: 8,
                cost: ExtendedCost::Infeasible,
                generations: 200,
                time_ms: 31,
            },
        ]
    }

    #[test]
    fn csv_round_trip() {
        let rows = sample_rows();
        let text = {
            let mut s = String::from(RESULTS_HEADER);
            s.push('\n');
            for r in &rows {
                s.push_str(&r.to_csv_line());
                s.push('\n');
            }
            s
        };
        assert!(text.contains("V1,week1,1,8,INF,200,31"));
        let parsed = parse_results(&text, "mem").unwrap();
        assert_eq!(parsed, rows);
    }

    #[test]
    fn header_is_checked_verbatim() {
        let err = parse_results("alg,inst\nV1,week1", "mem").unwrap_err();
        assert!(matches!(err, ResultsError::BadHeader { .. }));
        assert!(matches!(
            parse_results("", "mem").unwrap_err(),
            ResultsError::MissingHeader { .. }
        ));
    }

    #[test]
    fn malformed_rows_name_the_line() {
        let text = format!("{RESULTS_HEADER}\nV1,week1,0,0,notacost,0,0\n");
        match parse_results(&text, "mem").unwrap_err() {
            ResultsError::BadField { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
        let text = format!("{RESULTS_HEADER}\nV1,week1,0,0\n");
        assert!(matches!(
            parse_results(&text, "mem").unwrap_err(),
            ResultsError::FieldCount { got: 4, .. }
        ));
    }

    #[test]
    fn grouping_preserves_multiset_per_cell() {
        let rows = sample_rows();
        let sets = trial_sets(&rows);
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].algorithm, "V1");
        assert_eq!(sets[0].instance, "week1");
        assert_eq!(
            sets[0].costs,
            vec![ExtendedCost::Feasible(12), ExtendedCost::Infeasible]
        );
    }
}
