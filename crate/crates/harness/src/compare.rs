//! Comparison reports: one [`ComparisonReport`] per requested alpha, a
//! cross-alpha stability summary, and rendering to JSON files plus aligned
//! text tables.

use crate::results::{trial_sets, ResultRow};
use rostering_core::stats::{overall_comparison, Alpha, ComparisonReport, StatsError};
use serde::Serialize;
use std::fs;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CompareError {
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("no alpha values requested")]
    NoAlphas,
    #[error("failed to write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
}

/// Whether the headline conclusions agree across the analysed alphas:
/// identical per-instance rank rows and identical 5%-level pairwise verdicts.
#[derive(Debug, Clone, Serialize)]
pub struct StabilitySummary {
    pub alphas: Vec<f64>,
    pub rank_rows_stable: bool,
    pub verdicts_stable: bool,
    /// Human-readable notes on any divergence.
    pub divergences: Vec<String>,
}

impl StabilitySummary {
    pub fn stable(&self) -> bool {
        self.rank_rows_stable && self.verdicts_stable
    }
}

#[derive(Debug)]
pub struct CompareOutput {
    pub reports: Vec<ComparisonReport>,
    pub stability: StabilitySummary,
}

/// Runs the comparison once per alpha and summarizes cross-alpha stability.
pub fn compare_results(rows: &[ResultRow], alphas: &[f64]) -> Result<CompareOutput, CompareError> {
    if alphas.is_empty() {
        return Err(CompareError::NoAlphas);
    }
    let sets = trial_sets(rows);
    let mut reports = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        reports.push(overall_comparison(&sets, Alpha::new(alpha)?)?);
    }
    let stability = summarize_stability(&reports);
    Ok(CompareOutput { reports, stability })
}

fn summarize_stability(reports: &[ComparisonReport]) -> StabilitySummary {
    let alphas: Vec<f64> = reports.iter().map(|r| r.alpha).collect();
    let mut divergences = Vec::new();
    let mut rank_rows_stable = true;
    let mut verdicts_stable = true;

    if let Some((first, rest)) = reports.split_first() {
        for report in rest {
            if report.instance_ranks != first.instance_ranks {
                rank_rows_stable = false;
                for (idx, (a, b)) in
                    first.instance_ranks.iter().zip(&report.instance_ranks).enumerate()
                {
                    if a != b {
                        divergences.push(format!(
                            "instance {}: ranks {:?} at alpha {} vs {:?} at alpha {}",
                            first.instances[idx], a, first.alpha, b, report.alpha
                        ));
                    }
                }
            }
            for (p, q) in first.pairwise.iter().zip(&report.pairwise) {
                let same_wilcoxon =
                    p.wilcoxon.significant_at(0.05) == q.wilcoxon.significant_at(0.05);
                let same_sign = p.sign.significant_at(0.05) == q.sign.significant_at(0.05);
                if !(same_wilcoxon && same_sign) {
                    verdicts_stable = false;
                    divergences.push(format!(
                        "pair {} vs {}: verdict changes between alpha {} and alpha {}",
                        p.first, p.second, first.alpha, report.alpha
                    ));
                }
            }
        }
    }

    StabilitySummary {
        alphas,
        rank_rows_stable,
        verdicts_stable,
        divergences,
    }
}

/// Renders one report as aligned text tables.
pub fn render_text(report: &ComparisonReport) -> String {
    let mut out = String::new();
    let k = report.algorithms.len();
    let name_width = report.algorithms.iter().map(|a| a.len()).max().unwrap_or(4).max(4);

    out.push_str(&format!("alpha = {}\n", report.alpha));
    for (idx, matrix) in report.e_matrices.iter().enumerate() {
        out.push_str(&format!("\nE matrix for instance {}\n", matrix.instance));
        out.push_str(&format!("{:>name_width$} ", ""));
        for name in &report.algorithms {
            out.push_str(&format!("{name:>8} "));
        }
        out.push('\n');
        for i in 0..k {
            out.push_str(&format!("{:>name_width$} ", report.algorithms[i]));
            for j in 0..k {
                out.push_str(&format!("{:>+8.4} ", matrix.value(i, j)));
            }
            out.push('\n');
        }
        out.push_str(&format!("ranks (1 = worst): {:?}\n", report.instance_ranks[idx]));
    }

    out.push_str("\naverage ranks (higher = better)\n");
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| report.average_ranks[b].total_cmp(&report.average_ranks[a]));
    for i in order {
        out.push_str(&format!(
            "{:>name_width$} {:>6.2}\n",
            report.algorithms[i], report.average_ranks[i]
        ));
    }

    match &report.friedman {
        Some(friedman) => {
            let s = friedman.outcome.statistic("S").unwrap_or(f64::NAN);
            out.push_str(&format!(
                "\nFriedman: S = {:.4}, df = {}, p = {:.4}\n",
                s, friedman.degrees_of_freedom, friedman.outcome.p_value
            ));
        }
        None => out.push_str("\nFriedman: not applicable (needs >= 2 instances and >= 2 algorithms)\n"),
    }

    if !report.pairwise.is_empty() {
        out.push_str("\npairwise tests on per-instance E values (two-sided)\n");
        for pair in &report.pairwise {
            let t_plus = pair.wilcoxon.statistic("T+").unwrap_or(f64::NAN);
            let t_minus = pair.wilcoxon.statistic("T-").unwrap_or(f64::NAN);
            let z = pair.wilcoxon.statistic("Z").unwrap_or(f64::NAN);
            let b = pair.sign.statistic("B").unwrap_or(f64::NAN);
            out.push_str(&format!(
                "{:>name_width$} vs {:<name_width$}  wilcoxon T+={:<7} T-={:<7} Z={:<7.3} p={:.4}{}  sign B={:<3} n={:<3} p={:.4}{}\n",
                pair.first,
                pair.second,
                t_plus,
                t_minus,
                z,
                pair.wilcoxon.p_value,
                if pair.wilcoxon.degenerate { " (degenerate)" } else { "" },
                b,
                pair.sign.n_effective,
                pair.sign.p_value,
                if pair.sign.degenerate { " (degenerate)" } else { "" },
            ));
        }
    }

    if !report.intransitive_triples.is_empty() {
        out.push_str("\ncyclic pairwise relations detected\n");
        for triple in &report.intransitive_triples {
            out.push_str(&format!(
                "  instance {}: {} / {} / {}\n",
                triple.instance, triple.algorithms[0], triple.algorithms[1], triple.algorithms[2]
            ));
        }
    }
    out
}

fn alpha_tag(alpha: f64) -> String {
    format!("{alpha:.2}").replace('.', "_")
}

/// Writes `comparison_alpha_<a>.json` / `.txt` per alpha plus
/// `alpha_stability.json`; returns the paths written.
pub fn write_reports(out_dir: &Path, output: &CompareOutput) -> Result<Vec<String>, CompareError> {
    let write = |path: &Path, contents: &str| -> Result<(), CompareError> {
        fs::write(path, contents).map_err(|source| CompareError::Write {
            path: path.display().to_string(),
            source,
        })
    };
    let mut written = Vec::new();
    for report in &output.reports {
        let json_path = out_dir.join(format!("comparison_alpha_{}.json", alpha_tag(report.alpha)));
        write(
            &json_path,
            &serde_json::to_string_pretty(report).expect("report serializes"),
        )?;
        written.push(json_path.display().to_string());
        let text_path = out_dir.join(format!("comparison_alpha_{}.txt", alpha_tag(report.alpha)));
        write(&text_path, &render_text(report))?;
        written.push(text_path.display().to_string());
    }
    let stability_path = out_dir.join("alpha_stability.json");
    write(
        &stability_path,
        &serde_json::to_string_pretty(&output.stability).expect("summary serializes"),
    )?;
    written.push(stability_path.display().to_string());
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rostering_core::problem::ExtendedCost;

    fn row(alg: &str, inst: &str, trial: u32, cost: ExtendedCost) -> ResultRow {
        ResultRow {
            algorithm: alg.into(),
            instance: inst.into(),
            trial,
            seed: 0,
            cost,
            generations: 0,
            time_ms: 0,
        }
    }

    fn grid() -> Vec<ResultRow> {
        let mut rows = Vec::new();
        for inst in ["p1", "p2"] {
            for t in 0..4 {
                rows.push(row("good", inst, t, ExtendedCost::Feasible(t)));
                rows.push(row("bad", inst, t, ExtendedCost::Feasible(t + 10)));
            }
        }
        rows
    }

    #[test]
    fn one_report_per_alpha_with_stable_summary() {
        let output = compare_results(&grid(), &[0.5, 1.0]).unwrap();
        assert_eq!(output.reports.len(), 2);
        assert!(output.stability.stable());
        assert!(output.stability.divergences.is_empty());
    }

    #[test]
    fn renders_tables_and_writes_files() {
        let output = compare_results(&grid(), &[1.0]).unwrap();
        let text = render_text(&output.reports[0]);
        assert!(text.contains("E matrix for instance p1"));
        assert!(text.contains("Friedman"));
        assert!(text.contains("good"));

        let dir = std::env::temp_dir().join(format!("rostering-compare-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let written = write_reports(&dir, &output).unwrap();
        assert_eq!(written.len(), 3);
        for path in &written {
            assert!(Path::new(path).exists(), "{path} missing");
        }
        fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn empty_alpha_list_is_an_error() {
        assert!(matches!(compare_results(&grid(), &[]), Err(CompareError::NoAlphas)));
    }
}
