//! Report files written by `evaluate`.
//!
//! - `individual.csv`: rank, classifier, accuracy
//! - `report.csv`: one row per (subset, combiner)
//! - `report.txt`: the same numbers as an aligned table
//! - `summary.csv`: overall performance and maximum ERR per combiner
//! - `err_by_size.csv`: maximum ERR per combiner and subset size

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use dsfusion::metrics::mean_accuracy;

use crate::commands::{write_text, Cell, ExperimentReport};
use crate::config::Combiner;
use crate::error::Result;
use crate::subsets::label;

fn fmt_err(err: Option<f64>) -> String {
    err.map_or_else(|| "NA".to_string(), |v| v.to_string())
}

/// Cell with the largest ERR (first one on ties).
fn max_err<'a>(cells: impl Iterator<Item = &'a Cell>) -> Option<&'a Cell> {
    cells
        .filter(|c| c.err.is_some())
        .fold(None, |best: Option<&Cell>, c| match best {
            Some(b) if b.err >= c.err => Some(b),
            _ => Some(c),
        })
}

/// Overall performance, maximum ERR and the subset achieving it.
pub fn summarize(report: &ExperimentReport, combiner: Combiner) -> Result<(f64, Option<&Cell>)> {
    let overall = mean_accuracy(report.cells_for(combiner).map(|c| c.accuracy))?;
    Ok((overall, max_err(report.cells_for(combiner))))
}

pub fn individual_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("rank,classifier,accuracy\n");
    for (r, ind) in report.ranked.iter().enumerate() {
        writeln!(out, "c{},{},{}", r + 1, ind.name, ind.accuracy).unwrap();
    }
    out
}

pub fn report_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("subset,classifiers,size,combiner,accuracy,err\n");
    for c in &report.cells {
        let names: Vec<&str> = c
            .indices
            .iter()
            .map(|&i| {
                report
                    .ranked
                    .iter()
                    .find(|r| r.index == i)
                    .map_or("?", |r| r.name.as_str())
            })
            .collect();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            label(&c.subset),
            names.join("+"),
            c.subset.len(),
            c.combiner,
            c.accuracy,
            fmt_err(c.err)
        )
        .unwrap();
    }
    out
}

pub fn summary_csv(report: &ExperimentReport) -> Result<String> {
    let mut out = String::from("combiner,overall_performance,max_err,max_err_subset\n");
    for &combiner in &report.combiners {
        let (overall, best) = summarize(report, combiner)?;
        writeln!(
            out,
            "{combiner},{overall},{},{}",
            fmt_err(best.and_then(|c| c.err)),
            best.map_or_else(String::new, |c| label(&c.subset))
        )
        .unwrap();
    }
    Ok(out)
}

pub fn err_by_size_csv(report: &ExperimentReport) -> String {
    let mut sizes: Vec<usize> = report.subsets.iter().map(Vec::len).collect();
    sizes.dedup();
    let mut out = String::from("size,combiner,max_err\n");
    for size in sizes {
        for &combiner in &report.combiners {
            let best = max_err(
                report
                    .cells_for(combiner)
                    .filter(|c| c.subset.len() == size),
            );
            writeln!(
                out,
                "{size},{combiner},{}",
                fmt_err(best.and_then(|c| c.err))
            )
            .unwrap();
        }
    }
    out
}

/// Accuracy table with one row per subset and one column per combiner,
/// followed by overall performance and maximum ERR rows.
pub fn report_text(report: &ExperimentReport) -> Result<String> {
    let mut out = String::from("Individual accuracy (test set)\n");
    for (r, ind) in report.ranked.iter().enumerate() {
        writeln!(
            out,
            "  c{:<3} {:<16} {:>7.2}",
            r + 1,
            ind.name,
            ind.accuracy
        )
        .unwrap();
    }
    out.push('\n');

    let width = report
        .subsets
        .iter()
        .map(|s| label(s).len())
        .max()
        .unwrap_or(0)
        .max("Classifiers".len());
    write!(out, "{:<width$}", "Classifiers").unwrap();
    for c in &report.combiners {
        write!(out, " {:>8}", c.name()).unwrap();
    }
    out.push('\n');

    let per_row = report.combiners.len();
    for (row, subset) in report.subsets.iter().enumerate() {
        write!(out, "{:<width$}", label(subset)).unwrap();
        for cell in &report.cells[row * per_row..(row + 1) * per_row] {
            write!(out, " {:>8.2}", cell.accuracy).unwrap();
        }
        out.push('\n');
    }

    let mut overall_row = format!("{:<width$}", "Overall");
    let mut err_row = format!("{:<width$}", "Max ERR");
    for &c in &report.combiners {
        let (overall, best) = summarize(report, c)?;
        write!(overall_row, " {overall:>8.2}").unwrap();
        match best.and_then(|b| b.err) {
            Some(e) => write!(err_row, " {e:>8.2}").unwrap(),
            None => write!(err_row, " {:>8}", "NA").unwrap(),
        }
    }
    writeln!(out, "{overall_row}\n{err_row}").unwrap();
    Ok(out)
}

/// Write every report file into `dir`, returning their paths.
pub fn write_all(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| crate::error::CliError::io(dir, e))?;
    let files = [
        ("individual.csv", individual_csv(report)),
        ("report.csv", report_csv(report)),
        ("report.txt", report_text(report)?),
        ("summary.csv", summary_csv(report)?),
        ("err_by_size.csv", err_by_size_csv(report)),
    ];
    let mut written = Vec::new();
    for (name, text) in files {
        let path = dir.join(name);
        write_text(&path, &text)?;
        written.push(path);
    }
    Ok(written)
}
