use std::fmt::Write as _;

use serde::Serialize;

use crate::args::Format;
use crate::report::{CvReport, DatasetInfo, RankReport, Settings, TimingReport};
use crate::CliError;

pub fn rank(report: &RankReport, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => json(report),
        Format::Csv => {
            #[derive(Serialize)]
            struct Row<'a> {
                step: usize,
                feature: &'a str,
                feature_index: usize,
                score: f64,
                relevance: f64,
                mean_redundancy: f64,
                association: f64,
                redundancy: f64,
            }
            csv(report.ranking.iter().zip(&report.curve).map(|(r, c)| Row {
                step: r.step,
                feature: &r.feature_name,
                feature_index: r.feature_index,
                score: r.score,
                relevance: r.relevance,
                mean_redundancy: r.mean_redundancy,
                association: c.association,
                redundancy: c.redundancy,
            }))
        }
        Format::Text => {
            let mut out = header(&report.dataset, &report.settings);
            let _ = writeln!(
                out,
                "{:>4}  {:<20} {:>10} {:>10} {:>10} {:>8} {:>8}",
                "step", "feature", "score", "relevance", "mean_red", "A", "R"
            );
            for (r, c) in report.ranking.iter().zip(&report.curve) {
                let _ = writeln!(
                    out,
                    "{:>4}  {:<20} {:>10.6} {:>10.6} {:>10.6} {:>8.4} {:>8.4}{}",
                    r.step,
                    r.feature_name,
                    r.score,
                    r.relevance,
                    r.mean_redundancy,
                    c.association,
                    c.redundancy,
                    if r.weak_relevance { "  (weak)" } else { "" }
                );
            }
            if let Some(cv) = &report.cv {
                let _ = writeln!(out, "k chosen by cross-validation: {}", cv.best_k);
            }
            Ok(out.into_bytes())
        }
    }
}

pub fn cv(report: &CvReport, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => json(report),
        Format::Csv => csv(report.curve.iter()),
        Format::Text => {
            let mut out = header(&report.dataset, &report.settings);
            let _ = writeln!(out, "{:>4}  {:<20} {:>9}", "k", "added", "accuracy");
            for p in &report.curve {
                let mark = if p.k == report.best_k { "  *" } else { "" };
                let _ = writeln!(out, "{:>4}  {:<20} {:>9.4}{mark}", p.k, p.feature, p.accuracy);
            }
            let _ = writeln!(out, "best k: {} ({})", report.best_k, report.best_features.join(", "));
            Ok(out.into_bytes())
        }
    }
}

pub fn bench(report: &TimingReport, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => json(report),
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                workers: usize,
                median_seconds: f64,
                speedup: f64,
                cvtest_calls: u64,
            }
            csv(report.runs.iter().map(|r| Row {
                workers: r.workers,
                median_seconds: r.median_seconds,
                speedup: r.speedup,
                cvtest_calls: r.cvtest_calls,
            }))
        }
        Format::Text => {
            let mut out = header(&report.dataset, &report.settings);
            let _ = writeln!(out, "k = {}, {} repeats", report.k, report.repeats);
            let _ = writeln!(out, "{:>7} {:>12} {:>8} {:>12}", "workers", "median (s)", "speedup", "cvtest calls");
            for r in &report.runs {
                let _ = writeln!(
                    out,
                    "{:>7} {:>12.4} {:>8.2} {:>12}",
                    r.workers, r.median_seconds, r.speedup, r.cvtest_calls
                );
            }
            if !report.rankings_identical {
                let _ = writeln!(out, "rankings differ across worker counts");
            }
            Ok(out.into_bytes())
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn csv<T: Serialize>(rows: impl Iterator<Item = T>) -> Result<Vec<u8>, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).map_err(|e| CliError::Io(e.to_string()))?;
    }
    writer.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

fn header(dataset: &DatasetInfo, settings: &Settings) -> String {
    format!(
        "{}: {} rows, {} features, {} classes\nobjective: {:?} (lambda {})\n\n",
        dataset.source,
        dataset.rows,
        dataset.features,
        dataset.classes,
        settings.objective.kind,
        settings.objective.lambda
    )
    .to_lowercase()
}
