//! CSV output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use saliency_core::metrics::{MetricReport, CURVE_POINTS};

use crate::error::BenchError;

pub const METRICS_HEADER: &str = "image,precision,recall,fmeasure,auc,mae,or";
pub const CURVES_HEADER: &str = "threshold,precision,recall,fpr,tpr";
pub const AGGREGATE_ROW: &str = "mean";

fn row(name: &str, r: &MetricReport) -> String {
    format!(
        "{name},{:?},{:?},{:?},{:?},{:?},{:?}",
        r.precision, r.recall, r.f_measure, r.auc, r.mae, r.or_score
    )
}

/// Renders one row per image followed by the aggregate row.
pub fn metrics_csv(rows: &[(String, MetricReport)], aggregate: &MetricReport) -> String {
    let mut s = String::from(METRICS_HEADER);
    s.push('\n');
    for (name, r) in rows {
        s.push_str(&row(name, r));
        s.push('\n');
    }
    s.push_str(&row(AGGREGATE_ROW, aggregate));
    s.push('\n');
    s
}

pub fn write_metrics_csv(
    path: &Path,
    rows: &[(String, MetricReport)],
    aggregate: &MetricReport,
) -> Result<(), BenchError> {
    std::fs::write(path, metrics_csv(rows, aggregate))?;
    Ok(())
}

/// 256 rows, one per 8-bit threshold.
pub fn write_curves_csv(path: &Path, r: &MetricReport) -> Result<(), BenchError> {
    let mut f = BufWriter::new(File::create(path)?);
    writeln!(f, "{CURVES_HEADER}")?;
    for t in 0..CURVE_POINTS {
        let (p, rc) = r.pr_curve[t];
        let (fpr, tpr) = r.roc_curve[t];
        writeln!(f, "{t},{p:?},{rc:?},{fpr:?},{tpr:?}")?;
    }
    f.flush()?;
    Ok(())
}
