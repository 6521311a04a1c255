//! Plain-text tables. Metric values print as percentages with one decimal;
//! undefined values print as an em dash placeholder.

use ragcheck_core::meta_eval::{AnnotatorAgreement, MetricCorrelation};
use ragcheck_core::records::ReportRecord;
use ragcheck_core::Metric;

pub const UNDEFINED: &str = "\u{2014}";
const WIDTH: usize = 7;

pub fn percent(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{:.1}", v * 100.0),
        None => UNDEFINED.to_string(),
    }
}

fn push_cell(line: &mut String, cell: &str) {
    let pad = WIDTH.saturating_sub(cell.chars().count());
    line.push(' ');
    line.extend(std::iter::repeat_n(' ', pad));
    line.push_str(cell);
}

fn push_label(line: &mut String, label: &str, width: usize) {
    line.push_str(label);
    line.extend(std::iter::repeat_n(
        ' ',
        width.saturating_sub(label.chars().count()),
    ));
}

/// One row per record; the aggregate record is labelled `mean`.
pub fn metrics_table(records: &[ReportRecord]) -> String {
    let label = |r: &ReportRecord| {
        if r.is_aggregate() {
            "mean".to_string()
        } else {
            r.query_id.clone()
        }
    };
    let width = records
        .iter()
        .map(|r| label(r).chars().count())
        .chain(["query_id".len()])
        .max()
        .unwrap_or(0);

    let mut out = String::new();
    push_label(&mut out, "query_id", width);
    for m in Metric::ALL {
        push_cell(&mut out, m.column());
    }
    push_cell(&mut out, "#Claim");
    out.push('\n');
    for r in records {
        let mut line = String::new();
        push_label(&mut line, &label(r), width);
        for m in Metric::ALL {
            push_cell(&mut line, &percent(r.metrics.get(m)));
        }
        push_cell(&mut line, &r.counts.m.to_string());
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn correlation_table(rows: &[MetricCorrelation]) -> String {
    let width = rows
        .iter()
        .map(|r| r.metric.len())
        .chain(["metric".len()])
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    push_label(&mut out, "metric", width);
    out.push_str("  ");
    push_label(&mut out, "aspect", 12);
    push_cell(&mut out, "Pearson");
    push_cell(&mut out, "Spearman");
    push_cell(&mut out, "n");
    out.push('\n');
    for r in rows {
        push_label(&mut out, &r.metric, width);
        out.push_str("  ");
        push_label(&mut out, r.aspect.name(), 12);
        push_cell(&mut out, &percent(r.result.pearson));
        push_cell(&mut out, &percent(r.result.spearman));
        push_cell(&mut out, &r.result.n.to_string());
        out.push('\n');
    }
    out
}

pub fn agreement_table(rows: &[AnnotatorAgreement]) -> String {
    let mut out = String::new();
    push_label(&mut out, "aspect", 12);
    push_cell(&mut out, "agree");
    push_cell(&mut out, "Pearson");
    push_cell(&mut out, "Spearman");
    push_cell(&mut out, "n");
    out.push('\n');
    for r in rows {
        push_label(&mut out, r.aspect.name(), 12);
        push_cell(&mut out, &percent(Some(r.agreement_rate)));
        push_cell(&mut out, &percent(r.correlation.pearson));
        push_cell(&mut out, &percent(r.correlation.spearman));
        push_cell(&mut out, &r.correlation.n.to_string());
        out.push('\n');
    }
    out
}
