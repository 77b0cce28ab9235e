use std::fmt::Write;

use super::report::{GroupReport, QaTestMetrics, ReliabilityReport};
use crate::agreement::MeanCi;

/// `report.json`: pretty-printed with a trailing newline.
pub fn report_json(report: &ReliabilityReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}

fn ci(v: &MeanCi) -> String {
    format!("{:.3} ± {:.3}", v.mean, v.half_width)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.3}"))
}

type MetricRow = (&'static str, fn(&QaTestMetrics) -> String);

fn qa_table(out: &mut String, title: &str, groups: &[GroupReport], pick: fn(&GroupReport) -> Option<&QaTestMetrics>) {
    let _ = writeln!(out, "## {title}\n");
    let _ = write!(out, "| Metric |");
    for g in groups {
        let _ = write!(out, " {} (n={}) |", g.name, pick(g).map_or(0, |m| m.annotators));
    }
    let _ = write!(out, "\n|---|");
    for _ in groups {
        out.push_str("---|");
    }
    out.push('\n');
    let rows: [MetricRow; 4] = [
        ("SDA", |m| ci(&m.sda)),
        ("Cohen's κ", |m| ci(&m.kappa)),
        ("Cronbach's α", |m| opt(m.cronbach_alpha)),
        ("Krippendorff's α", |m| opt(m.krippendorff_alpha)),
    ];
    for (label, cell) in rows {
        let _ = write!(out, "| {label} |");
        for g in groups {
            let _ = write!(out, " {} |", pick(g).map_or_else(|| "n/a".into(), cell));
        }
        out.push('\n');
    }
    out.push('\n');
}

/// `report.md`: per-test group tables in the layout of the classic
/// reliability table, followed by task results and per-annotator rows.
pub fn report_markdown(report: &ReliabilityReport) -> String {
    let s = &report.settings;
    let mut out = String::from("# Annotator reliability\n\n");
    let _ = writeln!(
        out,
        "Analysis grid {} Hz ({}), SDA variant `{}`, reliability threshold {} (strictly below is unreliable).",
        s.rate_hz, s.resampling, s.sda_variant, s.threshold
    );
    let _ = writeln!(
        out,
        "Pairwise measures compare {}; κ uses {}; intervals are {}.\n",
        s.qa_reference, s.kappa_categories, s.confidence_interval
    );

    qa_table(&mut out, "Visual QA", &report.groups, |g| g.visual.as_ref());
    qa_table(&mut out, "Auditory QA", &report.groups, |g| g.auditory.as_ref());

    out.push_str("## QA cross-test correlation\n\n| Group | Pearson ρ (visual vs auditory SDA) |\n|---|---|\n");
    for g in &report.groups {
        let _ = writeln!(out, "| {} | {} |", g.name, opt(g.qa_sda_correlation));
    }
    out.push('\n');

    out.push_str("## Task SDA against leave-one-out gold\n\n| Group | Stimuli | SDA values | SDA |\n|---|---|---|---|\n");
    for g in &report.groups {
        match &g.task {
            Some(t) => {
                let _ = writeln!(out, "| {} | {} | {} | {} |", g.name, t.stimuli, t.sda.n, ci(&t.sda));
            }
            None => {
                let _ = writeln!(out, "| {} | 0 | 0 | n/a |", g.name);
            }
        }
    }
    out.push('\n');

    if !report.comparisons.is_empty() {
        out.push_str("## Group comparisons\n\n| Groups | Test | t | df | p |\n|---|---|---|---|---|\n");
        for c in &report.comparisons {
            let kind = if c.paired { "paired" } else { "Welch" };
            match &c.test {
                Some(t) => {
                    let _ = writeln!(
                        out,
                        "| {} vs {} | {kind} | {:.3} | {:.1} | {:.4} |",
                        c.group_a, c.group_b, t.t, t.df, t.p
                    );
                }
                None => {
                    let _ = writeln!(out, "| {} vs {} | {kind} | n/a | n/a | n/a |", c.group_a, c.group_b);
                }
            }
        }
        out.push('\n');
    }

    out.push_str("## Annotators\n\n| Annotator | Group | Visual SDA | Auditory SDA | Mean QA SDA | QA label | Mean task SDA | Task label |\n|---|---|---|---|---|---|---|---|\n");
    for a in &report.annotators {
        let label = |l: Option<super::ReliabilityLabel>| l.map_or("n/a", |l| l.as_str());
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} | {} |",
            a.annotator_id,
            a.group,
            opt(a.qa.as_ref().map(|q| q.sda_visual)),
            opt(a.qa.as_ref().map(|q| q.sda_auditory)),
            opt(a.qa.as_ref().map(|q| q.mean_qa_sda)),
            label(a.qa_label),
            opt(a.mean_task_sda),
            label(a.task_label),
        );
    }
    out.push('\n');

    if let Some(c) = &report.confusion {
        let m = &c.matrix;
        out.push_str("## QA prediction vs task reliability\n\n| | Task reliable | Task unreliable |\n|---|---|---|\n");
        let _ = writeln!(out, "| QA reliable | {} (TP) | {} (FP) |", m.true_positive, m.false_positive);
        let _ = writeln!(out, "| QA unreliable | {} (FN) | {} (TN) |", m.false_negative, m.true_negative);
        let _ = writeln!(out, "\nAccuracy: {}/{} = {:.3}\n", m.correct(), m.total(), c.accuracy);
    }

    if !report.warnings.is_empty() {
        out.push_str("## Warnings\n\n");
        for w in &report.warnings {
            let _ = writeln!(out, "- {w}");
        }
    }
    out
}

/// Scatter data of QA SDA against task SDA: `qa_sda,task_sda,annotator_id,group`.
pub fn scatter_csv(report: &ReliabilityReport) -> String {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["qa_sda", "task_sda", "annotator_id", "group"])
        .expect("writing to a Vec");
    for a in &report.annotators {
        if let (Some(qa), Some(task)) = (&a.qa, a.mean_task_sda) {
            wtr.write_record([
                qa.mean_qa_sda.to_string(),
                task.to_string(),
                a.annotator_id.clone(),
                a.group.clone(),
            ])
            .expect("writing to a Vec");
        }
    }
    String::from_utf8(wtr.into_inner().expect("flush")).expect("UTF-8")
}
