//! Report rendering: aligned-text tables for humans, CSV for machines,
//! and PR-curve SVG overlays.

use std::fmt::Write as _;
use std::path::Path;

use crate::stats::TestResult;

use super::compare::{BestTable, ComparisonReport, TauTable, TestTable};
use super::HarnessError;

/// p-value with the tables' conventions: `<.001***`, `0.011*`, `0.231`.
pub fn format_p(result: &TestResult) -> String {
    if result.p_value < 0.001 {
        "<.001***".to_string()
    } else {
        format!("{:.3}{}", result.p_value, result.stars)
    }
}

fn format_test_cell(cell: &Option<TestResult>) -> (String, String) {
    match cell {
        None => ("---".to_string(), "---".to_string()),
        Some(r) => (format_p(r), r.winner.clone().unwrap_or_else(|| "---".to_string())),
    }
}

fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut widths = vec![0usize; cols];
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    for (idx, row) in rows.iter().enumerate() {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(i, cell)| format!("{:width$}", cell, width = widths[i]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
        if idx == 0 {
            let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
            out.push_str(&rule.join("  "));
            out.push('\n');
        }
    }
    out
}

pub fn render_test_table(table: &TestTable) -> String {
    let mut rows = Vec::new();
    let mut header = vec![table.group_header.to_string(), table.row_header.to_string()];
    for col in &table.columns {
        header.push(format!("{col} p"));
        header.push(format!("{col} winner"));
    }
    rows.push(header);
    for row in &table.rows {
        let mut line = vec![row.group.clone(), row.label.clone()];
        for cell in &row.cells {
            let (p, winner) = format_test_cell(cell);
            line.push(p);
            line.push(winner);
        }
        rows.push(line);
    }
    format!("# {}\n\n{}", table.title, aligned(&rows))
}

pub fn render_tau_table(table: &TauTable) -> String {
    let mut rows = Vec::new();
    let mut header = vec![table.group_header.to_string(), table.row_header.to_string()];
    header.extend(table.columns.iter().cloned());
    rows.push(header);
    for row in &table.rows {
        let mut line = vec![row.group.clone(), row.label.clone()];
        for cell in &row.cells {
            line.push(match cell {
                None => "---".to_string(),
                Some(tau) => format!("{tau:.3}"),
            });
        }
        rows.push(line);
    }
    format!("# {}\n\n{}", table.title, aligned(&rows))
}

pub fn render_best_table(table: &BestTable) -> String {
    let mut rows = Vec::new();
    let mut header = vec!["setting / dataset".to_string(), "method type".to_string()];
    for col in &table.columns {
        header.push(format!("{col} method"));
        header.push(format!("{col} value"));
    }
    rows.push(header);
    for row in &table.rows {
        let mut line = vec![row.group.clone(), row.label.clone()];
        for cell in &row.cells {
            match cell {
                None => {
                    line.push("---".to_string());
                    line.push("---".to_string());
                }
                Some((method, value)) => {
                    line.push(method.clone());
                    line.push(format!("{value:.3}"));
                }
            }
        }
        rows.push(line);
    }
    format!("# {}\n\n{}", table.title, aligned(&rows))
}

pub fn test_table_csv(table: &TestTable) -> String {
    let mut out = String::new();
    write!(out, "{},{}", table.group_header, table.row_header).unwrap();
    for col in &table.columns {
        write!(out, ",{col} p,{col} winner").unwrap();
    }
    out.push('\n');
    for row in &table.rows {
        write!(out, "{},{}", row.group, row.label).unwrap();
        for cell in &row.cells {
            match cell {
                None => out.push_str(",---,---"),
                Some(r) => {
                    write!(out, ",{}", r.p_value).unwrap();
                    write!(out, ",{}", r.winner.as_deref().unwrap_or("---")).unwrap();
                }
            }
        }
        out.push('\n');
    }
    out
}

pub fn tau_table_csv(table: &TauTable) -> String {
    let mut out = String::new();
    write!(out, "{},{}", table.group_header, table.row_header).unwrap();
    for col in &table.columns {
        write!(out, ",{col}").unwrap();
    }
    out.push('\n');
    for row in &table.rows {
        write!(out, "{},{}", row.group, row.label).unwrap();
        for cell in &row.cells {
            match cell {
                None => out.push_str(",---"),
                Some(tau) => write!(out, ",{tau}").unwrap(),
            }
        }
        out.push('\n');
    }
    out
}

pub fn best_table_csv(table: &BestTable) -> String {
    let mut out = String::from("setting / dataset,method type");
    for col in &table.columns {
        write!(out, ",{col} method,{col} value").unwrap();
    }
    out.push('\n');
    for row in &table.rows {
        write!(out, "{},{}", row.group, row.label).unwrap();
        for cell in &row.cells {
            match cell {
                None => out.push_str(",---,---"),
                Some((method, value)) => write!(out, ",{method},{value}").unwrap(),
            }
        }
        out.push('\n');
    }
    out
}

/// Writes every comparison table under `dir`, as text and CSV.
pub fn write_reports(report: &ComparisonReport, dir: &Path) -> Result<Vec<std::path::PathBuf>, HarnessError> {
    let mut written = Vec::new();
    let mut save = |name: &str, text: String, csv: String| -> Result<(), HarnessError> {
        for (ext, content) in [("txt", text), ("csv", csv)] {
            let path = dir.join(format!("{name}.{ext}"));
            std::fs::write(&path, content)
                .map_err(|e| HarnessError::Store(format!("{}: {e}", path.display())))?;
            written.push(path);
        }
        Ok(())
    };
    save(
        "future_vs_missing_ttest",
        render_test_table(&report.future_vs_missing_t),
        test_table_csv(&report.future_vs_missing_t),
    )?;
    save(
        "future_vs_missing_tau",
        render_tau_table(&report.future_vs_missing_tau),
        tau_table_csv(&report.future_vs_missing_tau),
    )?;
    save("hops_ttest", render_test_table(&report.hops_t), test_table_csv(&report.hops_t))?;
    save("hops_tau", render_tau_table(&report.hops_tau), tau_table_csv(&report.hops_tau))?;
    save("groups_anova", render_test_table(&report.groups_anova), test_table_csv(&report.groups_anova))?;
    save("groups_tukey", render_test_table(&report.groups_tukey), test_table_csv(&report.groups_tukey))?;
    save(
        "groups_three_hop_ttest",
        render_test_table(&report.groups_three_hop_t),
        test_table_csv(&report.groups_three_hop_t),
    )?;
    save(
        "network_type_ttest",
        render_test_table(&report.network_type_t),
        test_table_csv(&report.network_type_t),
    )?;
    save("best_per_group", render_best_table(&report.best_per_group), best_table_csv(&report.best_per_group))?;
    save("imbalance_tau", render_tau_table(&report.imbalance_tau), tau_table_csv(&report.imbalance_tau))?;
    save(
        "early_retrieval_tau",
        render_tau_table(&report.early_retrieval_tau),
        tau_table_csv(&report.early_retrieval_tau),
    )?;
    Ok(written)
}

const SVG_COLORS: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

/// Overlaid precision-recall curves with a method legend.
pub fn render_pr_svg(title: &str, curves: &[(String, Vec<(f64, f64)>)]) -> String {
    let (width, height) = (640.0, 480.0);
    let (left, top, right, bottom) = (60.0, 40.0, 200.0, 50.0);
    let plot_w = width - left - right;
    let plot_h = height - top - bottom;
    let x = |recall: f64| left + recall * plot_w;
    let y = |precision: f64| top + (1.0 - precision) * plot_h;

    let mut svg = String::new();
    write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )
    .unwrap();
    write!(svg, r#"<rect width="{width}" height="{height}" fill="white"/>"#).unwrap();
    write!(
        svg,
        r#"<text x="{}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{title}</text>"#,
        left + plot_w / 2.0
    )
    .unwrap();
    // axes
    write!(
        svg,
        r#"<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    )
    .unwrap();
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        write!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="middle">{f:.2}</text>"#,
            x(f),
            height - bottom + 15.0
        )
        .unwrap();
        write!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="end">{f:.2}</text>"#,
            left - 5.0,
            y(f) + 3.0
        )
        .unwrap();
    }
    write!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">recall</text>"#,
        left + plot_w / 2.0,
        height - 10.0
    )
    .unwrap();
    write!(
        svg,
        r#"<text x="15" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 15 {})">precision</text>"#,
        top + plot_h / 2.0,
        top + plot_h / 2.0
    )
    .unwrap();

    for (i, (name, curve)) in curves.iter().enumerate() {
        let color = SVG_COLORS[i % SVG_COLORS.len()];
        let points: Vec<String> = curve.iter().map(|&(r, p)| format!("{:.2},{:.2}", x(r), y(p))).collect();
        write!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            points.join(" ")
        )
        .unwrap();
        let ly = top + 16.0 * i as f64 + 10.0;
        write!(
            svg,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            width - right + 10.0,
            width - right + 30.0
        )
        .unwrap();
        write!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11">{name}</text>"#,
            width - right + 35.0,
            ly + 4.0
        )
        .unwrap();
    }
    svg.push_str("</svg>");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::compare::TestRow;
    use crate::stats::stars;

    fn result(p: f64, winner: Option<&str>) -> TestResult {
        TestResult { statistic: 1.0, p_value: p, winner: winner.map(str::to_string), stars: stars(p) }
    }

    #[test]
    fn p_formatting_follows_the_table_conventions() {
        assert_eq!(format_p(&result(0.0005, Some("future"))), "<.001***");
        assert_eq!(format_p(&result(0.011, Some("future"))), "0.011*");
        assert_eq!(format_p(&result(0.003, Some("future"))), "0.003**");
        assert_eq!(format_p(&result(0.231, None)), "0.231");
    }

    #[test]
    fn test_table_renders_dashes_and_winners() {
        let table = TestTable {
            title: "demo".into(),
            group_header: "hop",
            row_header: "dataset",
            columns: vec!["AUROC".into()],
            rows: vec![
                TestRow { group: "two-hop".into(), label: "d1".into(), cells: vec![Some(result(0.0001, Some("future")))] },
                TestRow { group: "three-hop".into(), label: "d1".into(), cells: vec![None] },
            ],
        };
        let text = render_test_table(&table);
        assert!(text.contains("<.001***"));
        assert!(text.contains("future"));
        assert!(text.contains("---"));
        let csv = test_table_csv(&table);
        assert!(csv.lines().count() == 3);
        assert!(csv.contains(",---,---"));
    }

    #[test]
    fn svg_contains_curves_and_legend() {
        let curves = vec![
            ("PA".to_string(), vec![(0.0, 1.0), (0.5, 0.8), (1.0, 0.4)]),
            ("DW_L1_LR".to_string(), vec![(0.0, 0.9), (1.0, 0.3)]),
        ];
        let svg = render_pr_svg("email two-hop imbalanced", &curves);
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>"));
        assert!(svg.contains("polyline"));
        assert!(svg.contains("PA"));
        assert!(svg.contains("DW_L1_LR"));
        assert!(svg.contains("recall"));
    }
}
