//! CSV datasets and atomic file output.
//!
//! Each table renders as plain CSV preceded by `#`-prefixed comment lines
//! that carry the effective configuration of the command that produced it.

use std::fmt::Display;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiment::{EnsembleSummary, FactsReport, InequalityPoint, RunResult, WcGrid};
use crate::network::PerceptionGraph;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

fn cells<const N: usize>(values: [&dyn Display; N]) -> Vec<String> {
    values.iter().map(|v| v.to_string()).collect()
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Values of a numeric column; unparsable cells become NaN.
    pub fn numeric_column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.column(name)?;
        Some(
            self.rows
                .iter()
                .map(|r| r[idx].parse().unwrap_or(f64::NAN))
                .collect(),
        )
    }

    /// CSV text with each `comments` entry written first as a `# ` line.
    pub fn render(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            writer.write_record(row).expect("in-memory write");
        }
        let bytes = writer.into_inner().expect("in-memory flush");
        out.push_str(std::str::from_utf8(&bytes).expect("utf-8 fields"));
        out
    }

    /// Parses text produced by [`Table::render`], returning the comment lines too.
    pub fn parse(text: &str) -> Result<(Vec<String>, Table)> {
        let comments: Vec<String> = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .map(|l| l.trim_start_matches('#').trim_start().to_string())
            .collect();
        let body: String = text
            .lines()
            .skip(comments.len())
            .flat_map(|l| [l, "\n"])
            .collect();
        let mut reader = csv::Reader::from_reader(body.as_bytes());
        let bad = |e: csv::Error| Error::invalid("csv", e.to_string());
        let header = reader
            .headers()
            .map_err(bad)?
            .iter()
            .map(str::to_string)
            .collect();
        let rows = reader
            .records()
            .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<std::result::Result<_, _>>()
            .map_err(bad)?;
        Ok((comments, Table { header, rows }))
    }
}

/// Writes `contents` to `path` through a temporary file in the same directory,
/// so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn agents_table(result: &RunResult) -> Table {
    let mut t = Table::new(&[
        "agent",
        "income",
        "decile",
        "consumption",
        "apc",
        "perception_gap",
    ]);
    for (i, a) in result.agents.iter().enumerate() {
        t.push(cells([
            &i,
            &a.income,
            &a.decile,
            &a.consumption,
            &a.apc,
            &a.perception_gap,
        ]));
    }
    t
}

pub fn run_summary_table(result: &RunResult) -> Table {
    let mut t = Table::new(&["statistic", "value"]);
    let mut add = |name: &str, value: f64| t.push(vec![name.to_string(), value.to_string()]);
    add("income_mean", result.income_summary.mean);
    add("income_gini", result.income_summary.gini);
    add("income_cov", result.income_summary.coefficient_of_variation);
    add("expenditure_mean", result.expenditure_summary.mean);
    add("expenditure_gini", result.expenditure_summary.gini);
    add(
        "expenditure_cov",
        result.expenditure_summary.coefficient_of_variation,
    );
    add("cov_ratio", result.cov_ratio);
    add("saving_rate", result.saving_rate);
    add("aggregate_apc", result.aggregate_apc);
    add("mean_perception_gap", result.mean_perception_gap);
    add("iterations", result.iterations as f64);
    if let Some(ks) = &result.lognormality {
        add("lognormal_mu_hat", ks.fit.mu);
        add("lognormal_sigma_hat", ks.fit.sigma);
        add("ks_statistic", ks.ks_statistic);
        add("ks_critical_value", ks.critical_value);
        add("ks_reject", if ks.reject { 1.0 } else { 0.0 });
    }
    for (d, apc) in result.decile_apc.iter().enumerate() {
        add(&format!("decile_apc_{}", d + 1), *apc);
    }
    t
}

pub fn ensemble_table(summary: &EnsembleSummary) -> Table {
    let mut t = Table::new(&["statistic", "mean", "sd", "min", "max"]);
    t.push(cells([
        &"runs",
        &summary.runs,
        &0,
        &summary.runs,
        &summary.runs,
    ]));
    for (name, s) in summary.statistics() {
        t.push(cells([&name, &s.mean, &s.sd, &s.min, &s.max]));
    }
    let f = summary.ks_nonreject_fraction;
    t.push(cells([&"ks_nonreject_fraction", &f, &0, &f, &f]));
    t
}

/// One decile-APC schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecileSchedule {
    pub w: f64,
    pub c: f64,
    pub rho: f64,
    pub apc: [f64; 10],
}

pub fn decile_apc_table(schedules: &[DecileSchedule]) -> Table {
    let mut t = Table::new(&["decile", "apc", "w", "c", "rho"]);
    for s in schedules {
        for (d, apc) in s.apc.iter().enumerate() {
            t.push(cells([&(d + 1), apc, &s.w, &s.c, &s.rho]));
        }
    }
    t
}

pub fn cov_ratio_table(grids: &[WcGrid]) -> Table {
    let mut t = Table::new(&["w", "c", "rho", "cov_ratio_mean", "cov_ratio_sd"]);
    for g in grids {
        for cell in &g.cells {
            let s = &cell.summary.cov_ratio;
            t.push(cells([&cell.w, &cell.c, &g.rho, &s.mean, &s.sd]));
        }
    }
    t
}

pub fn lognormality_table(grids: &[WcGrid]) -> Table {
    let mut t = Table::new(&["w", "c", "rho", "nonreject_fraction"]);
    for g in grids {
        for cell in &g.cells {
            t.push(cells([
                &cell.w,
                &cell.c,
                &g.rho,
                &cell.summary.ks_nonreject_fraction,
            ]));
        }
    }
    t
}

pub fn density_table(result: &RunResult) -> Table {
    let mut t = Table::new(&["variable", "value"]);
    for a in &result.agents {
        t.push(cells([&"income", &a.income]));
    }
    for a in &result.agents {
        t.push(cells([&"expenditure", &a.consumption]));
    }
    t
}

pub fn savings_gini_table(points: &[InequalityPoint]) -> Table {
    let mut t = Table::new(&[
        "rho",
        "sigma",
        "gini_mean",
        "saving_rate_mean",
        "saving_rate_sd",
        "gini_theoretical",
    ]);
    for p in points {
        t.push(cells([
            &p.rho,
            &p.sigma,
            &p.gini_mean,
            &p.saving_rate_mean,
            &p.saving_rate_sd,
            &p.gini_theoretical,
        ]));
    }
    t
}

pub fn facts_table(report: &FactsReport) -> Table {
    let mut t = Table::new(&["fact", "name", "status", "measured", "criterion"]);
    for f in &report.facts {
        t.push(cells([
            &f.id,
            &f.name,
            &f.status.as_str(),
            &f.measured,
            &f.criterion,
        ]));
    }
    t
}

pub fn graph_table(graph: &PerceptionGraph) -> Table {
    let mut t = Table::new(&["source", "target", "draw_index"]);
    for (i, links) in graph.iter() {
        for (d, j) in links.iter().enumerate() {
            t.push(cells([&i, j, &d]));
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_and_parse() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), "x, \"quoted\"".into()]);
        let text = t.render(&["config: {}".into()]);
        assert!(text.starts_with("# config: {}\na,b\n"));
        let (comments, back) = Table::parse(&text).unwrap();
        assert_eq!(comments, vec!["config: {}".to_string()]);
        assert_eq!(back, t);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/out.csv");
        write_atomic(&path, b"first").unwrap();
        write_atomic(&path, b"second").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"second");
        let leftovers = std::fs::read_dir(path.parent().unwrap()).unwrap().count();
        assert_eq!(leftovers, 1);
    }
}

/// SVG renderings computed from the same tables that are written as CSV.
pub mod charts {
    use super::Table;
    use crate::svg::{heatmap, histogram, line_chart, Series};

    fn col(table: &Table, name: &str) -> Vec<f64> {
        table
            .numeric_column(name)
            .unwrap_or_else(|| panic!("table has no `{name}` column"))
    }

    /// Groups rows by the value of `key` columns, keeping first-seen order.
    fn group_rows(table: &Table, keys: &[&str]) -> Vec<(Vec<String>, Vec<usize>)> {
        let idx: Vec<usize> = keys
            .iter()
            .map(|k| table.column(k).expect("key column"))
            .collect();
        let mut groups: Vec<(Vec<String>, Vec<usize>)> = Vec::new();
        for (r, row) in table.rows.iter().enumerate() {
            let key: Vec<String> = idx.iter().map(|&i| row[i].clone()).collect();
            match groups.iter_mut().find(|(k, _)| *k == key) {
                Some((_, rows)) => rows.push(r),
                None => groups.push((key, vec![r])),
            }
        }
        groups
    }

    pub fn decile_apc(table: &Table) -> String {
        let (decile, apc) = (col(table, "decile"), col(table, "apc"));
        let series: Vec<Series> = group_rows(table, &["w", "c", "rho"])
            .into_iter()
            .map(|(key, rows)| Series {
                label: format!("w={} c={} rho={}", key[0], key[1], key[2]),
                points: rows.iter().map(|&r| (decile[r], apc[r])).collect(),
            })
            .collect();
        line_chart("APC per income decile", "income decile", "APC", &series)
    }

    /// Heatmap of `value` over the `(w, c)` grid for one `rho`.
    pub fn wc_heatmap(table: &Table, value: &str, rho: &str, title: &str) -> String {
        let (w, c, v) = (col(table, "w"), col(table, "c"), col(table, value));
        let rho_idx = table.column("rho").expect("rho column");
        let rows: Vec<usize> = (0..table.rows.len())
            .filter(|&r| table.rows[r][rho_idx] == rho)
            .collect();
        let mut ws: Vec<f64> = rows.iter().map(|&r| w[r]).collect();
        let mut cs: Vec<f64> = rows.iter().map(|&r| c[r]).collect();
        for axis in [&mut ws, &mut cs] {
            axis.sort_by(f64::total_cmp);
            axis.dedup();
        }
        let mut grid = vec![vec![f64::NAN; cs.len()]; ws.len()];
        for &r in &rows {
            let wi = ws.iter().position(|&x| x == w[r]).expect("w on axis");
            let ci = cs.iter().position(|&x| x == c[r]).expect("c on axis");
            grid[wi][ci] = v[r];
        }
        let (lo, hi) = rows
            .iter()
            .map(|&r| v[r])
            .filter(|x| x.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
                (a.min(x), b.max(x))
            });
        let range = if lo.is_finite() {
            (lo.min(0.0), hi.max(1.0))
        } else {
            (0.0, 1.0)
        };
        heatmap(
            &format!("{title} (rho = {rho})"),
            "c",
            "w",
            &cs,
            &ws,
            &grid,
            range,
        )
    }

    pub fn density(table: &Table) -> String {
        let var = table.column("variable").expect("variable column");
        let value = col(table, "value");
        let samples: Vec<(String, Vec<f64>)> = group_rows(table, &["variable"])
            .into_iter()
            .map(|(key, rows)| (key[0].clone(), rows.iter().map(|&r| value[r]).collect()))
            .collect();
        let _ = var;
        histogram("Empirical densities", "value", &samples, 50)
    }

    pub fn savings_gini(table: &Table) -> String {
        let (gini, saving) = (col(table, "gini_mean"), col(table, "saving_rate_mean"));
        let series: Vec<Series> = group_rows(table, &["rho"])
            .into_iter()
            .map(|(key, rows)| Series {
                label: format!("rho={}", key[0]),
                points: rows.iter().map(|&r| (gini[r], saving[r])).collect(),
            })
            .collect();
        line_chart(
            "Aggregate saving rate against income Gini",
            "Gini coefficient",
            "saving rate",
            &series,
        )
    }
}
