//! Rendering of results as aligned text tables, CSV or JSON.
//!
//! Output is a pure function of the input value. Flow and score columns use
//! six decimals.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::electre::OutrankingRelationTable;
use crate::error::Error;
use crate::ga::{GaReport, GenerationStats};
use crate::objectives::PortfolioEvaluation;
use crate::promethee::{Flow, FlowTable, PartialPreorder, PrometheeOutcome, RankedOrder};
use crate::screening::ScreeningReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::file("--format", format!("unknown format `{other}`"))),
        }
    }
}

pub trait Report {
    fn columns(&self) -> Vec<&'static str>;
    fn records(&self) -> Vec<Vec<String>>;
    fn json_value(&self) -> serde_json::Value;

    fn table(&self) -> String {
        render_table(&self.columns(), &self.records())
    }

    fn csv(&self) -> String {
        render_csv(&self.columns(), &self.records())
    }

    fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json_value()).expect("serializable report");
        s.push('\n');
        s
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.table(),
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }
}

fn to_json<T: Serialize + ?Sized>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable report")
}

/// Six decimals, without a sign on values that round to zero.
pub fn fmt6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

pub fn render_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| {
        let mut out = String::new();
        for (i, (cell, w)) in cells.zip(&widths).enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            if i == 0 {
                let _ = write!(out, "{cell:<w$}");
            } else {
                let _ = write!(out, "{cell:>w$}");
            }
        }
        out.truncate(out.trim_end().len());
        out.push('\n');
        out
    };
    let mut out = line(&mut headers.iter().copied());
    let total = widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1);
    out.push_str(&"-".repeat(total));
    out.push('\n');
    for row in rows {
        out.push_str(&line(&mut row.iter().map(String::as_str)));
    }
    out
}

pub fn render_csv(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(vec![]);
    w.write_record(headers).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
}

impl Report for FlowTable {
    fn columns(&self) -> Vec<&'static str> {
        vec!["alternative", "phi_plus", "phi_minus", "phi_net"]
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.rows()
            .iter()
            .map(|f| vec![f.id.clone(), fmt6(f.phi_plus), fmt6(f.phi_minus), fmt6(f.phi_net)])
            .collect()
    }

    fn json_value(&self) -> serde_json::Value {
        to_json(self.rows())
    }
}

/// Flows and PROMETHEE II rank per alternative, in input order.
impl Report for PrometheeOutcome {
    fn columns(&self) -> Vec<&'static str> {
        vec!["alternative", "phi_plus", "phi_minus", "phi_net", "rank"]
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.flows
            .rows()
            .iter()
            .map(|f| {
                let rank = self.ranking.rank_of(&f.id).expect("every flow is ranked");
                vec![
                    f.id.clone(),
                    fmt6(f.phi_plus),
                    fmt6(f.phi_minus),
                    fmt6(f.phi_net),
                    rank.to_string(),
                ]
            })
            .collect()
    }

    fn json_value(&self) -> serde_json::Value {
        to_json(self)
    }
}

impl Report for RankedOrder {
    fn columns(&self) -> Vec<&'static str> {
        vec!["rank", "alternative", "score"]
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.entries()
            .iter()
            .map(|e| vec![e.rank.to_string(), e.id.clone(), fmt6(e.score)])
            .collect()
    }

    fn json_value(&self) -> serde_json::Value {
        to_json(self.entries())
    }
}

/// One row per ordered pair.
impl Report for PartialPreorder {
    fn columns(&self) -> Vec<&'static str> {
        vec!["first", "second", "relation"]
    }

    fn records(&self) -> Vec<Vec<String>> {
        let ids = self.ids();
        let mut rows = Vec::new();
        for a in 0..ids.len() {
            for b in 0..ids.len() {
                if a != b {
                    rows.push(vec![ids[a].clone(), ids[b].clone(), self.get(a, b).as_str().to_string()]);
                }
            }
        }
        rows
    }

    fn json_value(&self) -> serde_json::Value {
        to_json(
            &self
                .records()
                .into_iter()
                .map(|r| serde_json::json!({ "first": r[0], "second": r[1], "relation": r[2] }))
                .collect::<Vec<_>>(),
        )
    }
}

impl Report for OutrankingRelationTable {
    fn columns(&self) -> Vec<&'static str> {
        vec![
            "first",
            "second",
            "c_first_second",
            "c_second_first",
            "d_first_second",
            "d_second_first",
            "relation",
        ]
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.pairs()
            .iter()
            .map(|p| {
                vec![
                    p.first.clone(),
                    p.second.clone(),
                    fmt6(p.concordance_fs),
                    fmt6(p.concordance_sf),
                    fmt6(p.discordance_fs),
                    fmt6(p.discordance_sf),
                    p.relation.as_str().to_string(),
                ]
            })
            .collect()
    }

    fn json_value(&self) -> serde_json::Value {
        to_json(self)
    }
}

/// One row per violation; feasible alternatives get a single row with empty
/// violation fields.
impl Report for ScreeningReport {
    fn columns(&self) -> Vec<&'static str> {
        vec!["alternative", "feasible", "criterion", "observed", "condition", "gap"]
    }

    fn records(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        for r in self.rows() {
            if r.feasible() {
                rows.push(vec![r.alternative.clone(), "true".into(), String::new(), String::new(), String::new(), String::new()]);
            }
            for v in &r.violations {
                rows.push(vec![
                    r.alternative.clone(),
                    "false".into(),
                    v.criterion.clone(),
                    v.observed.to_string(),
                    v.condition.to_string(),
                    fmt6(v.gap),
                ]);
            }
        }
        rows
    }

    fn json_value(&self) -> serde_json::Value {
        to_json(
            &self
                .rows()
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "alternative": r.alternative,
                        "feasible": r.feasible(),
                        "violations": r.violations.iter().map(|v| serde_json::json!({
                            "criterion": v.criterion,
                            "observed": v.observed,
                            "condition": v.condition.to_string(),
                            "gap": v.gap,
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect::<Vec<_>>(),
        )
    }
}

/// Per-generation best and mean fitness.
pub struct HistoryReport<'a>(pub &'a [GenerationStats]);

impl Report for HistoryReport<'_> {
    fn columns(&self) -> Vec<&'static str> {
        vec!["generation", "best", "mean"]
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.0
            .iter()
            .map(|g| vec![g.generation.to_string(), fmt6(g.best), fmt6(g.mean)])
            .collect()
    }

    fn json_value(&self) -> serde_json::Value {
        to_json(self.0)
    }
}

/// CSV is long-form: `section,label,value,detail`.
impl Report for GaReport {
    fn columns(&self) -> Vec<&'static str> {
        vec!["section", "label", "value", "detail"]
    }

    fn records(&self) -> Vec<Vec<String>> {
        let row = |s: &str, l: String, v: String, d: String| vec![s.to_string(), l, v, d];
        let mut rows = vec![
            row("summary", "best_fitness".into(), fmt6(self.best_fitness), String::new()),
            row("summary", "cache_hits".into(), self.cache_stats.hits.to_string(), String::new()),
            row("summary", "cache_misses".into(), self.cache_stats.misses.to_string(), String::new()),
        ];
        rows.extend(
            self.best_profile
                .iter()
                .map(|p| row("profile", p.criterion.clone(), fmt6(p.value), String::new())),
        );
        rows.extend(
            self.history
                .iter()
                .map(|g| row("history", g.generation.to_string(), fmt6(g.best), fmt6(g.mean))),
        );
        rows.extend(
            self.final_ranking
                .entries()
                .iter()
                .map(|e| row("ranking", e.id.clone(), fmt6(e.score), e.rank.to_string())),
        );
        rows
    }

    fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "best fitness: {}", fmt6(self.best_fitness));
        let _ = writeln!(
            out,
            "cache: {} hits, {} misses",
            self.cache_stats.hits, self.cache_stats.misses
        );
        out.push('\n');
        let profile: Vec<Vec<String>> = self
            .best_profile
            .iter()
            .map(|p| vec![p.criterion.clone(), fmt6(p.value)])
            .collect();
        out.push_str(&render_table(&["criterion", "best_profile"], &profile));
        out.push('\n');
        out.push_str(&self.final_ranking.table());
        out.push('\n');
        out.push_str(&HistoryReport(&self.history).table());
        out
    }

    fn json_value(&self) -> serde_json::Value {
        to_json(self)
    }
}

impl Report for PortfolioEvaluation {
    fn columns(&self) -> Vec<&'static str> {
        vec!["quantity", "value"]
    }

    fn records(&self) -> Vec<Vec<String>> {
        let mut rows = vec![
            vec!["expected_return".into(), fmt6(self.expected_return)],
            vec!["variance".into(), fmt6(self.variance)],
            vec!["return_shortfall".into(), fmt6(self.return_shortfall)],
            vec!["variance_excess".into(), fmt6(self.variance_excess)],
            vec!["penalized_score".into(), fmt6(self.penalized_score)],
        ];
        rows.extend(
            self.weight_violations
                .iter()
                .map(|v| vec!["violation".into(), v.to_string()]),
        );
        rows
    }

    fn json_value(&self) -> serde_json::Value {
        to_json(self)
    }
}

/// Rows whose computed φ⁺ differs from the published value by more than
/// `tolerance`, with deltas (computed minus published) for all three flows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowDeltaReport {
    rows: Vec<(Flow, Flow)>,
}

impl FlowDeltaReport {
    pub fn new(computed: &FlowTable, published: &FlowTable, tolerance: f64) -> Self {
        let rows = computed
            .rows()
            .iter()
            .filter_map(|c| {
                let p = published.get(&c.id)?;
                ((c.phi_plus - p.phi_plus).abs() > tolerance).then(|| (p.clone(), c.clone()))
            })
            .collect();
        FlowDeltaReport { rows }
    }

    pub fn ids(&self) -> Vec<&str> {
        self.rows.iter().map(|(p, _)| p.id.as_str()).collect()
    }
}

impl Report for FlowDeltaReport {
    fn columns(&self) -> Vec<&'static str> {
        vec![
            "alternative",
            "published_phi_plus",
            "computed_phi_plus",
            "delta_phi_plus",
            "published_phi_minus",
            "computed_phi_minus",
            "delta_phi_minus",
            "published_phi_net",
            "computed_phi_net",
            "delta_phi_net",
        ]
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|(p, c)| {
                vec![
                    p.id.clone(),
                    fmt6(p.phi_plus),
                    fmt6(c.phi_plus),
                    fmt6(c.phi_plus - p.phi_plus),
                    fmt6(p.phi_minus),
                    fmt6(c.phi_minus),
                    fmt6(c.phi_minus - p.phi_minus),
                    fmt6(p.phi_net),
                    fmt6(c.phi_net),
                    fmt6(c.phi_net - p.phi_net),
                ]
            })
            .collect()
    }

    fn json_value(&self) -> serde_json::Value {
        to_json(self)
    }
}
