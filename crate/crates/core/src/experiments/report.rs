use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{csv_writer, invalid, Regime, ResultRow};
use crate::error::{Error, Result};

/// Aggregates of one `(family, n, strategy, param, regime, magnitude)` group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub family: String,
    pub n: usize,
    pub strategy: String,
    pub param: Option<f64>,
    pub regime: Regime,
    pub magnitude: f64,
    /// Rows that ran to completion.
    pub runs: usize,
    pub failures: usize,
    pub mean_alg_minus_opt: f64,
    pub std_alg_minus_opt: f64,
    pub mean_ratio: f64,
    pub std_ratio: f64,
    /// `100 * alg / (opt + E1^- + n Einf^+)`, the cost as a share of the
    /// greedy guarantee.
    pub mean_pct_of_bound: f64,
    pub std_pct_of_bound: f64,
    pub bound_violations: usize,
}

const SUMMARY_COLUMNS: [&str; 15] = [
    "family",
    "n",
    "strategy",
    "param",
    "regime",
    "magnitude",
    "runs",
    "failures",
    "mean_alg_minus_opt",
    "std_alg_minus_opt",
    "mean_ratio",
    "std_ratio",
    "mean_pct_of_bound",
    "std_pct_of_bound",
    "bound_violations",
];

/// Mean and sample standard deviation; zero spread for fewer than two
/// values and NaN for none.
pub(crate) fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn pct_of_greedy_bound(r: &ResultRow) -> Option<f64> {
    let bound = r.opt? + r.e1_minus? + r.n as f64 * r.einf_plus?;
    Some(100.0 * r.alg? / bound)
}

/// Groups rows in order of first appearance and aggregates each group.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    type Key = (String, usize, String, Option<u64>, Regime, u64);
    let mut order: Vec<Key> = Vec::new();
    let mut groups: HashMap<Key, Vec<&ResultRow>> = HashMap::new();
    for r in rows {
        let key = (
            r.family.clone(),
            r.n,
            r.strategy.clone(),
            r.param.map(f64::to_bits),
            r.regime,
            r.magnitude.to_bits(),
        );
        groups
            .entry(key.clone())
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(r);
    }
    order
        .iter()
        .map(|key| {
            let group = &groups[key];
            let ok: Vec<&&ResultRow> = group.iter().filter(|r| r.is_ok()).collect();
            let diff: Vec<f64> = ok.iter().filter_map(|r| r.alg_minus_opt).collect();
            let ratio: Vec<f64> = ok.iter().filter_map(|r| r.ratio).collect();
            let pct: Vec<f64> = ok.iter().filter_map(|r| pct_of_greedy_bound(r)).collect();
            let (mean_alg_minus_opt, std_alg_minus_opt) = mean_std(&diff);
            let (mean_ratio, std_ratio) = mean_std(&ratio);
            let (mean_pct_of_bound, std_pct_of_bound) = mean_std(&pct);
            let first = group[0];
            SummaryRow {
                family: first.family.clone(),
                n: first.n,
                strategy: first.strategy.clone(),
                param: first.param,
                regime: first.regime,
                magnitude: first.magnitude,
                runs: ok.len(),
                failures: group.len() - ok.len(),
                mean_alg_minus_opt,
                std_alg_minus_opt,
                mean_ratio,
                std_ratio,
                mean_pct_of_bound,
                std_pct_of_bound,
                bound_violations: group.iter().filter(|r| r.bound_satisfied == Some(false)).count(),
            }
        })
        .collect()
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(SUMMARY_COLUMNS)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Plot-data layouts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Figure {
    /// Greedy under absolute error: `x = E1`, `alg - opt` per family.
    Fig2Left,
    /// Relative error: `x = eps`, `alg / opt` per family and strategy.
    Fig2Right,
    /// Absolute error: `x = E1`, `(alg - opt) / opt` per family and
    /// strategy.
    Baseline,
    /// Relative error: `x = n`, `alg / opt` per family and strategy.
    NodeScaling,
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Figure::Fig2Left => "fig2_left",
            Figure::Fig2Right => "fig2_right",
            Figure::Baseline => "baseline",
            Figure::NodeScaling => "node_scaling",
        })
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2_left" => Ok(Figure::Fig2Left),
            "fig2_right" => Ok(Figure::Fig2Right),
            "baseline" => Ok(Figure::Baseline),
            "node_scaling" => Ok(Figure::NodeScaling),
            _ => Err(invalid("figure", format!("unknown figure {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub x: f64,
    pub mean: f64,
    pub std: f64,
    pub series: String,
}

/// Points of a figure, sorted by series and then `x`. Failed rows and rows
/// from other regimes are ignored.
pub fn emit_plotdata(rows: &[ResultRow], figure: Figure) -> Vec<PlotPoint> {
    let mut groups: HashMap<(String, u64), Vec<f64>> = HashMap::new();
    for r in rows.iter().filter(|r| r.is_ok()) {
        let (Some(alg), Some(opt)) = (r.alg, r.opt) else {
            continue;
        };
        let both = || format!("{}/{}", r.family, r.strategy);
        let point = match figure {
            Figure::Fig2Left if r.regime == Regime::Absolute && r.strategy == "greedy" => {
                Some((r.family.clone(), r.magnitude, alg - opt))
            }
            Figure::Fig2Right if r.regime == Regime::Relative => Some((both(), r.magnitude, alg / opt)),
            Figure::Baseline if r.regime == Regime::Absolute => Some((both(), r.magnitude, (alg - opt) / opt)),
            Figure::NodeScaling if r.regime == Regime::Relative => Some((both(), r.n as f64, alg / opt)),
            _ => None,
        };
        if let Some((series, x, y)) = point {
            groups.entry((series, x.to_bits())).or_default().push(y);
        }
    }
    let mut points: Vec<PlotPoint> = groups
        .into_iter()
        .map(|((series, x), ys)| {
            let (mean, std) = mean_std(&ys);
            PlotPoint {
                x: f64::from_bits(x),
                mean,
                std,
                series,
            }
        })
        .collect();
    points.sort_by(|a, b| a.series.cmp(&b.series).then(a.x.total_cmp(&b.x)));
    points
}

pub fn write_plotdata<W: Write>(points: &[PlotPoint], out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["x", "mean", "std", "series"])?;
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}
