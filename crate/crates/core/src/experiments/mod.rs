//! Parameter sweeps, summaries and verification suites.
//!
//! A sweep runs every configured strategy on `trials` random instances for
//! each cell `(family, n, magnitude)`. All strategies of one trial share the
//! same instance. Per-trial seeds are derived from the base seed and the
//! `(cell, trial)` indices alone, so output does not depend on scheduling.
//!
//! Experiments run in `f64`.

mod report;
mod verify;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{admissible_greedy_bound, beta_ratio_bound, greedy_bound, pruned_ratio_bound};
use crate::error::{Error, Result};
use crate::exploration::{run_astar_order, run_strategy, RunOptions, SearchInstance, SearchTrace, Strategy, DEFAULT_BETA};
use crate::graph::distances_to;
use crate::instances::{gen_family_with, random_endpoints, FamilyParams};
use crate::predictions::{absolute_error_with, admissible_error_with, relative_error_with, ErrorProfile};
use crate::scalar::le_tol;

pub use report::{emit_plotdata, summarize, write_plotdata, write_summary, Figure, PlotPoint, SummaryRow};
pub use verify::{verify_bounds, CheckReport, Counterexample, Suite, SuiteReport, VerifyOptions};

fn invalid(field: &str, message: impl Into<String>) -> Error {
    Error::Validation {
        field: field.into(),
        message: message.into(),
    }
}

fn one() -> u32 {
    1
}

fn half() -> f64 {
    0.5
}

fn er_p() -> f64 {
    0.1
}

fn default_beta() -> f64 {
    DEFAULT_BETA
}

/// Random graph family of a sweep; the vertex count comes from the cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    RandomTree {
        #[serde(default = "one")]
        max_weight: u32,
    },
    RandomLobster {
        #[serde(default = "half")]
        p1: f64,
        #[serde(default = "half")]
        p2: f64,
    },
    ErdosRenyi {
        #[serde(default = "er_p")]
        p: f64,
    },
    /// Uses `k = n / 2`, so `n` must be even and at least 6.
    CircularLadder,
}

impl Family {
    /// The four families of the desk-scale experiments with default
    /// parameters.
    pub fn standard() -> Vec<Family> {
        vec![
            Family::RandomTree { max_weight: 1 },
            Family::RandomLobster { p1: 0.5, p2: 0.5 },
            Family::ErdosRenyi { p: 0.1 },
            Family::CircularLadder,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::RandomTree { .. } => "random_tree",
            Family::RandomLobster { .. } => "random_lobster",
            Family::ErdosRenyi { .. } => "erdos_renyi",
            Family::CircularLadder => "circular_ladder",
        }
    }

    pub fn is_tree_family(&self) -> bool {
        matches!(self, Family::RandomTree { .. } | Family::RandomLobster { .. })
    }

    pub fn params(&self, n: usize) -> Result<FamilyParams> {
        Ok(match *self {
            Family::RandomTree { max_weight } => FamilyParams::RandomTree { n, max_weight },
            Family::RandomLobster { p1, p2 } => FamilyParams::RandomLobster { n, p1, p2 },
            Family::ErdosRenyi { p } => FamilyParams::ErdosRenyi { n, p },
            Family::CircularLadder => {
                if !n.is_multiple_of(2) || n < 6 {
                    return Err(invalid("n", format!("circular ladder needs an even n >= 6, got {n}")));
                }
                FamilyParams::CircularLadder { k: n / 2 }
            }
        })
    }
}

fn parse_args<const K: usize>(what: &str, args: &[&str]) -> Result<[Option<f64>; K]> {
    if args.len() > K {
        return Err(invalid(what, format!("at most {K} parameters allowed")));
    }
    let mut out = [None; K];
    for (slot, a) in out.iter_mut().zip(args) {
        *slot = Some(a.parse::<f64>().map_err(|e| invalid(what, format!("{a:?}: {e}")))?);
    }
    Ok(out)
}

/// `name[:param[:param]]`, e.g. `erdos_renyi:0.1` or `random_lobster:0.5:0.5`.
impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let name = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        Ok(match name {
            "random_tree" => {
                let [w] = parse_args::<1>("family", &args)?;
                let w = w.unwrap_or(1.0);
                if w < 1.0 || w.fract() != 0.0 {
                    return Err(invalid("family", format!("max weight {w} must be a positive integer")));
                }
                Family::RandomTree { max_weight: w as u32 }
            }
            "random_lobster" => {
                let [p1, p2] = parse_args::<2>("family", &args)?;
                Family::RandomLobster {
                    p1: p1.unwrap_or(0.5),
                    p2: p2.unwrap_or(0.5),
                }
            }
            "erdos_renyi" => {
                let [p] = parse_args::<1>("family", &args)?;
                Family::ErdosRenyi { p: p.unwrap_or(0.1) }
            }
            "circular_ladder" if args.is_empty() => Family::CircularLadder,
            _ => return Err(invalid("family", format!("unknown family {s:?}"))),
        })
    }
}

/// How predictions are perturbed. The cell magnitude is `E1` for the
/// absolute and admissible regimes and `eps` for the relative one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Absolute,
    Admissible,
    Relative,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Absolute => "absolute",
            Regime::Admissible => "admissible",
            Regime::Relative => "relative",
        })
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "absolute" => Ok(Regime::Absolute),
            "admissible" => Ok(Regime::Admissible),
            "relative" => Ok(Regime::Relative),
            _ => Err(invalid("regime", format!("unknown regime {s:?}"))),
        }
    }
}

/// Strategy as configured for a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepStrategy {
    Greedy,
    /// Without an explicit `eps` the cell's relative error is used, which
    /// requires the relative regime.
    Pruned {
        #[serde(default)]
        eps: Option<f64>,
    },
    BetaWeighted {
        #[serde(default = "default_beta")]
        beta: f64,
    },
    SmallestPrediction,
    /// Expansion order of A* with the predictions as heuristic, walked as a
    /// tour.
    Astar,
}

impl SweepStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            SweepStrategy::Greedy => "greedy",
            SweepStrategy::Pruned { .. } => "pruned",
            SweepStrategy::BetaWeighted { .. } => "beta_weighted",
            SweepStrategy::SmallestPrediction => "smallest_prediction",
            SweepStrategy::Astar => "astar",
        }
    }

    /// Pruning parameter or beta actually used in a cell.
    fn param(&self, regime: Regime, magnitude: f64) -> Option<f64> {
        match *self {
            SweepStrategy::Pruned { eps: Some(e) } => Some(e),
            SweepStrategy::Pruned { eps: None } if regime == Regime::Relative => Some(magnitude),
            SweepStrategy::BetaWeighted { beta } => Some(beta),
            _ => None,
        }
    }

    fn run(&self, inst: &SearchInstance<f64>, param: Option<f64>) -> Result<SearchTrace<f64>> {
        let strategy = match *self {
            SweepStrategy::Greedy => Strategy::Greedy,
            SweepStrategy::Pruned { .. } => Strategy::Pruned {
                eps: param.ok_or_else(|| Error::Input("pruned search needs eps outside the relative regime".into()))?,
            },
            SweepStrategy::BetaWeighted { beta } => Strategy::BetaWeighted { beta },
            SweepStrategy::SmallestPrediction => Strategy::SmallestPrediction,
            SweepStrategy::Astar => return run_astar_order(inst),
        };
        run_strategy(inst, strategy, RunOptions::default())
    }
}

/// `name[:param]`, e.g. `greedy`, `pruned:0.1`, `beta_weighted:0.5`, `astar`.
impl FromStr for SweepStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let name = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        let [p] = parse_args::<1>("strategy", &args)?;
        Ok(match name {
            "greedy" if p.is_none() => SweepStrategy::Greedy,
            "pruned" => SweepStrategy::Pruned { eps: p },
            "beta_weighted" => SweepStrategy::BetaWeighted {
                beta: p.unwrap_or(DEFAULT_BETA),
            },
            "smallest_prediction" if p.is_none() => SweepStrategy::SmallestPrediction,
            "astar" if p.is_none() => SweepStrategy::Astar,
            _ => return Err(invalid("strategy", format!("unknown strategy {s:?}"))),
        })
    }
}

/// Runs a sweep strategy on one instance. `pruned` needs an explicit `eps`.
pub fn run_single(inst: &SearchInstance<f64>, strategy: SweepStrategy) -> Result<SearchTrace<f64>> {
    strategy.run(inst, strategy.param(Regime::Absolute, 0.0))
}

/// Everything a sweep needs. Loadable from TOML or JSON through serde.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub families: Vec<Family>,
    pub strategies: Vec<SweepStrategy>,
    pub regime: Regime,
    /// `E1` grid (absolute, admissible) or `eps` grid (relative).
    pub magnitudes: Vec<f64>,
    /// Vertex counts.
    pub sizes: Vec<usize>,
    /// Trials per cell.
    pub trials: usize,
    pub seed: u64,
    /// Where the CLI writes the CSV; standard output when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<std::path::PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            families: Family::standard(),
            strategies: vec![SweepStrategy::Greedy],
            regime: Regime::Absolute,
            magnitudes: vec![25.0, 50.0, 100.0, 200.0],
            sizes: vec![100],
            trials: 2000,
            seed: 0,
            output: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("trials", "need at least one trial per cell"));
        }
        for (field, empty) in [
            ("families", self.families.is_empty()),
            ("strategies", self.strategies.is_empty()),
            ("magnitudes", self.magnitudes.is_empty()),
            ("sizes", self.sizes.is_empty()),
        ] {
            if empty {
                return Err(invalid(field, "grid is empty"));
            }
        }
        for &m in &self.magnitudes {
            let ok = match self.regime {
                Regime::Relative => (0.0..1.0).contains(&m),
                _ => m.is_finite() && m >= 0.0,
            };
            if !ok {
                return Err(invalid("magnitudes", format!("{m} is invalid for the {} regime", self.regime)));
            }
        }
        for &n in &self.sizes {
            if n < 2 {
                return Err(invalid("sizes", format!("{n} vertices leave no room for distinct endpoints")));
            }
            for f in &self.families {
                f.params(n)?;
            }
        }
        for s in &self.strategies {
            if let SweepStrategy::Pruned { eps: None } = s {
                if self.regime != Regime::Relative {
                    return Err(invalid("strategies", "pruned without eps needs the relative regime"));
                }
            }
        }
        Ok(())
    }

    /// Cells in output order: family, then size, then magnitude.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &family in &self.families {
            for &n in &self.sizes {
                for &magnitude in &self.magnitudes {
                    out.push(Cell {
                        index: out.len(),
                        family,
                        n,
                        regime: self.regime,
                        magnitude,
                    });
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub family: Family,
    pub n: usize,
    pub regime: Regime,
    pub magnitude: f64,
}

/// Seed of trial `trial` in cell `cell`: the first word of ChaCha stream
/// `(cell, trial)` under the base seed.
pub fn trial_seed(base: u64, cell: usize, trial: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(((cell as u64) << 32) | trial as u64);
    rng.next_u64()
}

/// Random instance of a cell: graph, distinct endpoints, then predictions,
/// all drawn from one generator seeded with `seed`.
pub fn sample_trial(family: &Family, n: usize, regime: Regime, magnitude: f64, seed: u64) -> Result<SearchInstance<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gen_family_with::<f64, _>(&family.params(n)?, &mut rng)?;
    let (root, goal) = random_endpoints(g.n(), &mut rng)?;
    let d = distances_to(&g, goal);
    let f = match regime {
        Regime::Absolute => absolute_error_with(&d, magnitude, &mut rng),
        Regime::Admissible => admissible_error_with(&d, magnitude, &mut rng)?,
        Regime::Relative => relative_error_with(&d, magnitude, &mut rng)?,
    };
    SearchInstance::new(g, root, goal, f)
}

/// Which guarantee a row's `bound_value` comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `opt + E1^- + n Einf^+`.
    Greedy,
    /// `opt + E1`.
    GreedyAdmissible,
    /// Ratio bound of pruned search on trees, times `opt`.
    PrunedTree,
    /// Ratio bound of beta-weighted search (`beta = 2/3`, `eps < 1/3`) on
    /// trees, times `opt`.
    BetaTree,
}

/// One CSV row: a strategy run on one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub family: String,
    pub n: usize,
    pub strategy: String,
    /// Pruning parameter or beta, when the strategy has one.
    pub param: Option<f64>,
    pub regime: Regime,
    pub magnitude: f64,
    pub trial: usize,
    pub seed: u64,
    pub alg: Option<f64>,
    pub opt: Option<f64>,
    pub alg_minus_opt: Option<f64>,
    pub ratio: Option<f64>,
    pub e0: Option<usize>,
    pub e1: Option<f64>,
    pub e1_minus: Option<f64>,
    pub einf_plus: Option<f64>,
    pub bound: Option<BoundKind>,
    pub bound_value: Option<f64>,
    pub bound_satisfied: Option<bool>,
    /// `ok` or the error that stopped generation or the run.
    pub status: String,
}

/// Column order of the sweep CSV.
pub const RESULT_COLUMNS: [&str; 20] = [
    "family",
    "n",
    "strategy",
    "param",
    "regime",
    "magnitude",
    "trial",
    "seed",
    "alg",
    "opt",
    "alg_minus_opt",
    "ratio",
    "e0",
    "e1",
    "e1_minus",
    "einf_plus",
    "bound",
    "bound_value",
    "bound_satisfied",
    "status",
];

impl ResultRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    /// Guarantee applicable to this row and its value, recomputed from the
    /// row's own columns.
    pub fn recompute_bound(&self) -> Option<(BoundKind, f64)> {
        let opt = self.opt?;
        let tree = self.family == "random_tree" || self.family == "random_lobster";
        match (self.strategy.as_str(), self.regime) {
            ("greedy", Regime::Admissible) => Some((BoundKind::GreedyAdmissible, admissible_greedy_bound(opt, self.e1?))),
            ("greedy", _) => {
                let p = ErrorProfile {
                    e0: self.e0?,
                    e1: self.e1?,
                    e1_minus: self.e1_minus?,
                    einf_plus: self.einf_plus?,
                    eps_max: 0.0,
                };
                Some((BoundKind::Greedy, greedy_bound(opt, &p, self.n)))
            }
            ("pruned", Regime::Relative) if tree && self.param? >= self.magnitude => {
                Some((BoundKind::PrunedTree, pruned_ratio_bound(self.param?, self.n) * opt))
            }
            ("beta_weighted", Regime::Relative)
                if tree && self.param? == DEFAULT_BETA && self.magnitude < 1.0 / 3.0 =>
            {
                Some((BoundKind::BetaTree, beta_ratio_bound(self.magnitude, self.n) * opt))
            }
            _ => None,
        }
    }
}

fn base_row(cell: &Cell, strategy: &SweepStrategy, trial: usize, seed: u64) -> ResultRow {
    ResultRow {
        family: cell.family.name().into(),
        n: cell.n,
        strategy: strategy.name().into(),
        param: strategy.param(cell.regime, cell.magnitude),
        regime: cell.regime,
        magnitude: cell.magnitude,
        trial,
        seed,
        alg: None,
        opt: None,
        alg_minus_opt: None,
        ratio: None,
        e0: None,
        e1: None,
        e1_minus: None,
        einf_plus: None,
        bound: None,
        bound_value: None,
        bound_satisfied: None,
        status: "ok".into(),
    }
}

/// Rows of one trial, one per strategy, in configuration order.
pub fn run_trial(cfg: &ExperimentConfig, cell: &Cell, trial: usize) -> Vec<ResultRow> {
    let seed = trial_seed(cfg.seed, cell.index, trial);
    let inst = sample_trial(&cell.family, cell.n, cell.regime, cell.magnitude, seed);
    cfg.strategies
        .iter()
        .map(|s| {
            let mut row = base_row(cell, s, trial, seed);
            let inst = match &inst {
                Ok(inst) => inst,
                Err(e) => {
                    row.status = format!("generation failed: {e}");
                    return row;
                }
            };
            let p = inst.profile();
            row.opt = Some(inst.opt());
            row.e0 = Some(p.e0);
            row.e1 = Some(p.e1);
            row.e1_minus = Some(p.e1_minus);
            row.einf_plus = Some(p.einf_plus);
            match s.run(inst, row.param) {
                Ok(t) => {
                    row.alg = Some(t.alg);
                    row.alg_minus_opt = Some(t.alg - t.opt);
                    row.ratio = Some(t.ratio());
                    if let Some((kind, value)) = row.recompute_bound() {
                        row.bound = Some(kind);
                        row.bound_value = Some(value);
                        row.bound_satisfied = Some(le_tol(t.alg, value));
                    }
                }
                Err(e) => row.status = format!("run failed: {e}"),
            }
            row
        })
        .collect()
}

/// Every row of the sweep in `(cell, trial, strategy)` order. Trials run in
/// parallel.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let jobs: Vec<(Cell, usize)> = cfg
        .cells()
        .into_iter()
        .flat_map(|c| (0..cfg.trials).map(move |t| (c, t)))
        .collect();
    let rows: Vec<Vec<ResultRow>> = jobs.par_iter().map(|(c, t)| run_trial(cfg, c, *t)).collect();
    Ok(rows.into_iter().flatten().collect())
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(false).from_writer(out)
}

/// Sidecar description of a sweep: the full configuration with every
/// family parameter spelled out, plus the modelling choices that the rows
/// themselves do not show.
pub fn sweep_metadata(cfg: &ExperimentConfig) -> serde_json::Value {
    serde_json::json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "negative_predictions_clamped": false,
        "tie_breaking": "smallest vertex id",
        "trial_seed": "first word of ChaCha8 stream (cell << 32 | trial) under the base seed",
        "trial_draw_order": ["graph", "endpoints", "predictions"],
    })
}

/// Writes rows under a fixed header, so an empty sweep still yields one.
pub fn write_rows<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(RESULT_COLUMNS)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: std::io::Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for rec in r.deserialize() {
        rows.push(rec?);
    }
    Ok(rows)
}
