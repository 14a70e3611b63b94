//! Replicated simulation study for SCM A (moments of orders 2 to 4) and SCM B
//! (product moment of `Y_1 - Y_0` and `Y_0 - Y_{-1}`), summarised as replicate
//! means with 2.5% and 97.5% empirical percentiles.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bootstrap::nearest_rank;
use crate::error::Result;
use crate::identify::{moment_family, product_family, ArmPair, MomentFamily};
use crate::quadrature::McOptions;
use crate::rng;
use crate::synthetic::{simulate, truth, Preset};

const DATA_TAG: u64 = 0x6461_7461;
const MC_TAG: u64 = 0x6d63;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproduceConfig {
    pub replications: usize,
    pub sizes: Vec<usize>,
    pub seed: u64,
    /// Sampling plan for every integral; the seed is rederived per replication.
    pub mc: McOptions,
    pub scm_a: bool,
    pub scm_b: bool,
}

impl Default for ReproduceConfig {
    fn default() -> Self {
        Self {
            replications: 1000,
            sizes: vec![20, 100, 1000],
            seed: 0,
            mc: McOptions::default(),
            scm_a: true,
            scm_b: true,
        }
    }
}

/// Summary of one quantity at one sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub n: usize,
    /// Absent when every replication failed.
    pub mean: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub succeeded: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub quantity: String,
    pub ground_truth: Option<f64>,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyTable {
    pub scm: String,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproduceReport {
    pub config: ReproduceConfig,
    pub tables: Vec<StudyTable>,
}

impl ReproduceReport {
    pub fn row(&self, quantity: &str) -> Option<&Row> {
        self.tables.iter().flat_map(|t| &t.rows).find(|r| r.quantity == quantity)
    }

    /// Plain-text tables with `mean ([2.5%, 97.5%])` cells.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# {} replications per sample size, seed {}; cells are mean ([2.5%, 97.5%])",
            self.config.replications, self.config.seed
        );
        for table in &self.tables {
            let _ = writeln!(out, "\n## {}", table.scm);
            let mut header = format!("{:<22}", "quantity");
            for n in &self.config.sizes {
                header += &format!(" | {:<28}", format!("N={n}"));
            }
            header += " | ground truth";
            let _ = writeln!(out, "{header}");
            for row in &table.rows {
                let mut line = format!("{:<22}", row.quantity);
                for cell in &row.cells {
                    let text = match (cell.mean, cell.lower, cell.upper) {
                        (Some(m), Some(l), Some(u)) => format!("{m:.3} ([{l:.3},{u:.3}])"),
                        _ => "-".to_string(),
                    };
                    line += &format!(" | {text:<28}");
                }
                line += &match row.ground_truth {
                    Some(v) => format!(" | {v:.3}"),
                    None => " | -".to_string(),
                };
                let _ = writeln!(out, "{line}");
            }
            let failures: Vec<String> = table.rows[0]
                .cells
                .iter()
                .filter(|c| c.failed > 0)
                .map(|c| format!("N={}: {}", c.n, c.failed))
                .collect();
            if !failures.is_empty() {
                let _ = writeln!(out, "failed replications (e.g. an arm absent from the sample): {}", failures.join(", "));
            }
        }
        out
    }
}

fn summarise(n: usize, values: &[Option<f64>]) -> Cell {
    let mut ok: Vec<f64> = values.iter().flatten().copied().collect();
    let failed = values.len() - ok.len();
    if ok.is_empty() {
        return Cell {
            n,
            mean: None,
            lower: None,
            upper: None,
            succeeded: 0,
            failed,
        };
    }
    let mean = ok.iter().sum::<f64>() / ok.len() as f64;
    ok.sort_by(f64::total_cmp);
    Cell {
        n,
        mean: Some(mean),
        lower: Some(nearest_rank(&ok, 0.025)),
        upper: Some(nearest_rank(&ok, 0.975)),
        succeeded: ok.len(),
        failed,
    }
}

/// Per-replication families for one model and sample size; `None` marks a
/// failed replication.
fn replicate<F>(config: &ReproduceConfig, preset: Preset, size_index: usize, n: usize, families: F) -> Vec<Option<Vec<MomentFamily>>>
where
    F: Fn(&crate::data::ObservationTable, &McOptions) -> Result<Vec<MomentFamily>> + Sync,
{
    let spec = preset.spec();
    let tag = (preset as u64) << 8 | size_index as u64;
    (0..config.replications)
        .into_par_iter()
        .map(|r| {
            let data_seed = rng::derive_seed(config.seed, DATA_TAG ^ tag, r as u64);
            let mc_seed = rng::derive_seed(config.seed, MC_TAG ^ tag, r as u64);
            let table = simulate(&spec, n, data_seed).ok()?;
            families(&table, &config.mc.reseeded(mc_seed)).ok()
        })
        .collect()
}

fn rows_for(
    config: &ReproduceConfig,
    preset: Preset,
    labels: &[(String, Option<f64>)],
    families: impl Fn(&crate::data::ObservationTable, &McOptions) -> Result<Vec<MomentFamily>> + Sync,
) -> Vec<Row> {
    let per_size: Vec<Vec<Option<Vec<MomentFamily>>>> = config
        .sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| replicate(config, preset, i, n, &families))
        .collect();
    let mut rows = Vec::new();
    for (f, (label, truth)) in labels.iter().enumerate() {
        for (kind, suffix) in [(0, ""), (1, "_L"), (2, "_U")] {
            let cells = config
                .sizes
                .iter()
                .zip(&per_size)
                .map(|(&n, reps)| {
                    let values: Vec<Option<f64>> = reps
                        .iter()
                        .map(|r| {
                            r.as_ref().map(|fams| match kind {
                                0 => fams[f].identified.value,
                                1 => fams[f].lower.value,
                                _ => fams[f].upper.value,
                            })
                        })
                        .collect();
                    summarise(n, &values)
                })
                .collect();
            rows.push(Row {
                quantity: label.replacen("sigma", &format!("sigma{suffix}"), 1),
                ground_truth: if kind == 0 { *truth } else { None },
                cells,
            });
        }
    }
    rows
}

/// Runs the study.
pub fn reproduce(config: &ReproduceConfig) -> ReproduceReport {
    let mut tables = Vec::new();
    if config.scm_a {
        let arms = ArmPair { treated: 1, control: 0 };
        let labels: Vec<(String, Option<f64>)> = truth::SCM_A_MOMENTS[1..]
            .iter()
            .map(|&(m, v)| (format!("sigma^({m})"), Some(v)))
            .collect();
        let rows = rows_for(config, Preset::ScmA, &labels, |t, mc| {
            (2..=4).map(|m| moment_family(t, m, arms, false, mc)).collect()
        });
        tables.push(StudyTable {
            scm: Preset::ScmA.name().into(),
            rows,
        });
    }
    if config.scm_b {
        let left = ArmPair { treated: 1, control: 0 };
        let right = ArmPair { treated: 0, control: -1 };
        let labels = vec![("sigma(1,0;0,-1)".to_string(), Some(truth::SCM_B_PRODUCT))];
        let rows = rows_for(config, Preset::ScmB, &labels, |t, mc| {
            Ok(vec![product_family(t, left, right, false, mc)?])
        });
        tables.push(StudyTable {
            scm: Preset::ScmB.name().into(),
            rows,
        });
    }
    ReproduceReport {
        config: config.clone(),
        tables,
    }
}
