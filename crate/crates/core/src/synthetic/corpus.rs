//! Randomised finite-support models for oracle sweeps.

use std::sync::Arc;

use rand::Rng;

use super::{DiscreteScm, Preset};
use crate::data::Arm;
use crate::rng;

pub const CORPUS_ARMS: [Arm; 3] = [-1, 0, 1];

#[derive(Debug, Clone)]
pub struct CorpusMember {
    pub scm: DiscreteScm,
    /// Built to satisfy monotonicity (also checked by
    /// [`DiscreteScm::is_monotone`]).
    pub monotone: bool,
}

/// Random weights summing to one.
fn simplex<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| 0.05 + rng.gen::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|w| w / total).collect()
}

/// A model on `support` with per-arm outcome tables; `table[a][k]` is the
/// outcome of arm `CORPUS_ARMS[a]` at the `k`-th support point.
fn tabulated(name: String, support: Vec<(f64, f64)>, table: Vec<Vec<f64>>) -> DiscreteScm {
    let points: Arc<Vec<f64>> = Arc::new(support.iter().map(|p| p.0).collect());
    let table = Arc::new(table);
    DiscreteScm::new(name, CORPUS_ARMS.to_vec(), support, move |x, u| {
        let a = CORPUS_ARMS.iter().position(|&arm| arm == x).expect("corpus arm");
        let k = points.partition_point(|&p| p < u).min(points.len() - 1);
        table[a][k]
    })
    .expect("corpus models are valid")
}

fn random_member<R: Rng>(rng: &mut R, index: usize, monotone: bool) -> DiscreteScm {
    let k = rng.gen_range(1..=6);
    let probs = simplex(rng, k);
    let support: Vec<(f64, f64)> = (0..k).map(|j| (j as f64, probs[j])).collect();
    let decreasing = rng.gen_bool(0.5);
    let table = CORPUS_ARMS
        .iter()
        .map(|_| {
            let start = rng.gen_range(-2.0..2.0);
            if monotone {
                let mut level = start;
                let mut row: Vec<f64> = (0..k)
                    .map(|_| {
                        // Occasional flat steps exercise non-strict monotonicity.
                        if rng.gen_bool(0.75) {
                            level += rng.gen_range(0.0..1.5);
                        }
                        level
                    })
                    .collect();
                if decreasing {
                    row.iter_mut().for_each(|v| *v = -*v);
                }
                row
            } else {
                (0..k).map(|_| rng.gen_range(-3.0..3.0)).collect()
            }
        })
        .collect();
    let kind = if monotone { "monotone" } else { "free" };
    tabulated(format!("{kind}-{index}"), support, table)
}

/// Twenty random monotone models, the discretised presets, and ten random
/// models without monotonicity (some of which may be monotone by chance).
pub fn corpus(seed: u64) -> Vec<CorpusMember> {
    let mut rng = rng::stream(seed, 0);
    let mut out = Vec::new();
    for index in 0..20 {
        out.push(CorpusMember {
            scm: random_member(&mut rng, index, true),
            monotone: true,
        });
    }
    for preset in Preset::ALL {
        out.push(CorpusMember {
            scm: preset.spec().discretize(9).expect("presets discretise"),
            monotone: true,
        });
    }
    for index in 0..10 {
        let scm = random_member(&mut rng, index, false);
        let monotone = scm.is_monotone();
        out.push(CorpusMember { scm, monotone });
    }
    out
}
