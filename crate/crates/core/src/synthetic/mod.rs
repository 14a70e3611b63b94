//! Structural causal model simulators and an exact oracle for models whose
//! exogenous noise has finite support.

mod corpus;
mod exact;
mod presets;

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Arm, DomainBounds, Observation, ObservationTable, StepCdf};
use crate::error::{Error, Result};
use crate::identify::ArmPair;
use crate::rng;

pub use corpus::{corpus, CorpusMember};
pub use exact::{exact_identified_value, integrate_moment_family, integrate_product_family, ExactValue, Formula};
pub use presets::{truth, Preset};

/// Response function `f(x, u)`.
pub type Response = Arc<dyn Fn(Arm, f64) -> f64 + Send + Sync>;

const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// Law of the scalar exogenous noise `U`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum NoiseLaw {
    Uniform { lo: f64, hi: f64 },
    /// Finite support as `(u, probability)` pairs.
    Discrete { support: Vec<(f64, f64)> },
}

impl NoiseLaw {
    fn validate(&self) -> Result<()> {
        match self {
            NoiseLaw::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(Error::Validation(format!("uniform noise needs lo < hi (got {lo}, {hi})")));
                }
            }
            NoiseLaw::Discrete { support } => {
                check_probabilities(support.iter().map(|p| p.1), "noise support")?;
                if support.iter().any(|p| !p.0.is_finite()) {
                    return Err(Error::Validation("noise support points must be finite".into()));
                }
            }
        }
        Ok(())
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            NoiseLaw::Uniform { lo, hi } => lo + (hi - lo) * rng.gen::<f64>(),
            NoiseLaw::Discrete { support } => support[pick(support.iter().map(|p| p.1), rng.gen())].0,
        }
    }
}

fn check_probabilities<I: Iterator<Item = f64>>(probs: I, what: &str) -> Result<()> {
    let mut total = 0.0;
    let mut count = 0;
    for p in probs {
        if !(p.is_finite() && p >= 0.0) {
            return Err(Error::Validation(format!("{what}: invalid probability {p}")));
        }
        total += p;
        count += 1;
    }
    if count == 0 {
        return Err(Error::Validation(format!("{what}: empty")));
    }
    if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
        return Err(Error::Validation(format!("{what}: probabilities sum to {total}")));
    }
    Ok(())
}

/// Index of the category that cumulative probabilities assign to `u` in [0, 1).
fn pick<I: Iterator<Item = f64>>(probs: I, u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (k, p) in probs.enumerate() {
        acc += p;
        last = k;
        if u < acc {
            return k;
        }
    }
    last
}

/// A model `X ~ arm_probabilities`, `U ~ noise` independent of `X`, and
/// `Y = response(X, U)`.
#[derive(Clone)]
pub struct ScmSpec {
    pub name: String,
    pub arm_probabilities: Vec<(Arm, f64)>,
    pub noise: NoiseLaw,
    response: Response,
}

impl fmt::Debug for ScmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScmSpec")
            .field("name", &self.name)
            .field("arm_probabilities", &self.arm_probabilities)
            .field("noise", &self.noise)
            .finish_non_exhaustive()
    }
}

impl ScmSpec {
    pub fn new<F>(name: impl Into<String>, arm_probabilities: Vec<(Arm, f64)>, noise: NoiseLaw, response: F) -> Result<Self>
    where
        F: Fn(Arm, f64) -> f64 + Send + Sync + 'static,
    {
        check_probabilities(arm_probabilities.iter().map(|p| p.1), "arm probabilities")?;
        let mut arms: Vec<Arm> = arm_probabilities.iter().map(|p| p.0).collect();
        arms.sort_unstable();
        arms.dedup();
        if arms.len() != arm_probabilities.len() {
            return Err(Error::Validation("arm probabilities list an arm twice".into()));
        }
        noise.validate()?;
        Ok(Self {
            name: name.into(),
            arm_probabilities,
            noise,
            response: Arc::new(response),
        })
    }

    /// Uniform assignment over `arms`.
    pub fn uniform_arms<F>(name: impl Into<String>, arms: &[Arm], noise: NoiseLaw, response: F) -> Result<Self>
    where
        F: Fn(Arm, f64) -> f64 + Send + Sync + 'static,
    {
        let p = 1.0 / arms.len() as f64;
        Self::new(name, arms.iter().map(|&a| (a, p)).collect(), noise, response)
    }

    pub fn arms(&self) -> Vec<Arm> {
        self.arm_probabilities.iter().map(|p| p.0).collect()
    }

    pub fn response(&self, x: Arm, u: f64) -> f64 {
        (self.response)(x, u)
    }

    fn draw_row<R: Rng>(&self, rng: &mut R) -> Result<(Arm, f64)> {
        let x = self.arm_probabilities[pick(self.arm_probabilities.iter().map(|p| p.1), rng.gen())].0;
        let u = self.noise.draw(rng);
        let y = self.response(x, u);
        if !y.is_finite() {
            return Err(Error::Validation(format!("{}: response({x}, {u}) = {y}", self.name)));
        }
        Ok((x, y))
    }

    /// The model with finite noise, as an exact-oracle substrate. Uniform
    /// noise is replaced by `points` equally likely midpoint quantiles.
    pub fn discretize(&self, points: usize) -> Result<DiscreteScm> {
        let support = match &self.noise {
            NoiseLaw::Discrete { support } => support.clone(),
            NoiseLaw::Uniform { lo, hi } => {
                if points == 0 {
                    return Err(Error::Validation("discretisation needs at least one point".into()));
                }
                let p = 1.0 / points as f64;
                (0..points).map(|k| (lo + (hi - lo) * (k as f64 + 0.5) * p, p)).collect()
            }
        };
        DiscreteScm::with_response(self.name.clone(), self.arms(), support, self.response.clone())
    }
}

/// `n` i.i.d. rows from `spec`.
pub fn simulate(spec: &ScmSpec, n: usize, seed: u64) -> Result<ObservationTable> {
    if n == 0 {
        return Err(Error::Validation("sample size must be at least 1".into()));
    }
    let mut rng = rng::stream(seed, 0);
    let rows = (0..n)
        .map(|_| spec.draw_row(&mut rng).map(|(x, y)| Observation::new(x, y)))
        .collect::<Result<Vec<_>>>()?;
    ObservationTable::new(rows)
}

/// `n` i.i.d. rows with a covariate: `W = level` with the given probability,
/// then `(X, Y)` from that level's model.
pub fn simulate_stratified(strata: &[(i64, f64, &ScmSpec)], n: usize, seed: u64) -> Result<ObservationTable> {
    if n == 0 {
        return Err(Error::Validation("sample size must be at least 1".into()));
    }
    check_probabilities(strata.iter().map(|s| s.1), "stratum probabilities")?;
    let mut rng = rng::stream(seed, 0);
    let rows = (0..n)
        .map(|_| {
            let (w, _, spec) = strata[pick(strata.iter().map(|s| s.1), rng.gen())];
            spec.draw_row(&mut rng).map(|(x, y)| Observation::with_covariate(x, y, w))
        })
        .collect::<Result<Vec<_>>>()?;
    ObservationTable::new(rows)
}

/// A model whose noise takes finitely many values, so every expectation is a
/// finite sum.
#[derive(Clone)]
pub struct DiscreteScm {
    pub name: String,
    pub arms: Vec<Arm>,
    /// `(u, probability)` sorted by `u`.
    pub support: Vec<(f64, f64)>,
    response: Response,
}

impl fmt::Debug for DiscreteScm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiscreteScm")
            .field("name", &self.name)
            .field("arms", &self.arms)
            .field("support", &self.support)
            .finish_non_exhaustive()
    }
}

impl DiscreteScm {
    pub fn new<F>(name: impl Into<String>, arms: Vec<Arm>, support: Vec<(f64, f64)>, response: F) -> Result<Self>
    where
        F: Fn(Arm, f64) -> f64 + Send + Sync + 'static,
    {
        Self::with_response(name.into(), arms, support, Arc::new(response))
    }

    fn with_response(name: String, arms: Vec<Arm>, mut support: Vec<(f64, f64)>, response: Response) -> Result<Self> {
        if arms.is_empty() {
            return Err(Error::Validation("discrete model needs at least one arm".into()));
        }
        NoiseLaw::Discrete { support: support.clone() }.validate()?;
        support.sort_by(|a, b| a.0.total_cmp(&b.0));
        let scm = Self {
            name,
            arms,
            support,
            response,
        };
        for &arm in &scm.arms {
            for &(u, _) in &scm.support {
                let y = scm.outcome(arm, u);
                if !y.is_finite() {
                    return Err(Error::Validation(format!("{}: response({arm}, {u}) = {y}", scm.name)));
                }
            }
        }
        Ok(scm)
    }

    pub fn outcome(&self, arm: Arm, u: f64) -> f64 {
        (self.response)(arm, u)
    }

    /// Simulation spec with uniform arm assignment and the same noise.
    pub fn to_spec(&self) -> Result<ScmSpec> {
        let p = 1.0 / self.arms.len() as f64;
        Ok(ScmSpec {
            name: self.name.clone(),
            arm_probabilities: self.arms.iter().map(|&a| (a, p)).collect(),
            noise: NoiseLaw::Discrete {
                support: self.support.clone(),
            },
            response: self.response.clone(),
        })
    }

    pub fn arm_mean(&self, arm: Arm) -> f64 {
        self.support.iter().map(|&(u, p)| p * self.outcome(arm, u)).sum()
    }

    /// Population `P(Y_arm < y)`, or of `Y_arm - E[Y_arm]` when `centered`.
    pub fn population_cdf(&self, arm: Arm, centered: bool) -> StepCdf {
        let shift = if centered { self.arm_mean(arm) } else { 0.0 };
        let atoms: Vec<(f64, f64)> = self.support.iter().map(|&(u, p)| (self.outcome(arm, u) - shift, p)).collect();
        StepCdf::weighted(&atoms)
    }

    /// Smallest interval holding every (centred) potential outcome.
    pub fn domain(&self, centered: bool) -> DomainBounds {
        let mut lower = f64::INFINITY;
        let mut upper = f64::NEG_INFINITY;
        for &arm in &self.arms {
            let shift = if centered { self.arm_mean(arm) } else { 0.0 };
            for &(u, p) in &self.support {
                if p > 0.0 {
                    let y = self.outcome(arm, u) - shift;
                    lower = lower.min(y);
                    upper = upper.max(y);
                }
            }
        }
        DomainBounds { lower, upper }
    }

    /// Whether every arm's response is nondecreasing in `u`, or every arm's is
    /// nonincreasing.
    pub fn is_monotone(&self) -> bool {
        let direction = |up: bool| {
            self.arms.iter().all(|&arm| {
                self.support.windows(2).all(|w| {
                    let (a, b) = (self.outcome(arm, w[0].0), self.outcome(arm, w[1].0));
                    if up {
                        a <= b
                    } else {
                        a >= b
                    }
                })
            })
        };
        direction(true) || direction(false)
    }

    fn effect(&self, arms: ArmPair, u: f64, centered: bool) -> f64 {
        let d = self.outcome(arms.treated, u) - self.outcome(arms.control, u);
        if centered {
            d - (self.arm_mean(arms.treated) - self.arm_mean(arms.control))
        } else {
            d
        }
    }

    /// `E[(Y_i - Y_j)^m]` (centred at the average effect when `centered`).
    pub fn exact_moment(&self, arms: ArmPair, order: u32, centered: bool) -> f64 {
        self.support
            .iter()
            .map(|&(u, p)| p * self.effect(arms, u, centered).powi(order as i32))
            .sum()
    }

    /// `E[(Y_i - Y_j)(Y_k - Y_h)]` (covariance when `centered`).
    pub fn exact_product_moment(&self, left: ArmPair, right: ArmPair, centered: bool) -> f64 {
        self.support
            .iter()
            .map(|&(u, p)| p * self.effect(left, u, centered) * self.effect(right, u, centered))
            .sum()
    }
}
