//! Monte Carlo integration over the outcome cube `[a, b]^m`.
//!
//! Two sampling schemes estimate the same integral:
//!
//! * **joint** draws `n` i.i.d. uniform points of the cube;
//! * **tensor** draws `N_k` uniform points per axis and averages over the full
//!   Cartesian grid.
//!
//! Both return `(b - a)^m` times the average integrand value. Work is split into
//! a fixed partition (chunks of points, or first-axis indices) whose partial
//! sums are combined in partition order with compensated summation, so results
//! depend only on the seed and never on the worker count.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::DomainBounds;
use crate::error::{Error, Result};
use crate::rng;

/// Points per joint-mode partition.
const CHUNK: usize = 4096;
/// Stream offset separating joint-mode chunks from per-axis streams.
const JOINT_STREAM_BASE: u64 = 1 << 32;

/// Joint-mode defaults: `10^5` points up to two dimensions, `10^6` beyond.
pub fn default_joint_points(dimension: usize) -> usize {
    if dimension <= 2 {
        100_000
    } else {
        1_000_000
    }
}

/// Tensor-mode default points per axis.
pub const DEFAULT_POINTS_PER_AXIS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum Sampling {
    Joint { points: usize },
    Tensor { points_per_axis: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrationConfig {
    pub dimension: usize,
    pub sampling: Sampling,
    pub seed: u64,
    pub bounds: DomainBounds,
    /// Permit tensor grids in three or more dimensions.
    #[serde(default)]
    pub allow_large_tensor: bool,
}

impl IntegrationConfig {
    pub fn joint(dimension: usize, points: usize, seed: u64, bounds: DomainBounds) -> Self {
        Self {
            dimension,
            sampling: Sampling::Joint { points },
            seed,
            bounds,
            allow_large_tensor: false,
        }
    }

    pub fn tensor(dimension: usize, points_per_axis: usize, seed: u64, bounds: DomainBounds) -> Self {
        Self {
            dimension,
            sampling: Sampling::Tensor {
                points_per_axis: vec![points_per_axis; dimension],
            },
            seed,
            bounds,
            allow_large_tensor: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        DomainBounds::new(self.bounds.lower, self.bounds.upper)?;
        if self.dimension == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        match &self.sampling {
            Sampling::Joint { points } => {
                if *points == 0 {
                    return Err(Error::Config("joint point count must be at least 1".into()));
                }
            }
            Sampling::Tensor { points_per_axis } => {
                if points_per_axis.len() != self.dimension {
                    return Err(Error::Config(format!(
                        "{} per-axis point counts given for dimension {}",
                        points_per_axis.len(),
                        self.dimension
                    )));
                }
                if points_per_axis.contains(&0) {
                    return Err(Error::Config("per-axis point counts must be at least 1".into()));
                }
                if self.dimension >= 3 && !self.allow_large_tensor {
                    let evaluations = points_per_axis.iter().map(|&n| n as f64).product();
                    return Err(Error::TensorGuard {
                        dimension: self.dimension,
                        evaluations,
                    });
                }
            }
        }
        Ok(())
    }

    /// Total number of integrand evaluations.
    pub fn evaluations(&self) -> f64 {
        match &self.sampling {
            Sampling::Joint { points } => *points as f64,
            Sampling::Tensor { points_per_axis } => points_per_axis.iter().map(|&n| n as f64).product(),
        }
    }
}

/// How estimators choose their sampling; concrete point counts default by
/// dimension when left unset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum SamplingPlan {
    Joint { points: Option<usize> },
    Tensor { points_per_axis: Option<usize> },
}

/// Monte Carlo settings shared by every estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McOptions {
    pub plan: SamplingPlan,
    pub seed: u64,
    /// Replaces the data-derived integration domain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds_override: Option<DomainBounds>,
    #[serde(default)]
    pub allow_large_tensor: bool,
}

impl Default for McOptions {
    fn default() -> Self {
        Self {
            plan: SamplingPlan::Joint { points: None },
            seed: 0,
            bounds_override: None,
            allow_large_tensor: false,
        }
    }
}

impl McOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn joint_points(mut self, points: usize) -> Self {
        self.plan = SamplingPlan::Joint { points: Some(points) };
        self
    }

    pub fn tensor_points(mut self, points_per_axis: usize) -> Self {
        self.plan = SamplingPlan::Tensor {
            points_per_axis: Some(points_per_axis),
        };
        self
    }

    pub fn reseeded(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Concrete config for an integral of `dimension` over `data_bounds`
    /// (or the override, when set).
    pub fn config(&self, dimension: usize, data_bounds: DomainBounds) -> IntegrationConfig {
        let sampling = match self.plan {
            SamplingPlan::Joint { points } => Sampling::Joint {
                points: points.unwrap_or_else(|| default_joint_points(dimension)),
            },
            SamplingPlan::Tensor { points_per_axis } => Sampling::Tensor {
                points_per_axis: vec![points_per_axis.unwrap_or(DEFAULT_POINTS_PER_AXIS); dimension],
            },
        };
        IntegrationConfig {
            dimension,
            sampling,
            seed: self.seed,
            bounds: self.bounds_override.unwrap_or(data_bounds),
            allow_large_tensor: self.allow_large_tensor,
        }
    }
}

/// A possibly vector-valued function on the cube.
///
/// Evaluation is split in two: [`coordinate`](Integrand::coordinate)
/// precomputes whatever depends on a single coordinate (typically CDF values),
/// and [`combine`](Integrand::combine) maps the `m` precomputed coordinates to
/// the outputs. Tensor mode precomputes each axis point once.
pub trait Integrand: Sync {
    type Coordinate: Copy + Send + Sync;

    fn dimension(&self) -> usize;

    fn outputs(&self) -> usize {
        1
    }

    fn coordinate(&self, axis: usize, y: f64) -> Self::Coordinate;

    fn combine(&self, coords: &[Self::Coordinate], out: &mut [f64]);

    /// Direct evaluation at one point.
    fn evaluate(&self, point: &[f64]) -> Vec<f64> {
        let coords: Vec<_> = point
            .iter()
            .enumerate()
            .map(|(axis, &y)| self.coordinate(axis, y))
            .collect();
        let mut out = vec![0.0; self.outputs()];
        self.combine(&coords, &mut out);
        out
    }
}

/// Scalar integrand from a closure over the raw point.
pub struct FnIntegrand<F> {
    dimension: usize,
    f: F,
}

impl<F> FnIntegrand<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    pub fn new(dimension: usize, f: F) -> Self {
        Self { dimension, f }
    }
}

impl<F> Integrand for FnIntegrand<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    type Coordinate = f64;

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn coordinate(&self, _axis: usize, y: f64) -> f64 {
        y
    }

    fn combine(&self, coords: &[f64], out: &mut [f64]) {
        out[0] = (self.f)(coords);
    }
}

/// Monte Carlo value with its estimated standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

#[derive(Debug, Clone, Default)]
struct Moments {
    sum: CompensatedSum,
    sum_sq: CompensatedSum,
}

#[derive(Debug, Clone)]
struct Partial {
    count: usize,
    outputs: Vec<Moments>,
}

impl Partial {
    fn new(outputs: usize) -> Self {
        Self {
            count: 0,
            outputs: vec![Moments::default(); outputs],
        }
    }

    #[inline]
    fn push(&mut self, values: &[f64]) {
        self.count += 1;
        for (m, &v) in self.outputs.iter_mut().zip(values) {
            m.sum.add(v);
            m.sum_sq.add(v * v);
        }
    }

    fn merge(&mut self, other: &Partial) {
        self.count += other.count;
        for (m, o) in self.outputs.iter_mut().zip(&other.outputs) {
            m.sum.merge(&o.sum);
            m.sum_sq.merge(&o.sum_sq);
        }
    }

    fn finish(&self, volume: f64) -> Vec<McEstimate> {
        let n = self.count as f64;
        self.outputs
            .iter()
            .map(|m| {
                let mean = m.sum.value() / n;
                let var = if self.count > 1 {
                    ((m.sum_sq.value() / n - mean * mean) * n / (n - 1.0)).max(0.0)
                } else {
                    0.0
                };
                McEstimate {
                    value: volume * mean,
                    std_error: volume * (var / n).sqrt(),
                }
            })
            .collect()
    }
}

/// `count` i.i.d. uniform draws on `bounds`; `(seed, axis_index)` names an
/// independent stream.
pub fn draw_axis_points(bounds: DomainBounds, count: usize, seed: u64, axis_index: usize) -> Result<Vec<f64>> {
    let bounds = DomainBounds::new(bounds.lower, bounds.upper)?;
    if count == 0 {
        return Err(Error::Config("point count must be at least 1".into()));
    }
    let mut rng = rng::stream(seed, axis_index as u64);
    let width = bounds.width();
    Ok((0..count)
        .map(|_| bounds.lower + width * rng.gen::<f64>())
        .collect())
}

/// First output of `integrand`.
pub fn integrate<I: Integrand>(integrand: &I, config: &IntegrationConfig) -> Result<f64> {
    Ok(integrate_all(integrand, config)?[0].value)
}

/// Every output of `integrand`, each with a standard error computed as if the
/// evaluations were independent (exact for joint mode, an approximation for
/// tensor grids).
pub fn integrate_all<I: Integrand>(integrand: &I, config: &IntegrationConfig) -> Result<Vec<McEstimate>> {
    config.validate()?;
    if integrand.dimension() != config.dimension {
        return Err(Error::Config(format!(
            "integrand has dimension {} but config has dimension {}",
            integrand.dimension(),
            config.dimension
        )));
    }
    let outputs = integrand.outputs();
    let width = config.bounds.width();
    if width == 0.0 {
        return Ok(vec![McEstimate { value: 0.0, std_error: 0.0 }; outputs]);
    }
    let volume = width.powi(config.dimension as i32);
    let total = match &config.sampling {
        Sampling::Joint { points } => joint(integrand, config, *points),
        Sampling::Tensor { points_per_axis } => tensor(integrand, config, points_per_axis)?,
    };
    Ok(total.finish(volume))
}

fn joint<I: Integrand>(integrand: &I, config: &IntegrationConfig, points: usize) -> Partial {
    let m = config.dimension;
    let outputs = integrand.outputs();
    let lower = config.bounds.lower;
    let width = config.bounds.width();
    let chunks = points.div_ceil(CHUNK);
    let partials: Vec<Partial> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng::stream(config.seed, JOINT_STREAM_BASE + c as u64);
            let n = CHUNK.min(points - c * CHUNK);
            let mut partial = Partial::new(outputs);
            let mut coords = Vec::with_capacity(m);
            let mut out = vec![0.0; outputs];
            for _ in 0..n {
                coords.clear();
                for axis in 0..m {
                    let y = lower + width * rng.gen::<f64>();
                    coords.push(integrand.coordinate(axis, y));
                }
                integrand.combine(&coords, &mut out);
                partial.push(&out);
            }
            partial
        })
        .collect();
    fold(partials, outputs)
}

fn tensor<I: Integrand>(integrand: &I, config: &IntegrationConfig, per_axis: &[usize]) -> Result<Partial> {
    let m = config.dimension;
    let outputs = integrand.outputs();
    let axes: Vec<Vec<I::Coordinate>> = per_axis
        .iter()
        .enumerate()
        .map(|(axis, &n)| {
            Ok(draw_axis_points(config.bounds, n, config.seed, axis)?
                .into_iter()
                .map(|y| integrand.coordinate(axis, y))
                .collect())
        })
        .collect::<Result<_>>()?;
    let partials: Vec<Partial> = (0..per_axis[0])
        .into_par_iter()
        .map(|first| {
            let mut partial = Partial::new(outputs);
            let mut out = vec![0.0; outputs];
            let mut index = vec![0usize; m];
            let mut coords: Vec<I::Coordinate> = index.iter().enumerate().map(|(a, &i)| axes[a][i]).collect();
            coords[0] = axes[0][first];
            loop {
                integrand.combine(&coords, &mut out);
                partial.push(&out);
                // odometer over axes 1..m
                let mut axis = m;
                loop {
                    axis -= 1;
                    if axis == 0 {
                        return partial;
                    }
                    index[axis] += 1;
                    if index[axis] < per_axis[axis] {
                        coords[axis] = axes[axis][index[axis]];
                        break;
                    }
                    index[axis] = 0;
                    coords[axis] = axes[axis][0];
                }
            }
        })
        .collect();
    Ok(fold(partials, outputs))
}

fn fold(partials: Vec<Partial>, outputs: usize) -> Partial {
    let mut total = Partial::new(outputs);
    for p in &partials {
        total.merge(p);
    }
    total
}
