//! Exact evaluation of the identification integrals with population CDFs.
//!
//! Step CDFs are constant between consecutive support points, so each
//! integrand is piecewise constant on a grid of cells and the integrals reduce
//! to finite sums:
//!
//! * integrands that depend on a point only through its minimum and maximum
//!   coordinate are summed over (min cell, max cell) pairs, weighted by the
//!   volume of points whose extremes fall in those cells;
//! * the Fréchet lower function depends on the sum of per-coordinate values,
//!   so it is integrated through the distribution of that sum;
//! * product integrands are summed over the two-dimensional cell grid.

use serde::{Deserialize, Serialize};

use super::DiscreteScm;
use crate::data::{ConditionalCdf, DomainBounds, StepCdf};
use crate::error::{Error, Result};
use crate::identify::ArmPair;
use crate::integrands::{comonotone_mass, frechet_upper, ProductValues};
use crate::quadrature::CompensatedSum;

/// Which identification integral to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "formula", rename_all = "snake_case")]
pub enum Formula {
    /// Moment (or central moment) of one contrast.
    Moment { order: u32, arms: ArmPair, centered: bool },
    /// Product moment (or covariance) of two contrasts.
    Product { left: ArmPair, right: ArmPair, centered: bool },
}

/// The identified value and both Fréchet bounds of one formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactValue {
    pub identified: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Evaluates `formula` for `scm` with its population CDFs.
pub fn exact_identified_value(scm: &DiscreteScm, formula: Formula) -> Result<ExactValue> {
    let check = |arms: ArmPair| {
        for arm in [arms.treated, arms.control] {
            if !scm.arms.contains(&arm) {
                return Err(Error::EmptyArm(arm));
            }
        }
        Ok(())
    };
    match formula {
        Formula::Moment { order, arms, centered } => {
            if order == 0 {
                return Err(Error::InvalidOrder(order));
            }
            check(arms)?;
            let fi = scm.population_cdf(arms.treated, centered);
            let fj = scm.population_cdf(arms.control, centered);
            Ok(integrate_moment_family(&fi, &fj, order as usize, scm.domain(centered)))
        }
        Formula::Product { left, right, centered } => {
            check(left)?;
            check(right)?;
            let cdf = |arm| scm.population_cdf(arm, centered);
            Ok(integrate_product_family(
                &cdf(left.treated),
                &cdf(left.control),
                &cdf(right.treated),
                &cdf(right.control),
                scm.domain(centered),
            ))
        }
    }
}

/// Cells of `domain` on which every CDF in `cdfs` is constant: returns the
/// cell edges (shifted so the first is zero) and the CDF values inside each
/// cell.
fn cells<const N: usize>(cdfs: [&StepCdf; N], domain: DomainBounds) -> (Vec<f64>, Vec<[f64; N]>) {
    let mut edges = vec![domain.lower, domain.upper];
    for cdf in cdfs {
        edges.extend(cdf.atoms().iter().copied().filter(|&a| a > domain.lower && a < domain.upper));
    }
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let values = edges
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            cdfs.map(|c| c.prob_below(mid))
        })
        .collect();
    let shifted = edges.iter().map(|e| e - domain.lower).collect();
    (shifted, values)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, r| acc * (n - r) as f64 / (r + 1) as f64)
}

/// Volume of `{y in R^m : min_p y_p in cell s, max_p y_p in cell t}` for
/// cells `s < t` of lengths `ls`, `lt` separated by a gap of length `gap`:
/// `a >= 1` coordinates in cell `s`, `b >= 1` in cell `t` and the rest in
/// between.
fn extreme_cell_volume(m: usize, ls: &[f64], lt: &[f64], gap: f64) -> f64 {
    let mut total = 0.0;
    for a in 1..m {
        for b in 1..=(m - a) {
            let rest = m - a - b;
            let coefficient = binomial(m, a) * binomial(m - a, b);
            total += coefficient * ls[a] * lt[b] * gap.powi(rest as i32);
        }
    }
    total
}

/// Exact integrals over `domain^m` of the identified, lower and upper
/// integrands of the `m`-th moment of `Y_i - Y_j`.
pub fn integrate_moment_family(fi: &StepCdf, fj: &StepCdf, m: usize, domain: DomainBounds) -> ExactValue {
    if domain.width() == 0.0 {
        return ExactValue {
            identified: 0.0,
            lower: 0.0,
            upper: 0.0,
        };
    }
    let (edges, values) = cells([fi, fj], domain);
    let k = values.len();
    let powers: Vec<Vec<f64>> = (0..k)
        .map(|c| {
            let len = edges[c + 1] - edges[c];
            (0..=m).map(|p| len.powi(p as i32)).collect()
        })
        .collect();

    let mut identified = CompensatedSum::default();
    let mut u_ij = CompensatedSum::default();
    let mut u_ji = CompensatedSum::default();
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    for s in 0..k {
        for t in s..k {
            let weight = if s == t {
                powers[s][m]
            } else {
                extreme_cell_volume(m, &powers[s], &powers[t], edges[t] - edges[s + 1])
            };
            if weight == 0.0 {
                continue;
            }
            // values[c] = [F_i, F_j] in cell c; the minimum coordinate sits in s.
            let [fi_s, fj_s] = values[s];
            let [fi_t, fj_t] = values[t];
            identified.add(weight * (comonotone_mass(fj_s, fi_t) + sign * comonotone_mass(fi_s, fj_t)));
            u_ij.add(weight * frechet_upper(fj_s, fi_t));
            u_ji.add(weight * frechet_upper(fi_s, fj_t));
        }
    }

    let diffs: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .map(|(c, v)| (powers[c][1], v[1] - v[0]))
        .collect();
    let l_ij = lower_integral(&diffs, m);
    let flipped: Vec<(f64, f64)> = diffs.iter().map(|&(len, d)| (len, -d)).collect();
    let l_ji = lower_integral(&flipped, m);

    let (u_ij, u_ji) = (u_ij.value(), u_ji.value());
    let (lower, upper) = if m % 2 == 0 {
        (l_ij + l_ji, u_ij + u_ji)
    } else {
        (l_ij - u_ji, u_ij - l_ji)
    };
    ExactValue {
        identified: identified.value(),
        lower,
        upper,
    }
}

/// `∫ max{sum_p d(y_p) - m + 1, 0} dy` over the cube, where `d` takes value
/// `d_c` on a cell of length `len_c` (`cells` holds `(len_c, d_c)`).
///
/// Since `d <= 1`, the positive part is nonzero only if every coordinate has
/// `d > 0`, so only those cells enter the distribution of the sum. Partial
/// sums that can no longer exceed `m - 1` are dropped, and sums equal up to
/// rounding are merged.
fn lower_integral(cells: &[(f64, f64)], m: usize) -> f64 {
    let mut positive: Vec<(f64, f64)> = cells.iter().copied().filter(|c| c.1 > 0.0 && c.0 > 0.0).collect();
    if positive.is_empty() {
        return 0.0;
    }
    positive.sort_by(|a, b| a.1.total_cmp(&b.1));
    let values = merge(positive.into_iter().map(|(len, d)| (d, len)).collect());
    let d_max = values.last().map_or(0.0, |v| v.0);
    let threshold = (m - 1) as f64;
    let mut dist: Vec<(f64, f64)> = vec![(0.0, 1.0)];
    for r in 1..=m {
        let remaining = (m - r) as f64 * d_max;
        let mut next = Vec::with_capacity(dist.len() * values.len());
        for &(s, w) in &dist {
            for &(d, len) in &values {
                let total = s + d;
                if total + remaining > threshold {
                    next.push((total, w * len));
                }
            }
        }
        next.sort_by(|a, b| a.0.total_cmp(&b.0));
        dist = merge(next);
    }
    let mut acc = CompensatedSum::default();
    for (s, w) in dist {
        acc.add(w * (s - threshold).max(0.0));
    }
    acc.value()
}

/// Merges adjacent `(value, weight)` entries of a value-sorted list whose
/// values agree to rounding.
fn merge(sorted: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
    for (v, w) in sorted {
        match out.last_mut() {
            Some(last) if (v - last.0).abs() <= 1e-12 * v.abs().max(1.0) => last.1 += w,
            _ => out.push((v, w)),
        }
    }
    out
}

/// Exact integrals over `domain^2` of the identified, lower and upper product
/// integrands for `(Y_i - Y_j)(Y_k - Y_h)`.
pub fn integrate_product_family(
    fi: &StepCdf,
    fj: &StepCdf,
    fk: &StepCdf,
    fh: &StepCdf,
    domain: DomainBounds,
) -> ExactValue {
    let (edges1, values1) = cells([fi, fj], domain);
    let (edges2, values2) = cells([fk, fh], domain);
    let mut identified = CompensatedSum::default();
    let mut lower = CompensatedSum::default();
    let mut upper = CompensatedSum::default();
    for (c1, &[a, b]) in values1.iter().enumerate() {
        let len1 = edges1[c1 + 1] - edges1[c1];
        for (c2, &[c, d]) in values2.iter().enumerate() {
            let area = len1 * (edges2[c2 + 1] - edges2[c2]);
            let v = ProductValues { a, b, c, d };
            let (l, u) = v.bounds();
            identified.add(area * v.identified());
            lower.add(area * l);
            upper.add(area * u);
        }
    }
    ExactValue {
        identified: identified.value(),
        lower: lower.value(),
        upper: upper.value(),
    }
}
