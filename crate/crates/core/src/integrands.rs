//! Pointwise integrands of the identification formulas and their Fréchet
//! bounds.
//!
//! For one contrast `(i, j)` and a point `y = (y_1, ..., y_m)` the identified
//! integrand is
//!
//! ```text
//! max{min_p F_j(y_p) - max_p F_i(y_p), 0} + (-1)^m max{min_p F_i(y_p) - max_p F_j(y_p), 0}
//! ```
//!
//! and the Fréchet functions are
//!
//! ```text
//! l(y; i, j) = max{sum_p F_j(y_p) - sum_p F_i(y_p) - m + 1, 0}
//! u(y; i, j) = min{min_p F_j(y_p), 1 - max_p F_i(y_p)}
//! ```
//!
//! The product integrands work on pairs `(y_1, y_2)` with four arms. Every
//! multi-output integrand here evaluates the identified value and both bounds
//! from the same CDF values, so a single Monte Carlo pass yields all three
//! with the ordering `lower <= identified <= upper` holding pointwise.

use crate::data::ConditionalCdf;
use crate::quadrature::Integrand;

/// Output slots of [`MomentIntegrand`] and [`ProductIntegrand`].
pub const IDENTIFIED: usize = 0;
pub const LOWER: usize = 1;
pub const UPPER: usize = 2;

/// `max{hi - lo, 0}`: the comonotone probability of `{Y_j < a, Y_i >= b}`
/// given `hi = F_j(a)` and `lo = F_i(b)`.
#[inline]
pub fn comonotone_mass(hi: f64, lo: f64) -> f64 {
    (hi - lo).max(0.0)
}

/// Fréchet lower function from the per-coordinate sums.
#[inline]
pub fn frechet_lower(sum_j: f64, sum_i: f64, m: usize) -> f64 {
    (sum_j - sum_i - m as f64 + 1.0).max(0.0)
}

/// Fréchet upper function from the extreme CDF values.
#[inline]
pub fn frechet_upper(min_j: f64, max_i: f64) -> f64 {
    min_j.min(1.0 - max_i)
}

#[inline]
fn signed(m: usize, x: f64) -> f64 {
    if m % 2 == 0 {
        x
    } else {
        -x
    }
}

/// The identified integrand at `point`, evaluating both CDFs at every
/// coordinate.
pub fn identified_naive<C: ConditionalCdf>(fi: &C, fj: &C, point: &[f64]) -> f64 {
    let fold = |f: &C| {
        point.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| {
            let v = f.prob_below(y);
            (lo.min(v), hi.max(v))
        })
    };
    let (min_i, max_i) = fold(fi);
    let (min_j, max_j) = fold(fj);
    comonotone_mass(min_j, max_i) + signed(point.len(), comonotone_mass(min_i, max_j))
}

/// The identified integrand at `point`, using that a CDF is monotone: the
/// minimum over coordinates is attained at the smallest coordinate and the
/// maximum at the largest, so four CDF evaluations suffice.
pub fn identified_reduced<C: ConditionalCdf>(fi: &C, fj: &C, point: &[f64]) -> f64 {
    let (lo, hi) = point
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| (lo.min(y), hi.max(y)));
    let t1 = comonotone_mass(fj.prob_below(lo), fi.prob_below(hi));
    let t2 = comonotone_mass(fi.prob_below(lo), fj.prob_below(hi));
    t1 + signed(point.len(), t2)
}

/// Identified value and Fréchet bounds of the `m`-th moment of `Y_i - Y_j`.
///
/// Outputs, in order: identified integrand, lower-bound integrand,
/// upper-bound integrand.
pub struct MomentIntegrand<'a, C> {
    order: usize,
    fi: &'a C,
    fj: &'a C,
}

impl<'a, C: ConditionalCdf> MomentIntegrand<'a, C> {
    pub fn new(order: usize, fi: &'a C, fj: &'a C) -> Self {
        Self { order, fi, fj }
    }
}

/// Summary of the CDF values at one point, shared by every moment-family
/// output.
#[derive(Debug, Clone, Copy)]
pub struct MomentSummary {
    pub min_i: f64,
    pub max_i: f64,
    pub min_j: f64,
    pub max_j: f64,
    pub sum_i: f64,
    pub sum_j: f64,
}

impl MomentSummary {
    pub fn from_values(values: &[[f64; 2]]) -> Self {
        let mut s = MomentSummary {
            min_i: f64::INFINITY,
            max_i: f64::NEG_INFINITY,
            min_j: f64::INFINITY,
            max_j: f64::NEG_INFINITY,
            sum_i: 0.0,
            sum_j: 0.0,
        };
        for &[a, b] in values {
            s.min_i = s.min_i.min(a);
            s.max_i = s.max_i.max(a);
            s.min_j = s.min_j.min(b);
            s.max_j = s.max_j.max(b);
            s.sum_i += a;
            s.sum_j += b;
        }
        s
    }

    pub fn identified(&self, m: usize) -> f64 {
        comonotone_mass(self.min_j, self.max_i) + signed(m, comonotone_mass(self.min_i, self.max_j))
    }

    /// `(lower, upper)` integrands for order `m`.
    ///
    /// Each Fréchet lower value is capped by the matching comonotone value
    /// (an identity in exact arithmetic), which keeps
    /// `lower <= identified <= upper` exact under rounding.
    pub fn bounds(&self, m: usize) -> (f64, f64) {
        let t_ij = comonotone_mass(self.min_j, self.max_i);
        let t_ji = comonotone_mass(self.min_i, self.max_j);
        let l_ij = frechet_lower(self.sum_j, self.sum_i, m).min(t_ij);
        let l_ji = frechet_lower(self.sum_i, self.sum_j, m).min(t_ji);
        let u_ij = frechet_upper(self.min_j, self.max_i);
        let u_ji = frechet_upper(self.min_i, self.max_j);
        if m % 2 == 0 {
            (l_ij + l_ji, u_ij + u_ji)
        } else {
            (l_ij - u_ji, u_ij - l_ji)
        }
    }
}

impl<C: ConditionalCdf> Integrand for MomentIntegrand<'_, C> {
    type Coordinate = [f64; 2];

    fn dimension(&self) -> usize {
        self.order
    }

    fn outputs(&self) -> usize {
        3
    }

    #[inline]
    fn coordinate(&self, _axis: usize, y: f64) -> [f64; 2] {
        [self.fi.prob_below(y), self.fj.prob_below(y)]
    }

    #[inline]
    fn combine(&self, coords: &[[f64; 2]], out: &mut [f64]) {
        let s = MomentSummary::from_values(coords);
        let (lower, upper) = s.bounds(self.order);
        out[IDENTIFIED] = s.identified(self.order);
        out[LOWER] = lower;
        out[UPPER] = upper;
    }
}

/// Which Fréchet function a [`FrechetIntegrand`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrechetSide {
    Lower,
    Upper,
}

/// `l(y; i, j)` or `u(y; i, j)` as a standalone scalar integrand.
pub struct FrechetIntegrand<'a, C> {
    order: usize,
    side: FrechetSide,
    fi: &'a C,
    fj: &'a C,
}

impl<'a, C: ConditionalCdf> FrechetIntegrand<'a, C> {
    pub fn new(order: usize, side: FrechetSide, fi: &'a C, fj: &'a C) -> Self {
        Self { order, side, fi, fj }
    }
}

impl<C: ConditionalCdf> Integrand for FrechetIntegrand<'_, C> {
    type Coordinate = [f64; 2];

    fn dimension(&self) -> usize {
        self.order
    }

    #[inline]
    fn coordinate(&self, _axis: usize, y: f64) -> [f64; 2] {
        [self.fi.prob_below(y), self.fj.prob_below(y)]
    }

    #[inline]
    fn combine(&self, coords: &[[f64; 2]], out: &mut [f64]) {
        let s = MomentSummary::from_values(coords);
        out[0] = match self.side {
            FrechetSide::Lower => frechet_lower(s.sum_j, s.sum_i, self.order).min(comonotone_mass(s.min_j, s.max_i)),
            FrechetSide::Upper => frechet_upper(s.min_j, s.max_i),
        };
    }
}

/// The pair `(l, u)` of Fréchet integrands for order `m` and arms `(i, j)`.
pub fn frechet_integrands<'a, C: ConditionalCdf>(
    order: usize,
    fi: &'a C,
    fj: &'a C,
) -> (FrechetIntegrand<'a, C>, FrechetIntegrand<'a, C>) {
    (
        FrechetIntegrand::new(order, FrechetSide::Lower, fi, fj),
        FrechetIntegrand::new(order, FrechetSide::Upper, fi, fj),
    )
}

/// CDF values at a point of the product integrands: `a = F_i(y_1)`,
/// `b = F_j(y_1)`, `c = F_k(y_2)`, `d = F_h(y_2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductValues {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// `(l, t, u)` for the event `{Y_q < y_1 <= Y_p, Y_s < y_2 <= Y_r}` given
/// `p = F_p(y_1)`, `q = F_q(y_1)`, `r = F_r(y_2)`, `s = F_s(y_2)`: Fréchet
/// lower bound, comonotone probability and Fréchet upper bound.
#[inline]
fn product_term(p: f64, q: f64, r: f64, s: f64) -> (f64, f64, f64) {
    let t = comonotone_mass(q.min(s), p.max(r));
    let u = q.min(s).min(1.0 - p.max(r));
    let l = (q - p + s - r - 1.0).max(0.0).min(t);
    (l, t, u)
}

impl ProductValues {
    fn terms(&self) -> [(f64, f64, f64); 4] {
        let ProductValues { a, b, c, d } = *self;
        [
            product_term(a, b, c, d),
            product_term(b, a, c, d),
            product_term(a, b, d, c),
            product_term(b, a, d, c),
        ]
    }

    /// Signed sum of the four comonotone probabilities.
    pub fn identified(&self) -> f64 {
        let [t1, t2, t3, t4] = self.terms().map(|x| x.1);
        t1 - t2 - t3 + t4
    }

    /// `(lower, upper)` integrands.
    pub fn bounds(&self) -> (f64, f64) {
        let [x1, x2, x3, x4] = self.terms();
        (x1.0 - x2.2 - x3.2 + x4.0, x1.2 - x2.0 - x3.0 + x4.2)
    }
}

/// Identified value and Fréchet bounds of `E[(Y_i - Y_j)(Y_k - Y_h)]`, a
/// two-dimensional integrand with `y_1` paired with `(i, j)` and `y_2` with
/// `(k, h)`.
pub struct ProductIntegrand<'a, C> {
    fi: &'a C,
    fj: &'a C,
    fk: &'a C,
    fh: &'a C,
}

impl<'a, C: ConditionalCdf> ProductIntegrand<'a, C> {
    pub fn new(fi: &'a C, fj: &'a C, fk: &'a C, fh: &'a C) -> Self {
        Self { fi, fj, fk, fh }
    }
}

impl<C: ConditionalCdf> Integrand for ProductIntegrand<'_, C> {
    type Coordinate = [f64; 2];

    fn dimension(&self) -> usize {
        2
    }

    fn outputs(&self) -> usize {
        3
    }

    #[inline]
    fn coordinate(&self, axis: usize, y: f64) -> [f64; 2] {
        if axis == 0 {
            [self.fi.prob_below(y), self.fj.prob_below(y)]
        } else {
            [self.fk.prob_below(y), self.fh.prob_below(y)]
        }
    }

    #[inline]
    fn combine(&self, coords: &[[f64; 2]], out: &mut [f64]) {
        let v = ProductValues {
            a: coords[0][0],
            b: coords[0][1],
            c: coords[1][0],
            d: coords[1][1],
        };
        let (lower, upper) = v.bounds();
        out[IDENTIFIED] = v.identified();
        out[LOWER] = lower;
        out[UPPER] = upper;
    }
}
