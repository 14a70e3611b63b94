//! Step-function CDFs evaluated with the strict inequality `P(Y < y)`.

/// Anything that can report `P(Y < y)` for a real query point.
pub trait ConditionalCdf: Sync {
    fn prob_below(&self, y: f64) -> f64;
}

/// A CDF given by a closure, e.g. a closed-form population law.
pub struct FnCdf<F>(pub F);

impl<F: Fn(f64) -> f64 + Sync> ConditionalCdf for FnCdf<F> {
    #[inline]
    fn prob_below(&self, y: f64) -> f64 {
        (self.0)(y)
    }
}

/// A right-open step CDF `y -> P(Y < y)` over finitely many atoms.
///
/// Lookups go through a bucket index over `[min atom, max atom]` and then walk
/// to the exact partition point, so results always equal a binary search.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCdf {
    atoms: Vec<f64>,
    /// `below[k]` is the mass of `atoms[..k]`; `below[atoms.len()] == 1`.
    below: Vec<f64>,
    buckets: Vec<u32>,
    bucket_scale: f64,
}

impl StepCdf {
    /// Equal-weight atoms, i.e. an empirical CDF. `values` need not be sorted.
    ///
    /// # Panics
    /// Panics if `values` is empty or holds a NaN.
    pub fn empirical(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "empirical CDF needs at least one value");
        let mut atoms = values.to_vec();
        atoms.sort_by(|a, b| a.partial_cmp(b).expect("NaN in CDF support"));
        let n = atoms.len() as f64;
        let mut below: Vec<f64> = (0..atoms.len()).map(|k| k as f64 / n).collect();
        below.push(1.0);
        Self::with_masses(atoms, below)
    }

    /// Weighted atoms; weights are normalised to total mass one and
    /// zero-weight atoms are dropped.
    ///
    /// # Panics
    /// Panics if no atom has positive weight.
    pub fn weighted(points: &[(f64, f64)]) -> Self {
        let mut pts: Vec<(f64, f64)> = points.iter().copied().filter(|p| p.1 > 0.0).collect();
        assert!(!pts.is_empty(), "weighted CDF needs positive mass");
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("NaN in CDF support"));
        let total: f64 = pts.iter().map(|p| p.1).sum();
        let mut below = Vec::with_capacity(pts.len() + 1);
        let mut acc = 0.0;
        for p in &pts {
            below.push((acc / total).min(1.0));
            acc += p.1;
        }
        below.push(1.0);
        Self::with_masses(pts.into_iter().map(|p| p.0).collect(), below)
    }

    fn with_masses(atoms: Vec<f64>, below: Vec<f64>) -> Self {
        let lo = atoms[0];
        let hi = atoms[atoms.len() - 1];
        let (buckets, bucket_scale) = if hi > lo {
            let count = (2 * atoms.len()).clamp(16, 1 << 16);
            let scale = count as f64 / (hi - lo);
            let buckets = (0..count)
                .map(|b| {
                    let start = lo + b as f64 / scale;
                    atoms.partition_point(|&a| a < start) as u32
                })
                .collect();
            (buckets, scale)
        } else {
            (Vec::new(), 0.0)
        };
        Self {
            atoms,
            below,
            buckets,
            bucket_scale,
        }
    }

    /// Sorted support points (repeated for empirical CDFs with ties).
    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    /// Number of atoms strictly below `y`.
    pub fn count_below(&self, y: f64) -> usize {
        let n = self.atoms.len();
        let lo = self.atoms[0];
        if !(y > lo) {
            return 0;
        }
        if y > self.atoms[n - 1] {
            return n;
        }
        let mut idx = if self.buckets.is_empty() {
            0
        } else {
            let b = (((y - lo) * self.bucket_scale) as usize).min(self.buckets.len() - 1);
            self.buckets[b] as usize
        };
        while idx > 0 && self.atoms[idx - 1] >= y {
            idx -= 1;
        }
        while idx < n && self.atoms[idx] < y {
            idx += 1;
        }
        idx
    }

    pub fn mean(&self) -> f64 {
        self.atoms
            .iter()
            .enumerate()
            .map(|(k, a)| a * (self.below[k + 1] - self.below[k]))
            .sum()
    }

    /// The same law translated by `offset`.
    pub fn shifted(&self, offset: f64) -> Self {
        let atoms = self.atoms.iter().map(|a| a + offset).collect();
        Self::with_masses(atoms, self.below.clone())
    }
}

impl ConditionalCdf for StepCdf {
    #[inline]
    fn prob_below(&self, y: f64) -> f64 {
        self.below[self.count_below(y)]
    }
}
