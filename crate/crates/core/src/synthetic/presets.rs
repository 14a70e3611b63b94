//! Named models: the two simulation designs and the three worked examples.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{NoiseLaw, ScmSpec};
use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// `Y = -(X + 1) U 1(XU >= 0)`, `X ~ Bern(0.8)`, `U ~ Unif(-1, 1)`.
    ScmA,
    /// `Y = X^2 U`, `X` uniform on `{-1, 0, 1}`, `U ~ Unif(0, 1)`.
    ScmB,
    /// `Y = X + U`: homogeneous effect.
    Example1,
    /// `Y = X (U + 1) + 1`: heterogeneous effect.
    Example2,
    /// `Y = X^2 (U + 1) + 1`: heterogeneous, nonlinear effect.
    Example3,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::ScmA,
        Preset::ScmB,
        Preset::Example1,
        Preset::Example2,
        Preset::Example3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::ScmA => "scm-a",
            Preset::ScmB => "scm-b",
            Preset::Example1 => "example-1",
            Preset::Example2 => "example-2",
            Preset::Example3 => "example-3",
        }
    }

    /// The model. The examples use `U ~ Unif(-1, 1)` and assign `X` uniformly
    /// over `{-1, 0, 1}`, except example 2, which uses `{0, 1, 2}`: its
    /// response decreases in `U` at `X = -1` and increases at `X >= 1`, so
    /// including `X = -1` would break monotonicity.
    pub fn spec(self) -> ScmSpec {
        let sym = NoiseLaw::Uniform { lo: -1.0, hi: 1.0 };
        let built = match self {
            Preset::ScmA => ScmSpec::new("scm-a", vec![(0, 0.2), (1, 0.8)], sym, |x, u| {
                let x = x as f64;
                if x * u >= 0.0 {
                    -(x + 1.0) * u
                } else {
                    0.0
                }
            }),
            Preset::ScmB => ScmSpec::uniform_arms("scm-b", &[-1, 0, 1], NoiseLaw::Uniform { lo: 0.0, hi: 1.0 }, |x, u| {
                (x * x) as f64 * u
            }),
            Preset::Example1 => ScmSpec::uniform_arms("example-1", &[-1, 0, 1], sym, |x, u| x as f64 + u),
            Preset::Example2 => {
                ScmSpec::uniform_arms("example-2", &[0, 1, 2], sym, |x, u| x as f64 * (u + 1.0) + 1.0)
            }
            Preset::Example3 => {
                ScmSpec::uniform_arms("example-3", &[-1, 0, 1], sym, |x, u| (x * x) as f64 * (u + 1.0) + 1.0)
            }
        };
        built.expect("preset specs are valid")
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Validation(format!("unknown preset `{s}` (expected one of scm-a, scm-b, example-1, example-2, example-3)")))
    }
}

/// Analytic values of the preset models.
pub mod truth {
    /// SCM A has individual effect `Y_1 - Y_0 = -|U|`.
    pub const SCM_A_MOMENTS: [(u32, f64); 4] = [(1, -0.5), (2, 1.0 / 3.0), (3, -0.25), (4, 0.2)];
    pub const SCM_A_ATE: f64 = -0.5;
    /// `E[U^2] - E[|U|]^2` for `U ~ Unif(-1, 1)`.
    pub const SCM_A_VARIANCE: f64 = 1.0 / 12.0;
    /// SCM B: `E[(Y_1 - Y_0)(Y_0 - Y_{-1})] = -E[U^2]` with `U ~ Unif(0, 1)`.
    pub const SCM_B_PRODUCT: f64 = -1.0 / 3.0;
    /// `E[U^2]` for `U ~ Unif(-1, 1)`.
    pub const UNIFORM_SECOND_MOMENT: f64 = 1.0 / 3.0;
    /// `-E[(U + 1)^2]` for `U ~ Unif(-1, 1)`.
    pub const EXAMPLE_3_PRODUCT: f64 = -4.0 / 3.0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identify::ArmPair;
    use crate::synthetic::simulate;

    #[test]
    fn names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
            assert_eq!(p.spec().name, p.name());
        }
        assert!("scm-c".parse::<Preset>().is_err());
    }

    #[test]
    fn scm_a_range_and_frequency() {
        let t = simulate(&Preset::ScmA.spec(), 10_000, 5).unwrap();
        assert!(t.rows().iter().all(|r| (-2.0..=1.0).contains(&r.y)));
        let frac = t.arm_count(1) as f64 / t.len() as f64;
        assert!((frac - 0.8).abs() < 0.02, "{frac}");
    }

    #[test]
    fn scm_b_range() {
        let t = simulate(&Preset::ScmB.spec(), 3000, 5).unwrap();
        assert!(t.rows().iter().all(|r| (0.0..=1.0).contains(&r.y)));
        assert!(t.outcomes(0).unwrap().iter().all(|&y| y == 0.0));
    }

    #[test]
    fn discretized_truths() {
        let a = Preset::ScmA.spec().discretize(2000).unwrap();
        let arms = ArmPair::new(1, 0).unwrap();
        for (m, v) in truth::SCM_A_MOMENTS {
            assert!((a.exact_moment(arms, m, false) - v).abs() < 1e-5, "m={m}");
        }
        assert!((a.exact_moment(arms, 2, true) - truth::SCM_A_VARIANCE).abs() < 1e-5);
        let b = Preset::ScmB.spec().discretize(2000).unwrap();
        let p = b.exact_product_moment(arms, ArmPair::new(0, -1).unwrap(), false);
        assert!((p - truth::SCM_B_PRODUCT).abs() < 1e-5);
        assert!(Preset::ALL.iter().all(|p| p.spec().discretize(50).unwrap().is_monotone()));
    }
}
