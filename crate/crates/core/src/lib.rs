//! Moments, central moments, product moments, covariance and correlation of
//! causal effects estimated from observational samples.
//!
//! Two families of estimators are provided. Under exogeneity and monotonicity
//! of the outcome response the quantities are point identified and estimated by
//! plugging empirical conditional CDFs into integral formulas
//! ([`identify`]). Under exogeneity alone they are bounded with Fréchet
//! inequalities ([`bounds`]). All integrals are evaluated by seeded Monte
//! Carlo ([`quadrature`]); [`synthetic`] holds simulators and an exact oracle
//! for discrete structural causal models.

pub mod bootstrap;
pub mod bounds;
pub mod conditional;
pub mod data;
pub mod estimate;
pub mod error;
pub mod identify;
pub mod integrands;
pub mod quadrature;
pub mod report;
pub mod reproduce;
pub mod rng;
pub mod synthetic;

pub use data::{Arm, ConditionalCdf, DomainBounds, EmpiricalConditionalCdf, ObservationTable};
pub use error::{Error, Result};
pub use identify::ArmPair;
pub use quadrature::{IntegrationConfig, McEstimate, McOptions, Sampling, SamplingPlan};
