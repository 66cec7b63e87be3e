//! Invariant Kähler-Berwald Finsler metrics on the four classical Cartan
//! domains: evaluation, automorphisms, curvature, comparison with the
//! Carathéodory metric, and randomized Schwarz-lemma checks.

pub mod automorphisms;
pub mod comparison;
pub mod curvature;
pub mod diff;
pub mod domains;
pub mod error;
pub mod metrics;
pub mod norms;
pub mod numkernel;
pub mod profile;
pub mod schwarz;

pub use automorphisms::{HoloMap, MapBody};
pub use comparison::{GaugeMetric, PoincareDisc, SandwichReport};
pub use curvature::CurvatureReport;
pub use domains::{DomainKind, DomainSpec, TangentPoint};
pub use error::{FinslerError, Result};
pub use metrics::{FundamentalTensor, MetricSpec};
pub use norms::{GFamily, NormBounds, NormSpec, PhiFamily};
pub use numkernel::{ComplexMatrix, HermitianSpectrum, PowerSums, C64};
pub use schwarz::SchwarzReport;
