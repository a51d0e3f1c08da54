//! Differential evolution with pluggable opposition-based learning.
//!
//! The engine is DE/rand/1 with binomial, exponential or multiple
//! exponential crossover. An [`Opposition`] layer can be attached; the
//! stock [`OblStrategy`] covers classic OBL, quasi-opposition,
//! quasi-reflection, current-optimum and generalized opposition, and the
//! beta-distribution schemes BetaCOBL and iBetaCOBL with their diversity
//! driven (μ+λ)/(μ,λ) selection switch.
//!
//! ```
//! use obde::{run, DeConfig, OblConfig, OblStrategy, OblVariant, TestFunction};
//!
//! let f = TestFunction::from_name("shifted-sphere", 10, 7).unwrap();
//! let cfg = DeConfig { np: 20, budget_max: 20_000, seed: 1, ..DeConfig::default() };
//! let mut obl = OblStrategy::new(OblConfig::new(OblVariant::IBetaCobl)).unwrap();
//! let record = run(&cfg, &f, Some(&mut obl), &[]).unwrap();
//! assert!(record.nfes <= 20_000);
//! ```

pub mod bounds;
pub mod budget;
pub mod crossover;
pub mod de;
pub mod diversity;
pub mod error;
pub mod harness;
pub mod objective;
pub mod obl;
pub mod population;
pub mod rng;
pub mod stats;

pub use bounds::{clamp_to_bounds, random_point, Bounds};
pub use budget::EvaluationBudget;
pub use crossover::CrossoverKind;
pub use de::{run, DeConfig, PhaseCounts, RunRecord};
pub use diversity::DiversityKind;
pub use error::{Error, Result};
pub use objective::{BaseFunction, Evaluator, Problem, TestFunction};
pub use obl::{JumpInterval, JumpingPolicy, OblConfig, OblStrategy, OblVariant, Opposition};
pub use population::{Individual, Population};
pub use rng::{RandomSource, RngStream, RNG_VERSION};
pub use stats::{ComparisonVerdict, Symbol};
