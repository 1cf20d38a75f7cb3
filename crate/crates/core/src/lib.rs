//! Exact tooling for contraction metrics, fixed-point iteration and the
//! Banach / CLS total search problems.
//!
//! * [`circuit`]: arithmetic circuits over the rationals.
//! * [`metrics`]: metric-axiom, Lipschitz and contraction checks with witnesses.
//! * [`iteration`]: the basic iterative procedure and iteration budgets.
//! * [`converse`]: contraction metric synthesis on finite spaces.
//! * [`cls`]: CLS-Local / Banach / ContractionMap instances and verifiers.
//! * [`reduce`]: reductions between Banach and CLS-Local with solution back-mapping.
//! * [`power`]: power iteration and its eigen-metric.

pub mod bounds;
pub mod circuit;
pub mod cls;
pub mod converse;
pub mod iteration;
pub mod metrics;
pub mod point;
pub mod power;
pub mod rational;
pub mod reduce;

pub use circuit::{parse_circuit, print_circuit, BinOp, Circuit, CircuitBuilder, CircuitError, Gate};
pub use point::Point;
pub use rational::{int, rat, Rational};
pub use cls::{BanachInstance, ClsLocalInstance, ContractionMapInstance, Instance, Solution, SolutionKind, Verdict};
pub use converse::{synthesize, FiniteSelfMap, SynthesizedMetric};
pub use iteration::{run_bip, IterationTrace, StopReason};
pub use metrics::{Distance, PointFn, PointMap};
pub use power::SpectralSystem;
pub use reduce::{Direction, HardnessOptions, ReductionArtifacts};
