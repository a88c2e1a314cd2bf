//! Performance models, simulator and cost optimizer for dynamically
//! instantiated request-count-window caches.

// Negated float comparisons are used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod optimizer;
pub mod popularity;
pub mod rcw_approx;
pub mod rcw_exact;
pub mod simulator;
pub mod transient;
pub mod workload;

pub use error::{Error, Result};
pub use optimizer::{
    Infeasibility, Mode, OptimizationProblem, OptimizationResult, PolicyCurve, SearchGrid,
};
pub use popularity::{ZipfCatalog, EULER_GAMMA};
pub use rcw_approx::{ApproxRegime, ZipfCase};
pub use rcw_exact::{PolicyConfig, SteadyMetrics};
pub use simulator::{SimConfig, SimPolicy, SimReport, TransientBudget};
pub use transient::TransientMetrics;
pub use workload::{InstantiationWindow, ProfileShape, RateProfile};
