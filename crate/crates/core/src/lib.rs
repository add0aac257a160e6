//! Stable roommates with ties, incomplete lists and questionnaire-based
//! personalization.
//!
//! Instances are loaded from JSON with [`parse_instance`], extended with
//! criteria-derived preferences by [`personalize_instance`] and solved with
//! [`solve`]. [`oracle`] holds brute-force references for small inputs.

pub mod document;
pub mod encoding;
pub mod error;
pub mod generator;
pub mod instance;
pub mod matching;
pub mod objectives;
pub mod oracle;
pub mod personalization;
pub mod solver;
pub mod stability;

pub use document::{instance_from_doc, instance_to_doc, parse_instance, serialize_instance, InstanceDoc};
pub use error::{GeneratorError, InstanceError, MatchingError, ObjectiveError, OracleError, SolveError};
pub use instance::{
    completeness_degree, AgentId, AgentIndex, AgentProfile, Comparison, CriteriaSpec, Criterion, Instance,
    InstanceParts, PreferenceOrder,
};
pub use matching::{Matching, MatchingDoc};
pub use objectives::{objective_vector, ObjectiveConfig, ObjectiveLevel, ObjectiveVector};
pub use personalization::{extended_pref_list, personalize_instance};
pub use solver::{
    solve, solve_decision, solve_optimize, solve_with_progress, Mode, Outcome, ProgressEvent, SolveConfig,
    SolveResult, SolveStats,
};
pub use stability::{blocking_pairs, is_stable, BlockingPair};
