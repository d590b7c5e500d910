//! Joint argument annotation graphs: data model, validation, polarity
//! propagation and corpus statistics.

mod model;
mod polarity;
mod stats;
mod validate;

pub use model::{
    EdgeTarget, EdgeType, JaasCorpus, JaasDocument, JaasEdge, JaasNode, Polarity, Role, SourceCorpus,
};
pub use polarity::{propagate_polarity, propagate_polarity_with, PolarityConflict, Propagation, RoleChange};
pub use stats::{corpus_stats, propagation_delta, CorpusStats, PropagationDelta, RoleCount};
pub use validate::{validate_graph, Rule, ValidationReport, Violation};
