//! Flow graph of an architecture, its decomposition into stars and cyclic
//! unions, and the deadlock checks built on top of them.

mod checks;
mod conformity;
mod graph;
mod reduce;
mod report;

use thiserror::Error;

use crate::elaboration::ElabError;
use crate::kernel::KernelError;

pub use checks::{
    check_compatibility, check_interoperability, compatibility_sides, interoperability_sides, local_semantics,
    CheckKind, CheckOutcome, Sides,
};
pub use conformity::{check_behavioral_conformity, label_map, system_semantics, ConformityReport};
pub use graph::{build_flow_graph, decompose, to_dot, CyclicUnion, Decomposition, FlowGraph, Star};
pub use reduce::{
    direct_system, verify_deadlock_by_reduction, verify_deadlock_direct, CheckRecord, Conclusion, ConditionRecord,
    DecompositionView, DirectReport, DirectVerdict, LocalRecord, ReductionReport, Status,
};
pub use report::{Report, Verdict, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("`{k}` and `{cj}` are not attached to each other")]
    NotAttached { k: String, cj: String },
    #[error("`{cj}` does not belong to the given set of instances")]
    NotMember { cj: String },
    #[error("interoperability needs a set of at least 3 instances, got {0}")]
    CycleTooSmall(usize),
    #[error(transparent)]
    Elab(#[from] ElabError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

impl TopologyError {
    pub fn is_state_limit(&self) -> bool {
        match self {
            TopologyError::Elab(e) => e.is_state_limit(),
            TopologyError::Kernel(e) => matches!(e, KernelError::StateLimit { .. }),
            _ => false,
        }
    }
}
