//! Translation of a validated architecture into process terms: or-rewrite,
//! implicit queues for asynchronous interactions, fresh synchronization
//! names and the interacting semantics of single elements and sets of them.

mod model;
mod names;
mod rewrite;
mod semantics;

use thiserror::Error;

use crate::kernel::KernelError;

pub use model::{insert_async_queues, AeiModel, Elaboration, Group, LocalInteraction, Party, QueueInstance};
pub use names::NameSets;
pub use rewrite::{copy_name, or_rewrite, OrPlan};
pub use semantics::{compose, Closure, Semantics, SemanticsRequest};

/// Default number of messages an implicit queue can hold.
pub const DEFAULT_CAPACITY: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElabError {
    #[error("queue capacity must be at least 1")]
    Capacity,
    #[error("fresh interaction name `{0}` clashes with an existing action")]
    NameClash(String),
    #[error("`{output}` and `{input}` have different numbers of attachments")]
    DependencyCount { output: String, input: String },
    #[error("in `{equation}`, dependent output `{output}` is not preceded by the input it depends on")]
    UnresolvedDependency { equation: String, output: String },
    #[error("unknown instance `{0}`")]
    UnknownAei(String),
    #[error("{0}")]
    Request(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

impl ElabError {
    pub fn is_state_limit(&self) -> bool {
        matches!(self, ElabError::Kernel(KernelError::StateLimit { .. }))
    }
}
