//! Parsing, process-algebraic semantics and compositional deadlock
//! verification for PADL architectural descriptions.
//!
//! The pipeline runs front to back: [`frontend`] turns source text into a
//! validated architecture, [`elaboration`] translates it into labeled
//! transition systems built with the [`kernel`] operators, [`equivalence`]
//! decides weak bisimilarity, and [`topology`] drives the compatibility,
//! interoperability and reduction checks.

pub mod elaboration;
pub mod equivalence;
pub mod frontend;
pub mod kernel;
pub mod topology;
