//! Knowledge-base engine for the space situational awareness (SSA) domain.
//!
//! The crate is organized around a pipeline:
//!
//! - [`model`] — typed in-memory knowledge base (TBox + ABox) with identity
//!   and well-formedness rules
//! - [`dsl`] — parser and canonical serializer for the line-oriented `.ssao`
//!   ontology definition language
//! - [`reasoner`] — forward-chaining materialization of the deductive
//!   closure plus integrity-constraint checking
//! - [`tle`] — bit-exact NORAD two-line element set parsing, validation and
//!   serialization, with derived orbit geometry
//! - [`catalog`] — TLE catalog ingestion as annotated ontology individuals,
//!   orbit regime classification, and cross-catalog identity reconciliation
//! - [`query`] — read-only asks, instance retrieval and pattern matching
//!   over a materialized closure

pub mod catalog;
pub mod dsl;
pub mod model;
pub mod query;
pub mod reasoner;
pub mod tle;
