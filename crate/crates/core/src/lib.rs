//! Core library for structured performance evaluation studies.
//!
//! The crate is organised around the lifecycle of one evaluation:
//!
//! - [`artefact`] loads and queries a domain knowledge bundle (taxonomy,
//!   metrics catalogue, factor framework, blueprints, templates).
//! - [`engine`] drives a project through the ten gated workflow steps, with
//!   an iteration back-edge from analysis to design, an append-only journal
//!   and run-to-run repeatability comparison.
//! - [`doe`] builds full factorial run plans and sizes replicates by
//!   simulated power.
//! - [`runner`] executes a run plan through an external benchmark adapter.
//! - [`analysis`] computes descriptive statistics, one-way ANOVA, two-level
//!   factorial effects, Pareto rankings, boosting indices and chart series.
//! - [`reporting`] answers requirement questions, renders reports and
//!   produces replayable evaluation templates.

pub mod analysis;
pub mod artefact;
pub mod digest;
pub mod doe;
pub mod engine;
pub mod par;
pub mod reporting;
pub mod runner;
pub mod sample;

/// Version tag written into every persisted document.
pub const SCHEMA_VERSION: u32 = 1;
