//! Argumentative-unit polarity classification: a common argument-graph
//! format, corpus converters, feature extraction, learners and evaluation.

pub mod convert;
pub mod eval;
pub mod features;
pub mod jaas;
pub mod learners;
pub mod seed;
pub mod textprep;
