//! Experiment runner for the Benjamin-family solvers.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod registry;
pub mod runner;
pub mod snapshot;
