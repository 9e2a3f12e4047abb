//! Exact engine for the k-color region select game on knot diagrams.

pub mod algebra;
pub mod diagram;
pub mod engine;
pub mod game;
pub mod structure;
pub mod catalog;
pub mod verify;
pub mod cli;
pub mod service;
