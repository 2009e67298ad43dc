//! Driver for the topograph pipeline: configuration, batch commands and the
//! randomized self-test behind `topograph check`.

pub mod commands;
pub mod config;
pub mod selftest;
