//! Retail analytics ML benchmark suite.
//!
//! A self-contained benchmark built around a seeded synthetic retail dataset:
//! native implementations of clustering, classification, frequent-itemset
//! mining and topic modeling, five end-to-end workload pipelines (Q26, Q28,
//! M1, M2, M3), and a repetition-based timing harness with CSV/markdown
//! reporting.

pub mod datagen;
pub mod error;
pub mod fpm;
pub mod harness;
pub mod mlcore;
pub mod rng;
pub mod topics;
pub mod workloads;
pub mod textkit;

pub use error::{Error, Result};
