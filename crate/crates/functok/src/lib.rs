//! Functional-token function calling at desk scale.
//!
//! Each callable API in a [`registry::Registry`] is bound to a dedicated
//! vocabulary token `<nexa_i>`. A tiny causal language model
//! ([`model`]) learns to select the token and emit call arguments directly,
//! stopping at `<nexa_end>`; a TF-IDF retrieval baseline ([`retrieval`])
//! provides the comparison arm. [`datagen`] synthesizes verified training
//! data and [`bench`] measures accuracy, prompt-token counts, and latency
//! for both pipelines.

pub mod bench;
pub mod datagen;
pub mod grammar;
pub mod model;
pub mod prompts;
pub mod registry;
pub mod retrieval;
pub mod tokenizer;
