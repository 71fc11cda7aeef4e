//! Generator and engine for murder-mystery adventure games built from
//! linked-data knowledge graphs.
//!
//! The generation pipeline runs: [`ingest`] → [`suspects`] → [`paths`] →
//! [`assemble`] (using [`dialog`]) → [`engine::oracle`]. The resulting
//! [`game::GameDefinition`] is played through [`engine`].

pub mod assemble;
pub mod dialog;
pub mod engine;
pub mod game;
pub mod ingest;
pub mod kg;
pub mod paths;
pub mod pipeline;
pub mod rng;
pub mod suspects;
