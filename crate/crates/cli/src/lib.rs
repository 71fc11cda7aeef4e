//! Command implementations and the HTTP play service behind the `mystery`
//! binary.

pub mod commands;
pub mod server;
pub mod view;

pub use commands::{cmd_generate, cmd_validate, exit, CliError, GenerateArgs};
pub use server::{router, AppState};
