//! Library surface of the CLI: flag/config plumbing and the versioned
//! artifact schemas, shared with the integration tests.

pub mod args;
pub mod artifact;
pub mod csvout;
