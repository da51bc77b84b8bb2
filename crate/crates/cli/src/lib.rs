//! Report assembly for the command-line front end: envelope types, value
//! formatting, space loading, the five commands, and the full check suite.

pub mod commands;
pub mod criteria;
pub mod report;
pub mod spaces;
