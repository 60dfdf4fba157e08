//! Command line and HTTP front end.

pub mod api;
pub mod commands;
