//! Command line and HTTP front end for `treeflip`.

pub mod commands;
pub mod service;
