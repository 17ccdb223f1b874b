//! File formats, the example corpus and the command line for
//! [`geoconc_core`].

pub mod cli;
pub mod corpus;
pub mod format;
