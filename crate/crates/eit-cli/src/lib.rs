//! Engineering shell around the numerical core: configuration, file
//! formats, and the staged reconstruction pipeline. The `eit` binary is a
//! thin dispatcher over these modules.

pub mod config;
pub mod io;
pub mod pipeline;
