//! File formats, experiment drivers and command implementations behind the
//! `nnsp` binary.

pub mod commands;
pub mod experiment;
pub mod io;
pub mod report;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const INPUT_ERROR: u8 = 1;
    pub const REFUTED: u8 = 2;
    pub const NOT_CONVERGED: u8 = 3;
}
