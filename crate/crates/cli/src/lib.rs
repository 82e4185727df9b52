//! Pipeline commands behind the `covhess` binary.

pub mod commands;
pub mod config;
pub mod svg;
pub mod theorems;

use covhess_core::Error;

/// 3 for numerical failures, 2 for everything else (configuration, data, I/O).
pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        3
    } else {
        2
    }
}
