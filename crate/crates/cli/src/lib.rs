//! File formats and the `unisim` command line.

pub mod cli;
pub mod io;

pub use cli::{run_cli, CliOutput};
pub use io::{parse_matrix, IoError, ReportFile};
