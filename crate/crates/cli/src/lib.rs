//! Problem generation, file formats and experiment drivers behind the
//! `tucker-rtr` command.

pub mod error;
pub mod experiments;
pub mod problem;
pub mod tensor_file;
pub mod trace_csv;

pub use error::{CliError, CliResult};
pub use problem::{generate_problem, held_out_split, Problem, ProblemSpec, Sampling, TruthKind};
pub use tensor_file::{read_tensor_file, read_tensor_path, write_tensor_file};
pub use trace_csv::{read_trace, write_trace, TraceRow, TRACE_HEADER, TRACE_SCHEMA_VERSION};
