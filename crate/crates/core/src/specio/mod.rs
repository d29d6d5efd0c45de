//! Text DSL, canonical printing and report emission.

mod parse;
mod print;
mod report;

pub use parse::{parse_matrix, parse_op, parse_value, Document, ParseContext, Value};
pub use print::{print_const_matrix, print_matrix, print_op, print_ratfun};
pub use report::{emit_report, Certificate, Format, Report, Status};
