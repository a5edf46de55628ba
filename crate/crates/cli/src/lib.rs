//! Expression language and command interpreter for the perfect closure.

pub mod parser;
pub mod session;

pub use parser::{parse, Expr, ExprKind, ParseError, Scope, Span};
pub use session::{CliError, EvalError, Reply, Session, Value};
