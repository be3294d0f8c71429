//! Dynamic information-flow monitor for a small While language, with
//! no-sensitive-upgrade and permissive-upgrade strategies over finite
//! security lattices, plus an executable noninterference harness.

pub mod corpus;
pub mod labels;
pub mod lang;
pub mod lattice;
pub mod monitor;
pub mod nicheck;

pub use labels::{Label, LabelFamily, Level, Pc, ProdLabel};
pub use lang::{parse_program, print_program, Expr, Stmt};
pub use lattice::{Elem, LatticeSpec};
pub use monitor::{LabeledValue, Monitor, Outcome, Status, Store, Strategy};
