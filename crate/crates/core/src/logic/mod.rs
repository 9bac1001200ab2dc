//! Finite types, a small formula language, and the syntactic operations on it.

pub mod cauchy;
pub mod classify;
pub mod formula;
pub mod majorant;
pub mod parser;
pub mod types;

pub use cauchy::{cauchy_hat, CauchyHat};
pub use classify::{classify, classify_with, skolem_normal_form, skolemize, Classification, DeltaSentence};
pub use formula::{BinOp, Binder, Constant, Formula, Quantifier, Relation, Term};
pub use majorant::{cantor_pair, check_majorizes, check_preceq, code_real, majorant_m, GroundValue};
pub use parser::{parse_formula, parse_term};
pub use types::{hat_type, is_admissible, is_small, parse_type, FiniteType};
