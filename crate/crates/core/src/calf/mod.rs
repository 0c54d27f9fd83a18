//! Cost-aware call-by-push-value: syntax, checking, evaluation and a
//! two-world Kripke model extracting cost and result.

pub mod check;
pub mod eval;
pub mod kripke;
pub mod syntax;
