//! Canonicity engine: a dependent type theory kernel, a finite gluing
//! playground, a computable canonicity model and a cost-aware CBPV model.

pub mod calf;
pub mod check;
pub mod driver;
pub mod gen;
pub mod model;
pub mod nbe;
pub mod phase;
pub mod report;
pub mod surface;
pub mod syntax;
