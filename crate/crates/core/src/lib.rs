pub mod complex;
pub mod corpus;
pub mod error;
pub mod exactla;
pub mod exec;
pub mod field;
pub mod io;
pub mod monodromy;
pub mod mvss;
pub mod periodic;
pub mod persistence;
pub mod report;
pub mod toroidal;

pub use error::{Error, Result};
pub use exec::Exec;
pub use field::{Field, FieldSpec, Fp, Rationals};
