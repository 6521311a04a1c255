pub mod correlate;
pub mod eval;
pub mod judge;
pub mod validate;
