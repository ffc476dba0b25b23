pub mod arith;
pub mod field;
pub mod cyclotomic;
pub mod intpoly;
pub mod trace;
pub mod cache;
pub mod local_set;
pub mod formula;
pub mod groups;
pub mod sieve;
