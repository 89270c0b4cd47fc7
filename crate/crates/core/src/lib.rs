//! Exact computation of instanton prepotentials of affine Toda operators.

pub mod arith;
pub mod lattice;
pub mod nekrasov;
pub mod period;
pub mod spectral;
pub mod toda;
pub mod whittaker;
