//! Exact verification of quantum-group R-matrices, FRT generator matrices and
//! double-bosonization presentations over `Q[q^{1/L}, q^{-1/L}]`.

pub mod cli;
pub mod dbos;
pub mod frt;
pub mod repcat;
pub mod rmatrix;
pub mod scalar;
pub mod tensor;
