//! Exact tools for parameterized linear differential systems: integrability
//! defects and flattening, Hermite reduction and telescopers, Picard–Fuchs
//! operators on genus-one curves, and rational solutions of operators.

pub mod exactalg;
pub mod difftower;
pub mod derham;
pub mod connection;
pub mod curve;
pub mod galois;
