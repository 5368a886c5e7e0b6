//! Exotic aromatic forests, their Hopf algebraic structures and the
//! stochastic order theory built on them.

pub mod elemdiff;
pub mod forest;
pub mod hopf;
pub mod series;
pub mod stochastic;
