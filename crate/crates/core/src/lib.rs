//! Certifying geometric Picard number one for explicit quartic K3 surfaces
//! over the rationals, by reduction modulo small primes.

pub mod arith;
pub mod cli;
pub mod counter;
pub mod genus1;
pub mod gf;
pub mod json;
pub mod lattice;
pub mod poly;
pub mod quartic;
pub mod unity;
pub mod zeta;
