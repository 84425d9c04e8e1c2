//! First-order methods for convex minimization under Hölder smoothness and
//! Hölder growth, with rate formulas, rate lifting, restart sums, and a
//! one-dimensional certification of the auxiliary envelope used to lift
//! rates from growth-bounded to general problems.

pub mod linalg;
pub mod problems;
pub mod rates;
pub mod solvers;
pub mod envelope;
pub mod harness;
