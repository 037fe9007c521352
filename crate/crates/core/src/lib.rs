pub mod choice;
pub mod cli;
pub mod generate;
pub mod io;
pub mod laws;
pub mod model;
pub mod scalar;
pub mod solve;
pub mod tree;

/// Exact rational scalar used by the CLI, generators and law checkers.
pub type Rational = num_rational::BigRational;
