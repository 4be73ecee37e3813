pub mod analytics;
pub mod arnold;
pub mod cli;
pub mod genfunc;
pub mod precision;
pub mod real;
pub mod tree;
