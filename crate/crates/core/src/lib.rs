pub mod arith;
pub mod fans;
pub mod lp;
pub mod polytope;
pub mod moment;
pub mod examples;
pub mod cli;
