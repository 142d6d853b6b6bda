pub mod graphs;
pub mod numkernel;
pub mod models;
pub mod mle;
pub mod existence;
pub mod colored;
pub mod rankcriterion;
pub mod mldegree;
pub mod montecarlo;
