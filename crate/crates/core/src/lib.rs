pub mod address;
mod decimal;
pub mod error;
pub mod numtheory;
pub mod markov_tree;
pub mod report;
pub mod cohn;
pub mod farey;
pub mod criterion;
pub mod verify;
