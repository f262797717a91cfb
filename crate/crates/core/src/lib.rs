pub mod cli;
pub mod diagram;
pub mod evaluator;
pub mod invariants;
pub mod skein;
pub mod sum;
pub mod verify;
pub mod wrt;
