pub mod analysis;
pub mod catalog;
pub mod chain;
pub mod clifford;
pub mod ddq;
pub mod expr;
pub mod known;
pub mod numerics;
