//! S-box tables, bias arithmetic, trail search and avalanche measurement.

pub mod avalanche;
pub mod complexity;
pub mod tables;
pub mod trails;
