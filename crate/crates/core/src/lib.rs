//! Multi-criteria ranking of candidate locations: PROMETHEE I/II flows,
//! ELECTRE outranking, hard-condition screening, portfolio objectives and a
//! genetic search over criterion profiles scored by net flow.

pub mod cli;
pub mod electre;
pub mod error;
pub mod ga;
pub mod io;
pub mod model;
pub mod objectives;
pub mod promethee;
pub mod report;
pub mod screening;

pub use error::{Error, Result};
pub use model::{Alternative, Criterion, DecisionMatrix, Direction, Interval, PreferenceFunction};
