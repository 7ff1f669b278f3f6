//! Random directed network models.

mod dpa;
mod er;
mod fenwick;

pub use dpa::{gen_dpa, read_scenarios, scenario_of_edge, write_scenarios, DpaGraph, DpaParams, Scenario};
pub use er::gen_er;
pub use fenwick::Fenwick;
