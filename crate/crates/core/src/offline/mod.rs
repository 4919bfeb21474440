//! Exact offline machinery: the schedulability graph and its maximum-weight
//! matchings, oblivious schedules `O_t`, and conforming clairvoyant schedules.

mod clairvoyant;
mod graph;
pub mod matching;
mod oblivious;

pub use clairvoyant::{
    conforming_clairvoyant, layout_in_order, reorder_with_h_first, ClairvoyantSchedule,
    ConformingError,
};
pub use graph::{build_graph, opt_schedule, SchedulabilityGraph};
pub use oblivious::{oblivious_schedule, select_e_h, ObliviousSchedule};
