//! Small reference networks bundled with the crate.

use crate::error::Result;
use crate::graph::{load_edge_list, Graph, LoadOptions};

/// Zachary's karate club edge list, members numbered 1 to 34.
pub const KARATE_EDGE_LIST: &str = include_str!("../data/karate.edgelist");

/// Members who sided with the instructor (member 1) after the split.
/// Everyone else followed the administrator (member 34).
pub const KARATE_INSTRUCTOR_FACTION: [&str; 17] = [
    "1", "2", "3", "4", "5", "6", "7", "8", "9", "11", "12", "13", "14", "17", "18", "20", "22",
];

pub const KARATE_INSTRUCTOR: &str = "1";
pub const KARATE_ADMINISTRATOR: &str = "34";

pub fn karate_club() -> Graph {
    load_edge_list(KARATE_EDGE_LIST.as_bytes(), &LoadOptions::default())
        .expect("bundled karate edge list is well formed")
        .0
}

/// Resolve `builtin:<name>` dataset references.
pub fn builtin(name: &str) -> Option<Result<Graph>> {
    match name {
        "karate" => Some(Ok(karate_club())),
        _ => None,
    }
}
