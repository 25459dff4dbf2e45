//! k-stability: deviations at time `m` must be detected by `m + k + 1`.
//! Verification enumerates short deviation windows; synthesis searches the
//! graph of time-stamped configurations annotated with action windows.

mod graph;
mod sjpa;
mod window;

pub use graph::{
    build_window_graph, build_window_graph_with, WindowEdge, WindowGraph, WindowNode, WindowOptions,
};
pub use sjpa::{mark as mark_window_graph, sjpa, sjpa_with};
pub use window::{verify_kstable, window_deviation_check};
