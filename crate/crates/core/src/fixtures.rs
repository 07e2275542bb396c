//! Bundled task graphs for the benchmark applications.
//!
//! | name         | tasks | channels | symmetry group |
//! |--------------|-------|----------|----------------|
//! | sobel        | 5     | 15       | C2             |
//! | matmult      | 5     | 6        | trivial        |
//! | mjpeg        | 12    | 15       | S4             |
//! | mandelbrot   | 18    | 32       | trivial        |
//! | audio_filter | 8     | 8        | C2             |
//!
//! Every task has costs for the PE types ARM, DSP, RISC, Epiphany, ACC and CPU.

use crate::error::{Error, Result};
use crate::io::parse_task_graph;
use crate::mapping::{TaskGraph, TaskSymmetry};

pub const TASK_GRAPHS: &[(&str, &str)] = &[
    ("sobel", include_str!("../fixtures/sobel.json")),
    ("matmult", include_str!("../fixtures/matmult.json")),
    ("mjpeg", include_str!("../fixtures/mjpeg.json")),
    ("mandelbrot", include_str!("../fixtures/mandelbrot.json")),
    ("audio_filter", include_str!("../fixtures/audio_filter.json")),
];

pub fn task_graph_source(name: &str) -> Option<&'static str> {
    TASK_GRAPHS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn task_graph(name: &str) -> Result<(TaskGraph, TaskSymmetry)> {
    let text = task_graph_source(name).ok_or_else(|| Error::InvalidTaskGraph(format!("no bundled task graph {name:?}")))?;
    parse_task_graph(text)
}
