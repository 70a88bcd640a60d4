//! Model files, JSON reports and Graphviz output for the `gtshape` command.

pub mod dot;
pub mod model;
pub mod report;
