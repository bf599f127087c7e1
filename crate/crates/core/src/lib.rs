pub mod local_algebra;
pub mod extensions;
pub mod factdb;
pub mod cw_topology;
pub mod sequence_engine;
pub mod cli;
