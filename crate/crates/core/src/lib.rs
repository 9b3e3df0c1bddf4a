pub mod interval;
pub mod poly;
pub mod cubicfield;
pub mod family;
pub mod heights;
pub mod reduction;
pub mod bounds;
pub mod solver;
pub mod tracer;
pub mod config;
pub mod cli;
