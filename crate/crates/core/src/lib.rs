pub mod agent;
pub mod bench;
pub mod dynamics;
pub mod eval;
pub mod geometry;
pub mod math;
pub mod navigation;
pub mod sim;
