pub mod constants;
pub mod ladder;
pub mod series;
pub mod solver;
pub mod spectral;
pub mod tractor;
