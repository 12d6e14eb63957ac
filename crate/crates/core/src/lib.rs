pub mod elm;
pub mod experiments;
pub mod numerics;
pub mod optics;
pub mod seed;
pub mod tasks;
