pub mod dynamics;
pub mod error;
pub mod export;
pub mod linalg;
pub mod models;
pub mod phase_map;
pub mod topology;
