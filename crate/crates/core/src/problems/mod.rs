//! Benchmark objectives.

pub mod ackley;
pub mod sdm;

pub use ackley::{ackley, AckleySpec};
pub use sdm::{
    make_synthetic_datasheet, sdm_current, sdm_residual, sdm_search_space, Datasheet, IvTargets,
    Residual, SdmObjective, SdmParams,
};
