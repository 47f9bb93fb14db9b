//! Dimension-decomposed Bayesian optimization over discrete grids.
//!
//! [`engine::ScoreOptimizer`] replaces the single joint surrogate of
//! classical BO with one 1D Gaussian process per parameter, each fitted to
//! the best objective value observed at every grid value of that parameter.
//! Expected improvement scores every grid value, and candidate combinations
//! are assembled from those scores, one batch per iteration. The cost of an
//! iteration is bounded by the grid sizes rather than the number of
//! evaluations.
//!
//! [`baseline::BoOptimizer`] is a standard joint-space BO loop for
//! comparison, and [`problems`] holds the Ackley function and a
//! single-diode photovoltaic fitting problem. The [`bench`] module drives
//! experiments and writes CSV traces and SVG plots.
//!
//! ```
//! use score_bo::engine::{ScoreConfig, ScoreOptimizer};
//! use score_bo::optimizer::Optimizer;
//! use score_bo::problems::AckleySpec;
//!
//! let spec = AckleySpec::new(3).unwrap();
//! let space = spec.search_space(61).unwrap();
//! let objective = move |x: &[f64]| spec.evaluate(x);
//! let mut opt = ScoreOptimizer::new(space, ScoreConfig::default()).unwrap();
//! opt.initialize(&objective, 6);
//! while opt.evaluations() < 60 {
//!     opt.step(&objective, 60 - opt.evaluations());
//! }
//! assert!(opt.history().best_value().unwrap() < 10.0);
//! ```

pub mod acquisition;
pub mod baseline;
pub mod bench;
pub mod engine;
pub mod error;
pub mod gp;
pub mod optimizer;
pub mod problems;
pub mod space;

pub use error::{Error, Result};
