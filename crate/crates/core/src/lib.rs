//! Temporal topic analytics over a timestamped corpus and a `T x K x V`
//! topic-word tensor.
//!
//! The numeric modules are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below pin the common `f64` instantiation.

pub mod corpus;
pub mod metrics;
pub mod model;
pub mod retrieval;
pub mod saliency;
mod scalar;

pub use scalar::Scalar;

pub type Beta = model::BetaTensor<f64>;
pub type Beta32 = model::BetaTensor<f32>;
pub type Quality = metrics::TemporalQuality<f64>;
pub type Quality32 = metrics::TemporalQuality<f32>;
pub type Salient = saliency::SaliencyScore<f64>;
pub type SaliencyOptions = saliency::SaliencyConfig<f64>;
pub type DocRetriever = retrieval::Retriever<f64>;
pub type RetrievalHit = retrieval::RetrievalResult<f64>;
