//! Reconstruction of a recurring pulse's shape from short, equally spaced
//! sample bursts ("sample trains") taken far below the Nyquist rate.
//!
//! A train of `d+1` samples spaced `tau` apart is a point in
//! `(d+1)`-dimensional space; as the start time sweeps the pulse, these
//! points trace a curve that begins on the last coordinate axis and ends
//! on the first. Collecting many trains from a stream of recurring pulses
//! samples this curve at uniformly distributed positions, so ordering the
//! points along the curve and inverting their empirical distribution
//! recovers both the pulse length and the pulse shape.
//!
//! The crate provides the signal model ([`pulse`], [`stream`], [`train`]),
//! the curve ordering ([`ordering`]), the estimation pipeline ([`chain`],
//! [`quantile`], [`recon`]), and a Monte Carlo harness ([`experiment`],
//! [`metrics`], [`io`]) for studying the estimator's convergence.
//!
//! All numeric code is generic over the scalar type via [`float::Float`];
//! `f64` aliases for the main types live at the crate root.

pub mod chain;
pub mod error;
pub mod experiment;
pub mod float;
pub mod io;
pub mod metrics;
pub mod ordering;
pub mod pulse;
pub mod quantile;
pub mod recon;
pub mod stream;
pub mod train;

pub use error::{Error, Result, Stage};
pub use float::Float;

/// `f64` aliases for the main domain types.
pub type PulseSignal64 = pulse::PulseSignal<f64>;
pub type PulseStream64 = stream::PulseStream<f64>;
pub type SampleTrain64 = train::SampleTrain<f64>;
pub type SamplingConfig64 = train::SamplingConfig<f64>;
pub type PointCloud64 = ordering::PointCloud<f64>;
pub type PolygonalChain64 = chain::PolygonalChain<f64>;
pub type QuantileEstimate64 = quantile::QuantileEstimate<f64>;
pub type PulseEstimate64 = recon::PulseEstimate<f64>;

/// `f32` aliases for the main domain types.
pub type PulseSignal32 = pulse::PulseSignal<f32>;
pub type PulseStream32 = stream::PulseStream<f32>;
pub type SampleTrain32 = train::SampleTrain<f32>;
pub type SamplingConfig32 = train::SamplingConfig<f32>;
pub type PointCloud32 = ordering::PointCloud<f32>;
pub type PolygonalChain32 = chain::PolygonalChain<f32>;
pub type QuantileEstimate32 = quantile::QuantileEstimate<f32>;
pub type PulseEstimate32 = recon::PulseEstimate<f32>;
