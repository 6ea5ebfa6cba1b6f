//! Tomographic reconstruction from folded (modulo) projections.
//!
//! A self-reset detector records each Radon sample modulo `2λ`, which keeps
//! its range bounded no matter how bright the object. This crate simulates
//! that acquisition for ellipse phantoms, recovers the unfolded samples from
//! higher-order differences, and reconstructs by filtered back projection.
//!
//! The flow, per angle:
//!
//! ```text
//! phantom ──forward──▶ Sinogram ──fold──▶ ModuloSinogram ──unfold──▶ Sinogram ──fbp──▶ ImageGrid
//! ```
//!
//! ```
//! use modulo_radon::ops::{SampleSeq, Threshold};
//! use modulo_radon::unfold::{unfold_compact, UnfoldConfig, UnfoldMode};
//!
//! let thr = Threshold::new(0.1).unwrap();
//! let truth = SampleSeq::from_fn(-40, 20, |k| 0.8 * (-(k as f64 / 8.0).powi(2)).exp()).unwrap();
//! let folded = truth.map(|v| thr.fold(v));
//! let cfg = UnfoldConfig::new(0.1, 0.85, 1.0, 0.05, UnfoldMode::CompactExceedance)
//!     .unwrap()
//!     .with_order(2);
//! let out = unfold_compact(&folded, &cfg, 20).unwrap();
//! assert_eq!(out.samples.get(0), truth.get(0));
//! ```
//!
//! Modules, bottom up: [`ops`] (fold, differences, sequences), [`phantom`]
//! (ellipses and exact Radon transform), [`forward`] (band-limited
//! sampling), [`unfold`], [`fbp`], then [`io`] and [`experiment`] for files
//! and the end-to-end runs.

pub mod error;
pub mod experiment;
pub mod fbp;
pub mod forward;
pub mod io;
pub mod ops;
pub mod phantom;
pub mod special;
pub mod unfold;

pub use error::{Error, Result};
pub use fbp::{fbp_reconstruct, FilterSpec};
pub use forward::{fold_sinogram, make_sinogram, ModuloSinogram, SamplingParams, Sinogram};
pub use ops::{SampleSeq, Threshold};
pub use phantom::{shepp_logan, ImageGrid, Phantom};
pub use unfold::{unfold_compact, unfold_general, UnfoldConfig, UnfoldMode, UnfoldReport};
