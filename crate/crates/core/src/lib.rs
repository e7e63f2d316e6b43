//! Reconstruction of a compactly supported 2-D scattering potential from
//! far-field data: the discrete Born approximation (one inverse DFT over the
//! frequency set reached by a scattering geometry) and its fixed-point
//! refinement by repeated Lippmann–Schwinger solves.
//!
//! Everything lives on the periodic cell `G_R = [-R, R)^2` sampled at
//! `N x N` nodes; the potential is assumed to vanish outside the unit disk
//! and `R > 2` is required so the periodized Green's function agrees with the
//! free-space one on the support.
//!
//! ```
//! use scatter2d_core::{born_invert, synthesize_dataset, ForwardOptions, GridSpec, Phantom,
//!                      ScatteringScenario};
//!
//! let grid = GridSpec::new(2.1, 16).unwrap();
//! let v = Phantom::AnnulusSquare.sample(grid);
//! let d = synthesize_dataset(&v, &ScatteringScenario::Backscattering, &ForwardOptions::default()).unwrap();
//! let born = born_invert(&d);
//! assert_eq!(born.zero_filled_count, 1);
//! ```

pub mod born;
pub mod error;
pub mod forward;
pub mod geometry;
pub mod grid;
pub mod iterate;
pub mod metrics;
pub mod phantom;
pub mod special;

pub use born::{born_full_data, born_invert, BornResult};
pub use error::{Error, Result};
pub use forward::{
    add_noise, synthesize_dataset, synthesize_full_data, FarFieldDataset, FieldNoise, ForwardOptions,
    GmresOptions, KernelCache, PeriodizedKernel,
};
pub use geometry::{ExperimentParams, ScatteringScenario};
pub use grid::{interpolate_qh, periodize, GridSpec, Index, NodalField, Point, SpectralField};
pub use iterate::{iterate_step, run, run_full_data, IterateOptions, ReconstructionRun, RunStats};
pub use metrics::{aliasing_study, fit_rate, l2_error, sampling_study, AliasingErrors, RateFit, SamplingStudy};
pub use phantom::Phantom;
pub use special::WaveNumber;
