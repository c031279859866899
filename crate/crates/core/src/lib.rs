//! Single-shot HDR imaging with a global-reset-release (GRR) shutter behind
//! pixel-permuting optics.
//!
//! A GRR sensor exposes row `u` for `t0 + tr * (u - 1)` seconds. Permuting
//! the scene onto the sensor turns that row gradient into a spatially random
//! exposure pattern, so every neighborhood of the scene is sampled at both
//! short and long exposures. Saturated pixels are erased and the scene is
//! recovered by TV-regularized least squares.
//!
//! - [`simulate`]: forward model and saturation targeting
//! - [`solver`]: FISTA reconstruction
//! - [`calib`]: calibrated system matrices and Bayer planes
//! - [`analyze`]: dynamic range, highlight density, merge, fidelity metrics
//! - [`io`]: file formats
//! - [`ablation`]: batch scenario comparisons

pub mod ablation;
pub mod analyze;
pub mod calib;
pub mod error;
pub mod image;
pub mod io;
pub mod permutation;
pub mod scenes;
pub mod sensor;
pub mod shutter;
pub mod simulate;
pub mod solver;

pub use error::{Error, Result};
pub use image::RadianceImage;
pub use permutation::{conjugated_exposure, Direction, PermutationMap};
pub use sensor::{quantize, Measurement, SensorConfig};
pub use shutter::ShutterProfile;
pub use simulate::AcquisitionSpec;
