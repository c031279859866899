//! Dynamic range, highlight density, merging and fidelity metrics.

pub mod dr;
pub mod highlight;
pub mod merge;
pub mod metrics;

pub use dr::{dynamic_range_grr, dynamic_range_nd, patch_dr_histogram, DrReport, PatchHistogram};
pub use highlight::{isolated_highlight_density, luminance};
pub use merge::merge_exposures;
pub use metrics::{fidelity_metrics, psnr, ssim_plane, Fidelity, Normalization};
