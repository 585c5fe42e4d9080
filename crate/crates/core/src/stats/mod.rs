//! Reconstruction-error extraction and the fitted error laws.

mod chi;
mod gamma;
mod moments;
mod persist;
mod recon;
pub mod special;

pub use chi::{chi_square_pdf, fit_chi_square, ChiSquareParams};
pub use gamma::{fit_gamma_mom, gamma_cdf, gamma_pdf, GammaParams};
pub use moments::{moments, MomentEstimate};
pub use persist::{histogram, write_histogram_csv, FittedStats, GammaRecord, HistogramBin, PriorsRecord};
pub use recon::{pixel_sq_errors, recon_errors, reconstruct_dataset, ErrorVector, PixelErrorMap};
pub use special::{lgamma, reg_lower_gamma, reg_upper_gamma, std_normal_cdf, std_normal_sf};
