//! Decision layer: Bayes-posterior sample detection, threshold solving,
//! pixel segmentation and stream testing.

mod posterior;
mod profile;
mod segment;
mod stream;
mod threshold;

pub use posterior::{posterior_id, Priors};
pub use profile::{DetectionProfile, VerdictRecord};
pub use segment::{ood_heatmap, pixel_posterior_map, PixelPosterior};
pub use stream::{simulate_rejection_rate, stream_test, StreamTestResult, DEFAULT_SIGNIFICANCE};
pub use threshold::{classify_sample, solve_threshold, ThresholdSolution, Verdict, GRID_POINTS};
