//! Analytic confusion proportions from fitted laws and empirical ROC/PR
//! evaluation. Positive always means out-of-distribution, except for
//! [`aupr`] with [`PositiveClass::In`].

mod confusion;
mod curves;
mod report;

pub use confusion::{analytic_proportions, derived_rates, ConfusionProportions, DerivedRates};
pub use curves::{
    aupr, auroc, auroc_pairwise, detection_error, empirical_roc, fpr_at_tpr, OperatingPoint,
    PositiveClass, RocCurve, RocPoint,
};
pub use report::{evaluate, metrics_table_csv, MetricsReport, DEFAULT_TARGET_TPR};
