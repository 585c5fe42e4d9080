use serde::{Deserialize, Serialize};

use super::{aupr, auroc, empirical_roc, fpr_at_tpr, PositiveClass};
use crate::Result;

pub const DEFAULT_TARGET_TPR: f64 = 0.95;

/// Scores for one (ID, OOD) experiment; OOD is the positive class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub id_name: String,
    pub ood_name: String,
    pub fpr_at_95_tpr: f64,
    pub detection_error: f64,
    pub auroc: f64,
    pub aupr_out: f64,
    pub aupr_in: f64,
    pub achieved_tpr: f64,
    pub threshold: f64,
    pub n_id: usize,
    pub n_ood: usize,
}

pub fn evaluate(
    id_scores: &[f64],
    ood_scores: &[f64],
    id_name: impl Into<String>,
    ood_name: impl Into<String>,
) -> Result<MetricsReport> {
    let op = fpr_at_tpr(id_scores, ood_scores, DEFAULT_TARGET_TPR)?;
    Ok(MetricsReport {
        id_name: id_name.into(),
        ood_name: ood_name.into(),
        fpr_at_95_tpr: op.fpr,
        detection_error: 0.5 * (1.0 - op.tpr) + 0.5 * op.fpr,
        auroc: auroc(&empirical_roc(id_scores, ood_scores)?),
        aupr_out: aupr(id_scores, ood_scores, PositiveClass::Out)?,
        aupr_in: aupr(id_scores, ood_scores, PositiveClass::In)?,
        achieved_tpr: op.tpr,
        threshold: op.threshold,
        n_id: id_scores.len(),
        n_ood: ood_scores.len(),
    })
}

/// One CSV row per experiment, columns in results-table order.
pub fn metrics_table_csv(reports: &[MetricsReport]) -> String {
    let mut out = String::from(
        "id,ood,fpr_at_95_tpr,detection_error,auroc,aupr_out,aupr_in,achieved_tpr,n_id,n_ood\n",
    );
    for r in reports {
        out.push_str(&format!(
            "{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{},{}\n",
            r.id_name,
            r.ood_name,
            r.fpr_at_95_tpr,
            r.detection_error,
            r.auroc,
            r.aupr_out,
            r.aupr_in,
            r.achieved_tpr,
            r.n_id,
            r.n_ood
        ));
    }
    out
}
