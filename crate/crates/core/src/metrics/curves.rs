use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    /// Fall-out (false positive rate).
    pub f: f64,
    /// Recall (true positive rate).
    pub r: f64,
    /// Detection threshold producing this point; positive means `score ≥ threshold`.
    pub threshold: f64,
    pub fp: usize,
    pub tp: usize,
}

/// Staircase from `(0, 0)` to `(1, 1)`, fall-out non-decreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub n_id: usize,
    pub n_ood: usize,
}

fn check(id: &[f64], ood: &[f64]) -> Result<()> {
    if id.is_empty() || ood.is_empty() {
        return Err(Error::InvalidArgument("metrics need non-empty ID and OOD score sets".into()));
    }
    if id.iter().chain(ood).any(|s| s.is_nan()) {
        return Err(Error::InvalidArgument("NaN score".into()));
    }
    Ok(())
}

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Sweeps every distinct score as a threshold, plus `±∞` sentinels.
pub fn empirical_roc(id_scores: &[f64], ood_scores: &[f64]) -> Result<RocCurve> {
    check(id_scores, ood_scores)?;
    let (ids, oods) = (sorted_desc(id_scores), sorted_desc(ood_scores));
    let (n_id, n_ood) = (ids.len(), oods.len());
    let point = |threshold: f64, fp: usize, tp: usize| RocPoint {
        f: fp as f64 / n_id as f64,
        r: tp as f64 / n_ood as f64,
        threshold,
        fp,
        tp,
    };
    let mut points = vec![point(f64::INFINITY, 0, 0)];
    let (mut i, mut j) = (0, 0);
    while i < n_id || j < n_ood {
        let next = match (ids.get(i), oods.get(j)) {
            (Some(&a), Some(&b)) => a.max(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => unreachable!(),
        };
        while i < n_id && ids[i] >= next {
            i += 1;
        }
        while j < n_ood && oods[j] >= next {
            j += 1;
        }
        points.push(point(next, i, j));
    }
    points.push(point(f64::NEG_INFINITY, n_id, n_ood));
    points.dedup_by(|b, a| a.fp == b.fp && a.tp == b.tp);
    Ok(RocCurve { points, n_id, n_ood })
}

/// Trapezoidal area under the staircase, accumulated in exact counts.
pub fn auroc(curve: &RocCurve) -> f64 {
    let twice: f64 = curve
        .points
        .windows(2)
        .map(|w| ((w[1].fp - w[0].fp) * (w[0].tp + w[1].tp)) as f64)
        .sum();
    twice / (2.0 * curve.n_id as f64 * curve.n_ood as f64)
}

/// `(#{ood > id} + ½ #{ood = id}) / (n_id n_ood)`.
pub fn auroc_pairwise(id_scores: &[f64], ood_scores: &[f64]) -> Result<f64> {
    check(id_scores, ood_scores)?;
    let mut ids = id_scores.to_vec();
    ids.sort_by(f64::total_cmp);
    let mut twice = 0u128;
    for &s in ood_scores {
        let below = ids.partition_point(|&v| v < s);
        let not_above = ids.partition_point(|&v| v <= s);
        twice += 2 * below as u128 + (not_above - below) as u128;
    }
    Ok(twice as f64 / (2.0 * ids.len() as f64 * ood_scores.len() as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PositiveClass {
    Out,
    In,
}

/// Average precision: `Σ (R_k − R_{k−1}) P_k` over distinct thresholds,
/// without interpolation between points.
pub fn aupr(id_scores: &[f64], ood_scores: &[f64], positive: PositiveClass) -> Result<f64> {
    check(id_scores, ood_scores)?;
    let (pos, neg): (Vec<f64>, Vec<f64>) = match positive {
        PositiveClass::Out => (ood_scores.to_vec(), id_scores.to_vec()),
        PositiveClass::In => (
            id_scores.iter().map(|s| -s).collect(),
            ood_scores.iter().map(|s| -s).collect(),
        ),
    };
    let roc = empirical_roc(&neg, &pos)?;
    let n_pos = pos.len() as f64;
    let mut ap = 0.0;
    for w in roc.points.windows(2) {
        let d_tp = w[1].tp - w[0].tp;
        if d_tp > 0 {
            let precision = w[1].tp as f64 / (w[1].tp + w[1].fp) as f64;
            ap += d_tp as f64 * precision;
        }
    }
    Ok((ap / n_pos).min(1.0))
}

/// The detector operating point chosen for a target TPR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub threshold: f64,
    pub tpr: f64,
    pub fpr: f64,
}

/// Largest threshold whose TPR reaches `target_tpr`, with the FPR there.
pub fn fpr_at_tpr(id_scores: &[f64], ood_scores: &[f64], target_tpr: f64) -> Result<OperatingPoint> {
    check(id_scores, ood_scores)?;
    if !(0.0..=1.0).contains(&target_tpr) {
        return Err(Error::InvalidArgument(format!("target TPR {target_tpr} outside [0, 1]")));
    }
    let oods = sorted_desc(ood_scores);
    // count of positives needed; the slack absorbs representation error in
    // products like 0.95 · 20
    let k = ((target_tpr * oods.len() as f64) - 1e-9).ceil().max(0.0) as usize;
    let threshold = if k == 0 { f64::INFINITY } else { oods[k - 1] };
    let tp = oods.iter().filter(|&&s| s >= threshold).count();
    let fp = id_scores.iter().filter(|&&s| s >= threshold).count();
    Ok(OperatingPoint {
        threshold,
        tpr: tp as f64 / oods.len() as f64,
        fpr: fp as f64 / id_scores.len() as f64,
    })
}

/// `½ (1 − TPR) + ½ FPR` at the [`fpr_at_tpr`] operating point.
pub fn detection_error(id_scores: &[f64], ood_scores: &[f64], target_tpr: f64) -> Result<f64> {
    let op = fpr_at_tpr(id_scores, ood_scores, target_tpr)?;
    Ok(0.5 * (1.0 - op.tpr) + 0.5 * op.fpr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force sweep over every candidate threshold.
    fn brute_points(id: &[f64], ood: &[f64]) -> Vec<(usize, usize)> {
        let mut cands: Vec<f64> = id.iter().chain(ood).copied().collect();
        cands.push(f64::INFINITY);
        cands.push(f64::NEG_INFINITY);
        cands.sort_by(|a, b| b.total_cmp(a));
        let mut pts: Vec<(usize, usize)> = cands
            .iter()
            .map(|&t| {
                (
                    id.iter().filter(|&&s| s >= t).count(),
                    ood.iter().filter(|&&s| s >= t).count(),
                )
            })
            .collect();
        pts.dedup();
        pts
    }

    #[test]
    fn perfect_separation() {
        let (id, ood) = ([1.0, 2.0, 3.0], [4.0, 5.0, 6.0]);
        let roc = empirical_roc(&id, &ood).unwrap();
        assert!(roc.points.iter().any(|p| p.f == 0.0 && p.r == 1.0));
        assert_eq!(roc.points.first().map(|p| (p.f, p.r)), Some((0.0, 0.0)));
        assert_eq!(roc.points.last().map(|p| (p.f, p.r)), Some((1.0, 1.0)));
        assert_eq!(auroc(&roc), 1.0);
        assert_eq!(auroc_pairwise(&id, &ood).unwrap(), 1.0);
        assert_eq!(aupr(&id, &ood, PositiveClass::Out).unwrap(), 1.0);
        assert_eq!(aupr(&id, &ood, PositiveClass::In).unwrap(), 1.0);
        assert_eq!(fpr_at_tpr(&id, &ood, 0.95).unwrap().fpr, 0.0);
    }

    #[test]
    fn identical_sets() {
        let s = [1.0, 2.0, 2.0, 5.0];
        let roc = empirical_roc(&s, &s).unwrap();
        assert!(roc.points.iter().all(|p| p.f == p.r));
        assert_eq!(auroc(&roc), 0.5);
        assert_eq!(auroc_pairwise(&s, &s).unwrap(), 0.5);
    }

    #[test]
    fn hand_enumerated_cases() {
        assert_eq!(auroc_pairwise(&[1.0, 3.0], &[2.0, 4.0]).unwrap(), 0.75);
        let roc = empirical_roc(&[1.0, 3.0], &[2.0, 4.0]).unwrap();
        assert_eq!(auroc(&roc), 0.75);
        // one positive ranked below nine negatives
        let neg: Vec<f64> = (2..11).map(|v| v as f64).collect();
        assert!((aupr(&neg, &[1.0], PositiveClass::Out).unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn negated_symmetry_for_in_class() {
        let id = [0.1, 0.4, 0.35, 0.8];
        let ood = [0.3, 0.9, 0.7, 0.75, 0.6];
        let neg = |v: &[f64]| v.iter().map(|s| -s).collect::<Vec<_>>();
        let out = aupr(&id, &ood, PositiveClass::Out).unwrap();
        let mirrored = aupr(&neg(&ood), &neg(&id), PositiveClass::In).unwrap();
        assert!((out - mirrored).abs() < 1e-15);
    }

    #[test]
    fn target_rate_enumeration() {
        let ood: Vec<f64> = (1..=20).map(|v| v as f64).collect();
        let id = [0.0, 1.5, 2.5];
        let op = fpr_at_tpr(&id, &ood, 0.95).unwrap();
        assert_eq!(op.threshold, 2.0);
        assert_eq!(op.tpr, 0.95);
        assert!((op.fpr - 1.0 / 3.0).abs() < 1e-15);
        let de = detection_error(&id, &ood, 0.95).unwrap();
        assert!((de - (0.5 * 0.05 + 0.5 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn perfect_detection_error() {
        let id: Vec<f64> = (0..100).map(|v| v as f64).collect();
        let ood: Vec<f64> = (200..300).map(|v| v as f64).collect();
        assert!((detection_error(&id, &ood, 0.95).unwrap() - 0.025).abs() < 1e-15);
    }

    #[test]
    fn identical_sets_near_target() {
        let s: Vec<f64> = (0..1000).map(|v| v as f64).collect();
        let op = fpr_at_tpr(&s, &s, 0.95).unwrap();
        assert!((op.fpr - 0.95).abs() < 1e-12);
        let de = detection_error(&s, &s, 0.95).unwrap();
        assert!((de - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_inputs_error() {
        assert!(empirical_roc(&[], &[1.0]).is_err());
        assert!(auroc_pairwise(&[1.0], &[]).is_err());
    }

    fn scores() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec((0u8..12).prop_map(|v| v as f64 * 0.5), 1..60)
    }

    proptest! {
        #[test]
        fn staircase_matches_brute_force(id in scores(), ood in scores()) {
            let roc = empirical_roc(&id, &ood).unwrap();
            let pts: Vec<(usize, usize)> = roc.points.iter().map(|p| (p.fp, p.tp)).collect();
            prop_assert_eq!(pts, brute_points(&id, &ood));
            prop_assert!(roc.points.windows(2).all(|w| w[0].f <= w[1].f && w[0].r <= w[1].r));
        }

        #[test]
        fn rank_identity(id in scores(), ood in scores()) {
            let a = auroc(&empirical_roc(&id, &ood).unwrap());
            let b = auroc_pairwise(&id, &ood).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
        }

        #[test]
        fn auroc_invariant_to_increasing_maps(id in scores(), ood in scores()) {
            let f = |v: &Vec<f64>| v.iter().map(|s| (s * 0.7).exp() + 3.0).collect::<Vec<_>>();
            let a = auroc_pairwise(&id, &ood).unwrap();
            let b = auroc_pairwise(&f(&id), &f(&ood)).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn relaxing_target_never_raises_fpr(id in scores(), ood in scores(), t in 0.0f64..1.0, d in 0.0f64..1.0) {
            let lo = (t * (1.0 - d)).max(0.0);
            let hi = fpr_at_tpr(&id, &ood, t).unwrap();
            let relaxed = fpr_at_tpr(&id, &ood, lo).unwrap();
            prop_assert!(relaxed.fpr <= hi.fpr);
            prop_assert!(hi.tpr >= t - 1e-9);
        }

        #[test]
        fn detection_error_is_balanced_misclassification(id in scores(), ood in scores()) {
            let op = fpr_at_tpr(&id, &ood, 0.95).unwrap();
            let sens = op.tpr;
            let specificity = 1.0 - op.fpr;
            let de = detection_error(&id, &ood, 0.95).unwrap();
            prop_assert!((de - (0.5 * (1.0 - sens) + 0.5 * (1.0 - specificity))).abs() < 1e-15);
            prop_assert!(de <= 0.5 * 0.05 + 0.5 * op.fpr + 1e-15);
        }
    }
}
