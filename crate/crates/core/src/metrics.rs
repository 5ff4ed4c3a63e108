//! Benchmark measures: precision / recall, F-measure, ROC and AUC, mean
//! absolute error and overlap ratio.
//!
//! Maps are row-major pixel slices with values in `[0, 1]`.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Weight of precision against recall in the F-measure.
pub const BETA_SQ: f64 = 0.3;
/// Number of thresholds swept for the curves.
pub const CURVE_POINTS: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                actual: bits.len(),
            });
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    /// Pixels at or above `threshold` are set.
    pub fn from_map(width: usize, height: usize, map: &[f64], threshold: f64) -> Result<Self> {
        Self::new(width, height, map.iter().map(|&v| v >= threshold).collect())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// 0.0 / 1.0 per pixel.
    pub fn to_reals(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// Binarisation threshold: twice the mean, clamped to the maximum.
pub fn adaptive_threshold(map: &[f64]) -> f64 {
    let mean = map.iter().sum::<f64>() / map.len().max(1) as f64;
    let max = map.iter().copied().fold(0.0, f64::max);
    (2.0 * mean).min(max)
}

pub fn binarize_adaptive(width: usize, height: usize, map: &[f64]) -> Result<BinaryMask> {
    check_len(width * height, map.len())?;
    if map.iter().all(|&v| v <= 0.0) {
        return BinaryMask::new(width, height, vec![false; map.len()]);
    }
    BinaryMask::from_map(width, height, map, adaptive_threshold(map))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Confusion {
    tp: usize,
    fp: usize,
    fn_: usize,
    tn: usize,
}

impl Confusion {
    fn of(pred: impl Iterator<Item = bool>, truth: &[bool]) -> Self {
        let mut c = Confusion::default();
        for (p, &t) in pred.zip(truth) {
            match (p, t) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => c.tn += 1,
            }
        }
        c
    }

    fn precision(&self) -> f64 {
        ratio_or_one(self.tp, self.tp + self.fp)
    }

    fn recall(&self) -> f64 {
        ratio_or_one(self.tp, self.tp + self.fn_)
    }

    fn fpr(&self) -> f64 {
        ratio_or_zero(self.fp, self.fp + self.tn)
    }
}

fn ratio_or_one(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

fn ratio_or_zero(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// `(precision, recall)`; an empty prediction has precision 1 and an empty
/// ground truth has recall 1.
pub fn precision_recall(s: &BinaryMask, g: &BinaryMask) -> Result<(f64, f64)> {
    check_len(g.len(), s.len())?;
    let c = Confusion::of(s.bits.iter().copied(), &g.bits);
    Ok((c.precision(), c.recall()))
}

pub fn f_measure(precision: f64, recall: f64) -> f64 {
    let den = BETA_SQ * precision + recall;
    if den <= 0.0 {
        0.0
    } else {
        (1.0 + BETA_SQ) * precision * recall / den
    }
}

pub fn mae(map: &[f64], g: &BinaryMask) -> Result<f64> {
    check_len(g.len(), map.len())?;
    if map.is_empty() {
        return Ok(0.0);
    }
    let total: f64 = map
        .iter()
        .zip(&g.bits)
        .map(|(&s, &t)| (s - if t { 1.0 } else { 0.0 }).abs())
        .sum();
    Ok(total / map.len() as f64)
}

/// Intersection over union; 1 when both masks are empty.
pub fn overlap_ratio(s: &BinaryMask, g: &BinaryMask) -> Result<f64> {
    check_len(g.len(), s.len())?;
    let (mut inter, mut union) = (0usize, 0usize);
    for (&a, &b) in s.bits.iter().zip(&g.bits) {
        inter += usize::from(a && b);
        union += usize::from(a || b);
    }
    Ok(ratio_or_one(inter, union))
}

/// Quantises a `[0, 1]` map to 8 bits.
pub fn quantize(map: &[f64]) -> Vec<u8> {
    map.iter()
        .map(|&v| libm::round(v.clamp(0.0, 1.0) * 255.0) as u8)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curves {
    /// `(precision, recall)` at thresholds `0..=255`.
    pub pr: Vec<(f64, f64)>,
    /// `(fpr, tpr)` at thresholds `0..=255`.
    pub roc: Vec<(f64, f64)>,
    pub auc: f64,
}

/// Sweeps every 8-bit threshold `t` (pixel positive when `q >= t`) and
/// integrates the ROC curve with the trapezoid rule, anchored at `(0, 0)`.
pub fn curves_and_auc(map: &[f64], g: &BinaryMask) -> Result<Curves> {
    check_len(g.len(), map.len())?;
    let q = quantize(map);
    let mut pos = [0usize; CURVE_POINTS];
    let mut neg = [0usize; CURVE_POINTS];
    for (&v, &t) in q.iter().zip(&g.bits) {
        if t {
            pos[v as usize] += 1;
        } else {
            neg[v as usize] += 1;
        }
    }
    let total_pos: usize = pos.iter().sum();
    let total_neg: usize = neg.iter().sum();

    let mut pr = Vec::with_capacity(CURVE_POINTS);
    let mut roc = Vec::with_capacity(CURVE_POINTS);
    // counts of pixels with value >= t, built from the top down
    let mut tp_at = [0usize; CURVE_POINTS];
    let mut fp_at = [0usize; CURVE_POINTS];
    let (mut tp, mut fp) = (0usize, 0usize);
    for t in (0..CURVE_POINTS).rev() {
        tp += pos[t];
        fp += neg[t];
        tp_at[t] = tp;
        fp_at[t] = fp;
    }
    for t in 0..CURVE_POINTS {
        let c = Confusion {
            tp: tp_at[t],
            fp: fp_at[t],
            fn_: total_pos - tp_at[t],
            tn: total_neg - fp_at[t],
        };
        pr.push((c.precision(), c.recall()));
        roc.push((c.fpr(), c.recall()));
    }

    let mut auc = 0.0;
    let mut prev = (0.0, 0.0);
    for &(x, y) in roc.iter().rev() {
        auc += (x - prev.0) * (y + prev.1) / 2.0;
        prev = (x, y);
    }
    Ok(Curves {
        pr,
        roc,
        auc: auc.clamp(0.0, 1.0),
    })
}

/// Scores of one map against one ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub auc: f64,
    pub mae: f64,
    pub or_score: f64,
    pub pr_curve: Vec<(f64, f64)>,
    pub roc_curve: Vec<(f64, f64)>,
}

impl MetricReport {
    /// Element-wise mean of several reports.
    pub fn mean(reports: &[MetricReport]) -> Option<MetricReport> {
        let n = reports.len();
        if n == 0 {
            return None;
        }
        let avg = |f: &dyn Fn(&MetricReport) -> f64| reports.iter().map(f).sum::<f64>() / n as f64;
        let avg_curve = |f: &dyn Fn(&MetricReport) -> &[(f64, f64)]| -> Vec<(f64, f64)> {
            (0..CURVE_POINTS)
                .map(|t| {
                    let (a, b) = reports.iter().map(|r| f(r)[t]).fold((0.0, 0.0), |acc, p| {
                        (acc.0 + p.0, acc.1 + p.1)
                    });
                    (a / n as f64, b / n as f64)
                })
                .collect()
        };
        Some(MetricReport {
            precision: avg(&|r| r.precision),
            recall: avg(&|r| r.recall),
            f_measure: avg(&|r| r.f_measure),
            auc: avg(&|r| r.auc),
            mae: avg(&|r| r.mae),
            or_score: avg(&|r| r.or_score),
            pr_curve: avg_curve(&|r| &r.pr_curve),
            roc_curve: avg_curve(&|r| &r.roc_curve),
        })
    }
}

/// Full evaluation of a `[0, 1]` pixel map.
pub fn evaluate(map: &[f64], g: &BinaryMask) -> Result<MetricReport> {
    check_len(g.len(), map.len())?;
    let binary = binarize_adaptive(g.width(), g.height(), map)?;
    let (precision, recall) = precision_recall(&binary, g)?;
    let curves = curves_and_auc(map, g)?;
    Ok(MetricReport {
        precision,
        recall,
        f_measure: f_measure(precision, recall),
        auc: curves.auc,
        mae: mae(map, g)?,
        or_score: overlap_ratio(&binary, g)?,
        pr_curve: curves.pr,
        roc_curve: curves.roc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(bits: &[u8]) -> BinaryMask {
        BinaryMask::new(bits.len(), 1, bits.iter().map(|&b| b == 1).collect()).unwrap()
    }

    #[test]
    fn adaptive_binarisation() {
        let m = [0.0, 0.0, 0.4, 0.4];
        assert!((adaptive_threshold(&m) - 0.4).abs() < 1e-12);
        let constant = binarize_adaptive(4, 1, &[0.5; 4]).unwrap();
        assert_eq!(constant.count(), 4);
        assert_eq!(binarize_adaptive(4, 1, &[0.0; 4]).unwrap().count(), 0);
    }

    #[test]
    fn precision_recall_cases() {
        let g = mask(&[1, 1, 0, 0, 0, 0]);
        assert_eq!(precision_recall(&g, &g).unwrap(), (1.0, 1.0));
        assert_eq!(precision_recall(&mask(&[0, 0, 1, 1, 0, 0]), &g).unwrap(), (0.0, 0.0));
        assert_eq!(precision_recall(&mask(&[1, 1, 1, 1, 0, 0]), &g).unwrap(), (0.5, 1.0));
        assert_eq!(precision_recall(&mask(&[0; 6]), &g).unwrap(), (1.0, 0.0));
        assert!(precision_recall(&mask(&[0; 5]), &g).is_err());
    }

    #[test]
    fn f_measure_cases() {
        assert_eq!(f_measure(1.0, 1.0), 1.0);
        assert_eq!(f_measure(1.0, 0.0), 0.0);
        assert_eq!(f_measure(0.0, 0.0), 0.0);
        assert!((f_measure(0.5, 1.0) - 0.5652).abs() < 1e-4);
    }

    #[test]
    fn mae_cases() {
        let g = mask(&[1, 0, 1, 0]);
        assert_eq!(mae(&g.to_reals(), &g).unwrap(), 0.0);
        assert_eq!(mae(&[0.0, 1.0, 0.0, 1.0], &g).unwrap(), 1.0);
        assert_eq!(mae(&[0.5; 4], &g).unwrap(), 0.5);
    }

    #[test]
    fn overlap_cases() {
        let g = mask(&[1, 1, 0, 0]);
        assert_eq!(overlap_ratio(&g, &g).unwrap(), 1.0);
        assert_eq!(overlap_ratio(&mask(&[0, 0, 1, 1]), &g).unwrap(), 0.0);
        assert_eq!(overlap_ratio(&mask(&[1, 1, 0, 0]), &mask(&[1, 1, 1, 1])).unwrap(), 0.5);
        assert_eq!(overlap_ratio(&mask(&[0; 4]), &mask(&[0; 4])).unwrap(), 1.0);
        assert_eq!(overlap_ratio(&mask(&[0; 4]), &g).unwrap(), 0.0);
    }

    #[test]
    fn auc_extremes() {
        let g = mask(&[1, 1, 0, 0, 0]);
        let c = curves_and_auc(&g.to_reals(), &g).unwrap();
        assert_eq!(c.auc, 1.0);
        assert_eq!(c.pr.len(), CURVE_POINTS);
        assert_eq!(c.roc.len(), CURVE_POINTS);
        let inverted: Vec<f64> = g.to_reals().iter().map(|v| 1.0 - v).collect();
        assert_eq!(curves_and_auc(&inverted, &g).unwrap().auc, 0.0);
    }
}
