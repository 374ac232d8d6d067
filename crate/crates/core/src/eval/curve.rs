use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Precision/recall at every distinct score threshold, highest first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrCurve {
    pub points: Vec<PrPoint>,
    pub base_rate: f64,
}

/// Sweeps thresholds over the distinct scores in descending order. An
/// example is predicted positive when its score is at least the threshold,
/// so tied scores always enter together.
pub fn pr_sweep(scores: &[f64], labels: &[bool]) -> Result<PrCurve> {
    if scores.len() != labels.len() {
        return Err(Error::InvalidInput(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite score {bad}")));
    }
    let positives = labels.iter().filter(|&&l| l).count();
    if positives == 0 {
        return Err(Error::NoPositives);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = Vec::new();
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        while i < order.len() && scores[order[i]] == threshold {
            if labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(PrPoint {
            threshold,
            precision: tp as f64 / (tp + fp) as f64,
            recall: tp as f64 / positives as f64,
        });
    }
    Ok(PrCurve {
        points,
        base_rate: positives as f64 / labels.len() as f64,
    })
}

/// Area under the precision/recall curve over the recall region where
/// precision is at least `p_min`.
///
/// The curve is linear between points and starts at recall 0 with the
/// precision of the first point. Segments crossing `p_min` are cut at the
/// interpolated crossing. The area is not normalized by the band height.
pub fn auc_range(curve: &PrCurve, p_min: f64) -> f64 {
    let Some(first) = curve.points.first() else {
        return 0.0;
    };
    let mut area = 0.0;
    let mut prev = (0.0, first.precision);
    for pt in &curve.points {
        let (r0, p0) = prev;
        let (r1, p1) = (pt.recall, pt.precision);
        prev = (r1, p1);
        let width = r1 - r0;
        if width <= 0.0 {
            continue;
        }
        match (p0 >= p_min, p1 >= p_min) {
            (true, true) => area += width * (p0 + p1) / 2.0,
            (false, false) => {}
            (above_start, _) => {
                let t = (p_min - p0) / (p1 - p0);
                let rc = r0 + t * width;
                if above_start {
                    area += (rc - r0) * (p0 + p_min) / 2.0;
                } else {
                    area += (r1 - rc) * (p_min + p1) / 2.0;
                }
            }
        }
    }
    area
}

impl PrCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("threshold,precision,recall\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{},{}", p.threshold, p.precision, p.recall);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<PrCurve> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "threshold,precision,recall" => {}
            _ => {
                return Err(Error::MalformedRow(
                    "missing `threshold,precision,recall` header".into(),
                ))
            }
        }
        let mut points = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::MalformedRow(line.to_string()).at_line("pr curve", i + 2))?;
            let [threshold, precision, recall] = cols[..] else {
                return Err(Error::MalformedRow(line.to_string()).at_line("pr curve", i + 2));
            };
            points.push(PrPoint {
                threshold,
                precision,
                recall,
            });
        }
        Ok(PrCurve {
            points,
            base_rate: f64::NAN,
        })
    }
}
