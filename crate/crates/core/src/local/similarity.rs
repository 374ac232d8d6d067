//! Distributional similarity between weighted predicate rows.

use super::weights::{SparseRows, WeightTable};

/// Walks the shared features of two sorted rows, yielding `(w_p, w_q)`.
fn shared<'a>(p: &'a [(u32, f64)], q: &'a [(u32, f64)]) -> impl Iterator<Item = (f64, f64)> + 'a {
    let (mut i, mut j) = (0, 0);
    std::iter::from_fn(move || {
        while i < p.len() && j < q.len() {
            match p[i].0.cmp(&q[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let out = (p[i].1, q[j].1);
                    i += 1;
                    j += 1;
                    return Some(out);
                }
            }
        }
        None
    })
}

/// Weighted share of `p`'s features that `q` also has.
pub fn weeds_precision_rows(p: &[(u32, f64)], p_sum: f64, q: &[(u32, f64)]) -> f64 {
    if p_sum <= 0.0 {
        return 0.0;
    }
    let covered: f64 = shared(p, q).map(|(wp, _)| wp).sum();
    (covered / p_sum).min(1.0)
}

pub fn lin_rows(p: &[(u32, f64)], p_sum: f64, q: &[(u32, f64)], q_sum: f64) -> f64 {
    let denom = p_sum + q_sum;
    if denom <= 0.0 {
        return 0.0;
    }
    let num: f64 = shared(p, q).map(|(wp, wq)| wp + wq).sum();
    (num / denom).min(1.0)
}

/// Balanced inclusion: geometric mean of Lin similarity and Weeds precision.
pub fn binc_rows(p: &[(u32, f64)], p_sum: f64, q: &[(u32, f64)], q_sum: f64) -> f64 {
    (lin_rows(p, p_sum, q, q_sum) * weeds_precision_rows(p, p_sum, q)).sqrt()
}

/// Harmonic mean of Weeds precision in both directions.
pub fn weeds_similarity_rows(p: &[(u32, f64)], p_sum: f64, q: &[(u32, f64)], q_sum: f64) -> f64 {
    let precision = weeds_precision_rows(p, p_sum, q);
    let recall = weeds_precision_rows(q, q_sum, p);
    if precision + recall <= 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

fn lin_in(rows: &SparseRows, p: usize, q: usize) -> f64 {
    lin_rows(rows.row(p), rows.row_sum(p), rows.row(q), rows.row_sum(q))
}

impl WeightTable {
    pub fn weeds_precision(&self, p: usize, q: usize) -> f64 {
        let w = self.weights();
        weeds_precision_rows(w.row(p), w.row_sum(p), w.row(q))
    }

    pub fn lin_similarity(&self, p: usize, q: usize) -> f64 {
        lin_in(self.weights(), p, q)
    }

    pub fn binc(&self, p: usize, q: usize) -> f64 {
        let w = self.weights();
        binc_rows(w.row(p), w.row_sum(p), w.row(q), w.row_sum(q))
    }

    pub fn weeds_similarity(&self, p: usize, q: usize) -> f64 {
        let w = self.weights();
        weeds_similarity_rows(w.row(p), w.row_sum(p), w.row(q), w.row_sum(q))
    }

    /// DIRT: geometric mean of the per-slot Lin similarities. `None` unless
    /// slot weights were computed.
    pub fn dirt(&self, p: usize, q: usize) -> Option<f64> {
        let slots = self.slots()?;
        Some((lin_in(&slots.slot_a, p, q) * lin_in(&slots.slot_b, p, q)).sqrt())
    }
}
