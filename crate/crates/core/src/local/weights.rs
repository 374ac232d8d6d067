use std::collections::BTreeMap;

use super::counts::CountTable;
use crate::error::{Error, Result};
use crate::relation::TypePairKey;

/// Positive-PMI weighted rows, one per predicate, sorted by feature index.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRows {
    rows: Vec<Vec<(u32, f64)>>,
    sums: Vec<f64>,
}

impl SparseRows {
    pub fn row(&self, i: usize) -> &[(u32, f64)] {
        &self.rows[i]
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.sums[i]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    pub fn num_weights(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }
}

/// PPMI of each cell; cells whose PMI is not strictly positive are dropped.
///
/// The sign test runs on exact integer products, so statistically independent
/// cells are dropped without depending on floating-point rounding.
fn ppmi(
    rows: &[Vec<(u32, u64)>],
    pred_marginal: &[u64],
    feat_marginal: &[u64],
    total: u64,
) -> SparseRows {
    let mut out = Vec::with_capacity(rows.len());
    let mut sums = Vec::with_capacity(rows.len());
    for (p, row) in rows.iter().enumerate() {
        let mut weighted = Vec::new();
        let mut sum = 0.0;
        for &(f, c) in row {
            let num = u128::from(c) * u128::from(total);
            let den = u128::from(pred_marginal[p]) * u128::from(feat_marginal[f as usize]);
            if num <= den {
                continue;
            }
            let w = (num as f64 / den as f64).ln();
            if w > 0.0 {
                weighted.push((f, w));
                sum += w;
            }
        }
        out.push(weighted);
        sums.push(sum);
    }
    SparseRows { rows: out, sums }
}

/// Per-slot PPMI rows used by the DIRT measure: slot A features are the
/// first argument alone, slot B the second.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotWeights {
    pub slot_a: SparseRows,
    pub slot_b: SparseRows,
}

fn slot_rows(table: &CountTable, pick_a: bool) -> SparseRows {
    let mut ids: BTreeMap<&str, u32> = BTreeMap::new();
    for f in table.features() {
        let v = if pick_a { &f.arg_a } else { &f.arg_b };
        ids.entry(v.as_str()).or_insert(0);
    }
    for (i, v) in ids.values_mut().enumerate() {
        *v = i as u32;
    }
    let mut feat_marginal = vec![0u64; ids.len()];
    let rows: Vec<Vec<(u32, u64)>> = table
        .rows()
        .iter()
        .map(|row| {
            let mut slot: BTreeMap<u32, u64> = BTreeMap::new();
            for &(f, c) in row {
                let pair = &table.features()[f as usize];
                let v = if pick_a { &pair.arg_a } else { &pair.arg_b };
                *slot.entry(ids[v.as_str()]).or_default() += c;
            }
            slot.into_iter().collect()
        })
        .collect();
    for row in &rows {
        for &(f, c) in row {
            feat_marginal[f as usize] += c;
        }
    }
    ppmi(&rows, table.pred_marginal(), &feat_marginal, table.total())
}

/// PPMI weights of one count table. Predicates keep their table order even
/// when every weight in their row was clamped away.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    key: TypePairKey,
    predicates: Vec<String>,
    weights: SparseRows,
    slots: Option<SlotWeights>,
}

pub fn compute_weights(table: &CountTable) -> Result<WeightTable> {
    if table.total() == 0 {
        return Err(Error::DegenerateTable(table.key().to_string()));
    }
    Ok(WeightTable {
        key: table.key().clone(),
        predicates: table.predicates().to_vec(),
        weights: ppmi(
            table.rows(),
            table.pred_marginal(),
            table.feat_marginal(),
            table.total(),
        ),
        slots: None,
    })
}

impl WeightTable {
    /// Adds the per-slot weights needed for DIRT scores.
    pub fn with_slot_weights(mut self, table: &CountTable) -> Self {
        self.slots = Some(SlotWeights {
            slot_a: slot_rows(table, true),
            slot_b: slot_rows(table, false),
        });
        self
    }

    pub fn key(&self) -> &TypePairKey {
        &self.key
    }

    pub fn predicates(&self) -> &[String] {
        &self.predicates
    }

    pub fn pred_index(&self, predicate: &str) -> Option<usize> {
        self.predicates
            .binary_search_by(|p| p.as_str().cmp(predicate))
            .ok()
    }

    pub fn weights(&self) -> &SparseRows {
        &self.weights
    }

    pub fn slots(&self) -> Option<&SlotWeights> {
        self.slots.as_ref()
    }

    pub fn row(&self, pred: usize) -> &[(u32, f64)] {
        self.weights.row(pred)
    }

    pub fn weight(&self, pred: usize, feature: u32) -> Option<f64> {
        let row = self.weights.row(pred);
        row.binary_search_by_key(&feature, |&(f, _)| f)
            .ok()
            .map(|i| row[i].1)
    }

    pub fn num_predicates(&self) -> usize {
        self.predicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}
