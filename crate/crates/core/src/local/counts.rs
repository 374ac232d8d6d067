use std::collections::{BTreeMap, HashMap};

use crate::relation::{ArgumentPair, TypePairKey, TypedPredicate, TypedRelation};

/// Sparse predicate × argument-pair counts for one type pair.
///
/// Predicates and features are held in sorted order and every row is sorted
/// by feature index, so anything summed over a row is independent of the
/// order relations were accumulated in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    key: TypePairKey,
    predicates: Vec<String>,
    features: Vec<ArgumentPair>,
    rows: Vec<Vec<(u32, u64)>>,
    pred_marginal: Vec<u64>,
    feat_marginal: Vec<u64>,
    total: u64,
}

impl CountTable {
    /// Builds a table from `(predicate, argument pair, count)` cells.
    /// Repeated cells are summed and zero counts ignored.
    pub fn from_cells(
        key: TypePairKey,
        cells: impl IntoIterator<Item = (String, ArgumentPair, u64)>,
    ) -> Self {
        let mut merged: BTreeMap<String, BTreeMap<ArgumentPair, u64>> = BTreeMap::new();
        for (p, f, c) in cells {
            if c > 0 {
                *merged.entry(p).or_default().entry(f).or_default() += c;
            }
        }
        let mut feats: Vec<ArgumentPair> = merged
            .values()
            .flat_map(|row| row.keys().cloned())
            .collect();
        feats.sort();
        feats.dedup();
        let feat_index: HashMap<&ArgumentPair, u32> = feats
            .iter()
            .enumerate()
            .map(|(i, f)| (f, i as u32))
            .collect();

        let mut predicates = Vec::with_capacity(merged.len());
        let mut rows = Vec::with_capacity(merged.len());
        for (p, row) in &merged {
            predicates.push(p.clone());
            let mut r: Vec<(u32, u64)> = row.iter().map(|(f, &c)| (feat_index[f], c)).collect();
            r.sort_unstable();
            rows.push(r);
        }
        drop(feat_index);
        Self::assemble(key, predicates, feats, rows)
    }

    fn assemble(
        key: TypePairKey,
        predicates: Vec<String>,
        features: Vec<ArgumentPair>,
        rows: Vec<Vec<(u32, u64)>>,
    ) -> Self {
        let pred_marginal: Vec<u64> = rows
            .iter()
            .map(|r| r.iter().map(|&(_, c)| c).sum())
            .collect();
        let mut feat_marginal = vec![0u64; features.len()];
        for row in &rows {
            for &(f, c) in row {
                feat_marginal[f as usize] += c;
            }
        }
        let total = pred_marginal.iter().sum();
        CountTable {
            key,
            predicates,
            features,
            rows,
            pred_marginal,
            feat_marginal,
            total,
        }
    }

    pub fn key(&self) -> &TypePairKey {
        &self.key
    }

    pub fn predicates(&self) -> &[String] {
        &self.predicates
    }

    pub fn features(&self) -> &[ArgumentPair] {
        &self.features
    }

    pub fn row(&self, pred: usize) -> &[(u32, u64)] {
        &self.rows[pred]
    }

    pub fn rows(&self) -> &[Vec<(u32, u64)>] {
        &self.rows
    }

    pub fn pred_index(&self, predicate: &str) -> Option<usize> {
        self.predicates
            .binary_search_by(|p| p.as_str().cmp(predicate))
            .ok()
    }

    pub fn typed_predicate(&self, pred: usize) -> TypedPredicate {
        TypedPredicate {
            predicate: self.predicates[pred].clone(),
            type1: self.key.type_a().to_string(),
            type2: self.key.type_b().to_string(),
        }
    }

    pub fn count(&self, predicate: &str, feature: &ArgumentPair) -> u64 {
        let (Some(p), Ok(f)) = (
            self.pred_index(predicate),
            self.features.binary_search(feature),
        ) else {
            return 0;
        };
        self.rows[p]
            .binary_search_by_key(&(f as u32), |&(i, _)| i)
            .map(|i| self.rows[p][i].1)
            .unwrap_or(0)
    }

    pub fn pred_marginal(&self) -> &[u64] {
        &self.pred_marginal
    }

    pub fn feat_marginal(&self) -> &[u64] {
        &self.feat_marginal
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn num_predicates(&self) -> usize {
        self.predicates.len()
    }

    pub fn num_features(&self) -> usize {
        self.features.len()
    }

    pub fn num_cells(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Marginals agree with cells and no stored count is zero.
    pub fn is_consistent(&self) -> bool {
        let cell_sum: u64 = self.rows.iter().flatten().map(|&(_, c)| c).sum();
        cell_sum == self.total
            && self.pred_marginal.iter().sum::<u64>() == self.total
            && self.feat_marginal.iter().sum::<u64>() == self.total
            && self.rows.iter().flatten().all(|&(_, c)| c > 0)
            && self.feat_marginal.iter().all(|&c| c > 0)
    }

    /// Keeps only the given predicates and features, dropping features left
    /// without any predicate.
    fn restrict(&self, keep_pred: &[bool], keep_feat: &[bool]) -> CountTable {
        let mut used = vec![false; self.features.len()];
        for (p, row) in self.rows.iter().enumerate() {
            if keep_pred[p] {
                for &(f, _) in row {
                    if keep_feat[f as usize] {
                        used[f as usize] = true;
                    }
                }
            }
        }
        let mut remap = vec![u32::MAX; self.features.len()];
        let mut features = Vec::new();
        for (f, feat) in self.features.iter().enumerate() {
            if used[f] {
                remap[f] = features.len() as u32;
                features.push(feat.clone());
            }
        }
        let mut predicates = Vec::new();
        let mut rows = Vec::new();
        for (p, row) in self.rows.iter().enumerate() {
            if !keep_pred[p] {
                continue;
            }
            let r: Vec<(u32, u64)> = row
                .iter()
                .filter(|&&(f, _)| used[f as usize])
                .map(|&(f, c)| (remap[f as usize], c))
                .collect();
            if r.is_empty() {
                continue;
            }
            predicates.push(self.predicates[p].clone());
            rows.push(r);
        }
        Self::assemble(self.key.clone(), predicates, features, rows)
    }
}

/// Frequency filter applied once: argument pairs seen with fewer than
/// `min_preds_per_arg_pair` distinct predicates go first, then predicates
/// left with fewer than `min_arg_pairs_per_pred` distinct argument pairs.
pub fn apply_thresholds(
    table: &CountTable,
    min_arg_pairs_per_pred: usize,
    min_preds_per_arg_pair: usize,
) -> CountTable {
    let mut preds_per_feat = vec![0usize; table.num_features()];
    for row in table.rows() {
        for &(f, _) in row {
            preds_per_feat[f as usize] += 1;
        }
    }
    let keep_feat: Vec<bool> = preds_per_feat
        .iter()
        .map(|&n| n >= min_preds_per_arg_pair)
        .collect();
    let keep_pred: Vec<bool> = table
        .rows()
        .iter()
        .map(|row| {
            row.iter().filter(|&&(f, _)| keep_feat[f as usize]).count() >= min_arg_pairs_per_pred
        })
        .collect();
    table.restrict(&keep_pred, &keep_feat)
}

/// Accumulates typed relations into per-type-pair count tables.
///
/// Accumulators merge commutatively, so shards can be counted
/// independently and combined in any order.
#[derive(Debug, Default, Clone)]
pub struct CountAccumulator {
    tables: HashMap<TypePairKey, TableBuilder>,
}

#[derive(Debug, Default, Clone)]
struct TableBuilder {
    preds: HashMap<String, u32>,
    feats: HashMap<ArgumentPair, u32>,
    pred_names: Vec<String>,
    feat_values: Vec<ArgumentPair>,
    cells: HashMap<(u32, u32), u64>,
}

impl TableBuilder {
    fn add(&mut self, predicate: &str, args: &ArgumentPair, n: u64) {
        let p = match self.preds.get(predicate) {
            Some(&p) => p,
            None => {
                let p = self.pred_names.len() as u32;
                self.preds.insert(predicate.to_string(), p);
                self.pred_names.push(predicate.to_string());
                p
            }
        };
        let f = match self.feats.get(args) {
            Some(&f) => f,
            None => {
                let f = self.feat_values.len() as u32;
                self.feats.insert(args.clone(), f);
                self.feat_values.push(args.clone());
                f
            }
        };
        *self.cells.entry((p, f)).or_default() += n;
    }

    fn merge(&mut self, other: TableBuilder) {
        for ((p, f), c) in other.cells {
            self.add(
                &other.pred_names[p as usize],
                &other.feat_values[f as usize],
                c,
            );
        }
    }

    fn finish(self, key: TypePairKey) -> CountTable {
        let TableBuilder {
            pred_names,
            feat_values,
            cells,
            ..
        } = self;
        CountTable::from_cells(
            key,
            cells.into_iter().map(|((p, f), c)| {
                (
                    pred_names[p as usize].clone(),
                    feat_values[f as usize].clone(),
                    c,
                )
            }),
        )
    }
}

impl CountAccumulator {
    pub fn add(&mut self, relation: &TypedRelation) {
        self.tables.entry(relation.key.clone()).or_default().add(
            &relation.predicate.predicate,
            &relation.args,
            1,
        );
    }

    pub fn merge(mut self, other: CountAccumulator) -> CountAccumulator {
        for (key, builder) in other.tables {
            match self.tables.get_mut(&key) {
                Some(existing) => existing.merge(builder),
                None => {
                    self.tables.insert(key, builder);
                }
            }
        }
        self
    }

    pub fn finish(self) -> BTreeMap<TypePairKey, CountTable> {
        self.tables
            .into_iter()
            .map(|(key, b)| {
                let table = b.finish(key.clone());
                (key, table)
            })
            .collect()
    }
}

pub fn accumulate_counts<'a>(
    relations: impl IntoIterator<Item = &'a TypedRelation>,
) -> BTreeMap<TypePairKey, CountTable> {
    let mut acc = CountAccumulator::default();
    for r in relations {
        acc.add(r);
    }
    acc.finish()
}

/// Parallel accumulation over a slice of relations in the current rayon pool.
pub fn accumulate_counts_par(relations: &[TypedRelation]) -> BTreeMap<TypePairKey, CountTable> {
    use rayon::prelude::*;
    relations
        .par_chunks(4096)
        .map(|chunk| {
            let mut acc = CountAccumulator::default();
            for r in chunk {
                acc.add(r);
            }
            acc
        })
        .reduce(CountAccumulator::default, CountAccumulator::merge)
        .finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::{type_relation, RelationTriple, TypeMap};
    use proptest::prelude::*;

    fn pair(a: &str, b: &str) -> ArgumentPair {
        ArgumentPair {
            arg_a: a.into(),
            arg_b: b.into(),
        }
    }

    fn typed(pred: &str, a: &str, b: &str, map: &TypeMap) -> TypedRelation {
        type_relation(&RelationTriple::new(pred, a, b).unwrap(), map)
    }

    fn sports_map() -> TypeMap {
        let mut m = TypeMap::default();
        for team in ["Falcons", "Seahawks"] {
            m.insert(team, "organization").unwrap();
        }
        m.insert("Biden", "person").unwrap();
        m.insert("USA", "location").unwrap();
        m
    }

    #[test]
    fn repeated_instances_accumulate() {
        let map = sports_map();
        let rels: Vec<_> = (0..3)
            .map(|_| typed("beat", "Falcons", "Seahawks", &map))
            .collect();
        let tables = accumulate_counts(&rels);
        let t = &tables[&TypePairKey::new("organization", "organization")];
        assert_eq!(t.count("beat", &pair("Falcons", "Seahawks")), 3);
        assert_eq!(t.pred_marginal(), &[3]);
        assert_eq!(t.total(), 3);
        assert!(t.is_consistent());
    }

    #[test]
    fn type_pairs_are_disjoint() {
        let map = sports_map();
        let rels = vec![
            typed("elect", "Biden", "USA", &map),
            typed("beat", "Falcons", "Seahawks", &map),
        ];
        let tables = accumulate_counts(&rels);
        assert_eq!(tables.len(), 2);
        let lp = &tables[&TypePairKey::new("location", "person")];
        assert_eq!(lp.predicates(), &["elect#rev".to_string()]);
        assert_eq!(lp.features(), &[pair("USA", "Biden")]);
        let oo = &tables[&TypePairKey::new("organization", "organization")];
        assert_eq!(oo.predicates(), &["beat".to_string()]);
    }

    #[test]
    fn thresholds_one_is_noop() {
        let key = TypePairKey::new("a", "b");
        let t = CountTable::from_cells(
            key,
            [("p", "x", "y", 2), ("q", "x", "z", 1)]
                .map(|(p, a, b, c)| (p.to_string(), pair(a, b), c)),
        );
        assert_eq!(apply_thresholds(&t, 1, 1), t);
    }

    #[test]
    fn predicate_with_three_pairs_dropped() {
        let key = TypePairKey::new("a", "b");
        let mut cells = Vec::new();
        // four predicates share four pairs; `rare` has only three of them
        for p in ["p1", "p2", "p3", "p4"] {
            for f in ["f1", "f2", "f3", "f4"] {
                cells.push((p.to_string(), pair(f, "z"), 1));
            }
        }
        for f in ["f1", "f2", "f3"] {
            cells.push(("rare".to_string(), pair(f, "z"), 5));
        }
        let t = apply_thresholds(&CountTable::from_cells(key, cells), 4, 4);
        assert_eq!(t.predicates(), &["p1", "p2", "p3", "p4"]);
        assert_eq!(t.total(), 16);
        assert!(t.is_consistent());
    }

    /// Direct transcription of the filter over a dense matrix.
    fn brute_threshold(
        cells: &[(usize, usize, u64)],
        n_pred: usize,
        n_feat: usize,
        min_ap: usize,
        min_pp: usize,
    ) -> Vec<(usize, usize, u64)> {
        let mut dense = vec![vec![0u64; n_feat]; n_pred];
        for &(p, f, c) in cells {
            dense[p][f] += c;
        }
        let feat_ok: Vec<bool> = (0..n_feat)
            .map(|f| (0..n_pred).filter(|&p| dense[p][f] > 0).count() >= min_pp)
            .collect();
        let pred_ok: Vec<bool> = (0..n_pred)
            .map(|p| {
                (0..n_feat)
                    .filter(|&f| feat_ok[f] && dense[p][f] > 0)
                    .count()
                    >= min_ap
            })
            .collect();
        let mut out = Vec::new();
        for p in 0..n_pred {
            for f in 0..n_feat {
                if pred_ok[p] && feat_ok[f] && dense[p][f] > 0 {
                    out.push((p, f, dense[p][f]));
                }
            }
        }
        out
    }

    #[test]
    fn six_by_eight_matches_enumeration() {
        // predicate i sees pairs i..i+k with k varying
        let spans = [(0, 6), (0, 5), (1, 4), (2, 8), (4, 8), (5, 7)];
        let mut cells = Vec::new();
        for (p, &(lo, hi)) in spans.iter().enumerate() {
            for f in lo..hi {
                cells.push((p, f, 1 + (p + f) as u64 % 3));
            }
        }
        let expected = brute_threshold(&cells, 6, 8, 4, 4);
        let table = CountTable::from_cells(
            TypePairKey::new("a", "b"),
            cells
                .iter()
                .map(|&(p, f, c)| (format!("p{p}"), pair(&format!("f{f}"), "z"), c)),
        );
        let got = apply_thresholds(&table, 4, 4);
        let mut got_cells = Vec::new();
        for (pi, p) in got.predicates().iter().enumerate() {
            for &(fi, c) in got.row(pi) {
                let f = &got.features()[fi as usize].arg_a;
                got_cells.push((
                    p[1..].parse::<usize>().unwrap(),
                    f[1..].parse::<usize>().unwrap(),
                    c,
                ));
            }
        }
        got_cells.sort();
        assert_eq!(got_cells, expected);
        // only f2..f5 have four predicates, and only p0 and p3 cover all four
        assert_eq!(got.predicates(), &["p0", "p3"]);
    }

    proptest! {
        #[test]
        fn totals_match_input_and_order_is_irrelevant(
            rels in proptest::collection::vec((0usize..6, 0usize..5, 0usize..5, 0usize..3), 1..300)
        ) {
            let mut map = TypeMap::default();
            let types = ["person", "location", "organization"];
            for e in 0..5 {
                map.insert(&format!("e{e}"), types[e % 3]).unwrap();
            }
            let typed_rels: Vec<_> = rels
                .iter()
                .map(|&(p, a, b, _)| typed(&format!("p{p}"), &format!("e{a}"), &format!("e{b}"), &map))
                .collect();
            let tables = accumulate_counts(&typed_rels);
            let total: u64 = tables.values().map(|t| t.total()).sum();
            prop_assert_eq!(total, rels.len() as u64);
            for (key, t) in &tables {
                prop_assert!(t.is_consistent());
                let expected = typed_rels.iter().filter(|r| &r.key == key).count() as u64;
                prop_assert_eq!(t.total(), expected);
            }
            let mut reversed = typed_rels.clone();
            reversed.reverse();
            prop_assert_eq!(&accumulate_counts(&reversed), &tables);
            prop_assert_eq!(&accumulate_counts_par(&typed_rels), &tables);
        }
    }
}
