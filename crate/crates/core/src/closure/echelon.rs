//! Sparse row echelon form modulo the engine prime, tracking for every row
//! the combination of inserted vectors it came from.

use std::collections::{BTreeMap, HashMap};

use crate::modp;

pub type SparseVec = BTreeMap<usize, u64>;

#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<Row>,
    pivot_of: HashMap<usize, usize>,
}

#[derive(Clone, Debug)]
struct Row {
    /// Normalized so the pivot (smallest column) is one.
    entries: SparseVec,
    combo: SparseVec,
}

fn axpy(target: &mut SparseVec, factor: u64, source: &SparseVec) {
    for (&k, &v) in source {
        let delta = modp::mul(factor, v);
        let slot = target.entry(k).or_insert(0);
        *slot = modp::sub(*slot, delta);
        if *slot == 0 {
            target.remove(&k);
        }
    }
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Eliminates every pivot column from `v`; returns the residual and the
    /// updated combination, so that `original = residual + Σ combo`-weighted
    /// inserted vectors (with `combo` starting from the caller's value and
    /// accumulating `-factor · row.combo`).
    pub fn reduce(&self, v: SparseVec, combo: SparseVec) -> (SparseVec, SparseVec) {
        let (residual, combo) = self.reduce_inner(v, Some(combo));
        (residual, combo.unwrap_or_default())
    }

    fn reduce_inner(&self, mut v: SparseVec, mut combo: Option<SparseVec>) -> (SparseVec, Option<SparseVec>) {
        let mut cursor = 0usize;
        loop {
            let next = v
                .range(cursor..)
                .find(|(c, _)| self.pivot_of.contains_key(c))
                .map(|(c, x)| (*c, *x));
            let Some((col, x)) = next else { break };
            let row = &self.rows[self.pivot_of[&col]];
            axpy(&mut v, x, &row.entries);
            if let Some(c) = combo.as_mut() {
                axpy(c, x, &row.combo);
            }
            cursor = col + 1;
        }
        (v, combo)
    }

    pub fn is_independent(&self, v: &SparseVec) -> bool {
        !self.reduce_inner(v.clone(), None).0.is_empty()
    }

    /// Inserts an already reduced, non-zero residual with its combination.
    pub fn insert_reduced(&mut self, residual: SparseVec, combo: SparseVec) {
        let (&pivot, &lead) = residual.iter().next().expect("non-zero residual");
        let inv = modp::inv(lead).expect("non-zero pivot");
        let scale = |m: SparseVec| -> SparseVec { m.into_iter().map(|(k, x)| (k, modp::mul(x, inv))).collect() };
        self.pivot_of.insert(pivot, self.rows.len());
        self.rows.push(Row { entries: scale(residual), combo: scale(combo) });
    }

    /// Reduces and inserts `v` tagged as inserted vector `id`; returns
    /// whether it was independent.
    pub fn insert(&mut self, v: SparseVec, id: usize) -> bool {
        if !self.is_independent(&v) {
            return false;
        }
        let (residual, combo) = self.reduce(v, SparseVec::from([(id, 1)]));
        if residual.is_empty() {
            return false;
        }
        self.insert_reduced(residual, combo);
        true
    }

    /// If `v` lies in the span, its coordinates over the inserted vectors.
    pub fn express(&self, v: SparseVec) -> Option<SparseVec> {
        let (residual, combo) = self.reduce(v, SparseVec::new());
        // v - Σ x_r row_r = residual and row_r = Σ combo_r, with combo
        // accumulated as -Σ x_r combo_r.
        residual.is_empty().then(|| combo.into_iter().map(|(k, x)| (k, modp::sub(0, x))).collect())
    }
}
