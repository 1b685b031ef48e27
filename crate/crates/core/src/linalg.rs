//! Incremental exact Gaussian elimination over the number field.
//!
//! Vectors are sparse maps from an ordered key type to [`Number`]. Each stored
//! row has its smallest key as pivot, so reducing a vector only needs one
//! ascending sweep over its keys.

use std::collections::BTreeMap;

use crate::number::Number;

pub type SparseVec<K> = BTreeMap<K, Number>;

#[derive(Clone, Debug)]
struct Row<K> {
    vec: SparseVec<K>,
    // combination of inserted vectors producing this row
    combo: BTreeMap<usize, Number>,
}

#[derive(Clone, Debug)]
pub struct Echelon<K: Ord + Clone> {
    rows: Vec<Row<K>>,
    pivots: BTreeMap<K, usize>,
    inserted: usize,
    track: bool,
}

impl<K: Ord + Clone> Default for Echelon<K> {
    fn default() -> Self {
        Echelon::new()
    }
}

fn axpy<K: Ord + Clone>(y: &mut SparseVec<K>, a: &Number, x: &SparseVec<K>) {
    for (k, v) in x {
        let t = a.mul(v);
        match y.get_mut(k) {
            Some(cur) => {
                let s = cur.add(&t);
                if s.is_zero() {
                    y.remove(k);
                } else {
                    *cur = s;
                }
            }
            None => {
                if !t.is_zero() {
                    y.insert(k.clone(), t);
                }
            }
        }
    }
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Echelon {
            rows: Vec::new(),
            pivots: BTreeMap::new(),
            inserted: 0,
            track: false,
        }
    }

    /// Echelon form that remembers how each row combines the inserted vectors.
    pub fn tracking() -> Self {
        Echelon {
            track: true,
            ..Echelon::new()
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce_inner(&self, v: &mut SparseVec<K>, combo: &mut BTreeMap<usize, Number>) {
        let mut cursor: Option<K> = None;
        loop {
            let next = match &cursor {
                None => v.keys().find(|k| self.pivots.contains_key(*k)).cloned(),
                Some(c) => v
                    .range(c.clone()..)
                    .map(|(k, _)| k)
                    .find(|k| self.pivots.contains_key(*k))
                    .cloned(),
            };
            let Some(k) = next else { break };
            let r = &self.rows[self.pivots[&k]];
            let factor = v[&k].neg();
            axpy(v, &factor, &r.vec);
            if self.track {
                axpy(combo, &factor, &r.combo);
            }
            cursor = Some(k);
        }
    }

    /// Remainder of `v` modulo the span.
    pub fn reduce(&self, v: &SparseVec<K>) -> SparseVec<K> {
        let mut v = v.clone();
        let mut combo = BTreeMap::new();
        self.reduce_inner(&mut v, &mut combo);
        v
    }

    pub fn is_independent(&self, v: &SparseVec<K>) -> bool {
        !self.reduce(v).is_empty()
    }

    /// Insert `v`; returns whether it enlarged the span. The vector is counted
    /// as inserted (for tracking indices) either way.
    pub fn insert(&mut self, v: &SparseVec<K>) -> bool {
        let idx = self.inserted;
        self.inserted += 1;
        let mut v = v.clone();
        let mut combo = BTreeMap::new();
        if self.track {
            combo.insert(idx, Number::one());
        }
        self.reduce_inner(&mut v, &mut combo);
        let Some((k, lead)) = v.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
            return false;
        };
        let inv = lead.inv().expect("nonzero pivot");
        for c in v.values_mut() {
            *c = c.mul(&inv);
        }
        for c in combo.values_mut() {
            *c = c.mul(&inv);
        }
        self.pivots.insert(k, self.rows.len());
        self.rows.push(Row { vec: v, combo });
        true
    }

    /// Express `target` as a combination of the inserted vectors, if it lies
    /// in their span. Requires a tracking echelon.
    pub fn solve(&self, target: &SparseVec<K>) -> Option<BTreeMap<usize, Number>> {
        assert!(self.track, "solve needs a tracking echelon");
        let mut v = target.clone();
        let mut combo = BTreeMap::new();
        self.reduce_inner(&mut v, &mut combo);
        if !v.is_empty() {
            return None;
        }
        // target - sum(combo) = 0, so target = -combo
        Some(combo.into_iter().map(|(i, c)| (i, c.neg())).collect())
    }
}

/// Rank of a list of sparse vectors.
pub fn rank<K: Ord + Clone>(vs: &[SparseVec<K>]) -> usize {
    let mut e = Echelon::new();
    for v in vs {
        e.insert(v);
    }
    e.rank()
}

/// Basis of the kernel of a dense matrix (rows x cols) over the number field.
pub fn kernel(rows: &[Vec<Number>], ncols: usize) -> Vec<Vec<Number>> {
    // reduced row echelon form
    let mut m: Vec<Vec<Number>> = rows.to_vec();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().unwrap();
        for x in m[r].iter_mut() {
            *x = x.mul(&inv);
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let (src, dst) = if i < r {
                    let (a, b) = m.split_at_mut(r);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = m.split_at_mut(i);
                    (&a[r], &mut b[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d = d.sub(&f.mul(s));
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivot_cols.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Number::zero(); ncols];
            v[f] = Number::one();
            for (i, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = m[i][f].neg();
            }
            v
        })
        .collect()
}

/// Rank of a dense matrix.
pub fn dense_rank(rows: &[Vec<Number>], ncols: usize) -> usize {
    ncols - kernel(rows, ncols).len()
}
