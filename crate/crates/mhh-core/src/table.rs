//! Dimension tables: sparse maps from a degree key to a dimension, with
//! optional basis labels per degree. Used for homology outputs, spectral
//! sequence pages, and ring Hilbert series, keyed either by full tridegree
//! or by abutment bidegree.

use crate::grading::{Bidegree, Tridegree};
use std::collections::BTreeMap;

/// A table of dimensions keyed by a degree type, with optional labels
/// describing a basis in each degree. Zero dimensions are not stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table<K: Ord + Copy> {
    dims: BTreeMap<K, usize>,
    labels: BTreeMap<K, Vec<String>>,
}

pub type DimensionTable = Table<Tridegree>;
pub type BidegreeTable = Table<Bidegree>;

impl<K: Ord + Copy> Table<K> {
    pub fn new() -> Self {
        Table { dims: BTreeMap::new(), labels: BTreeMap::new() }
    }

    pub fn get(&self, k: K) -> usize {
        self.dims.get(&k).copied().unwrap_or(0)
    }

    pub fn set(&mut self, k: K, dim: usize) {
        if dim == 0 {
            self.dims.remove(&k);
        } else {
            self.dims.insert(k, dim);
        }
    }

    pub fn add(&mut self, k: K, dim: usize) {
        if dim > 0 {
            *self.dims.entry(k).or_insert(0) += dim;
        }
    }

    pub fn set_labels(&mut self, k: K, labels: Vec<String>) {
        if labels.is_empty() {
            self.labels.remove(&k);
        } else {
            self.labels.insert(k, labels);
        }
    }

    pub fn push_labels(&mut self, k: K, labels: impl IntoIterator<Item = String>) {
        let entry = self.labels.entry(k).or_default();
        entry.extend(labels);
        if entry.is_empty() {
            self.labels.remove(&k);
        }
    }

    pub fn labels(&self, k: K) -> &[String] {
        self.labels.get(&k).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn iter(&self) -> impl Iterator<Item = (K, usize)> + '_ {
        self.dims.iter().map(|(k, d)| (*k, *d))
    }

    pub fn keys(&self) -> impl Iterator<Item = K> + '_ {
        self.dims.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Total dimension over all stored degrees.
    pub fn total(&self) -> usize {
        self.dims.values().sum()
    }

    /// Keep only the entries whose key satisfies the predicate.
    pub fn restrict(&self, mut keep: impl FnMut(K) -> bool) -> Self {
        let mut out = Table::new();
        for (k, d) in self.iter() {
            if keep(k) {
                out.set(k, d);
                out.set_labels(k, self.labels(k).to_vec());
            }
        }
        out
    }

    /// Degrees where the two tables disagree, as (key, self dim, other dim).
    pub fn diff(&self, other: &Self) -> Vec<(K, usize, usize)> {
        let mut keys: Vec<K> = self.keys().collect();
        keys.extend(other.keys());
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .filter_map(|k| {
                let (a, b) = (self.get(k), other.get(k));
                if a != b { Some((k, a, b)) } else { None }
            })
            .collect()
    }
}

impl DimensionTable {
    /// Project to abutment bidegrees (stem, weight), summing dimensions over
    /// filtration and concatenating labels in increasing filtration order.
    pub fn to_bidegrees(&self) -> BidegreeTable {
        let mut out = BidegreeTable::new();
        for (t, d) in self.iter() {
            let b = t.bidegree();
            out.add(b, d);
            out.push_labels(b, self.labels(t).iter().cloned());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_dimensions_are_not_stored() {
        let mut t = DimensionTable::new();
        t.set(Tridegree::new(1, 2, 0), 3);
        t.set(Tridegree::new(1, 2, 0), 0);
        assert!(t.is_empty());
        t.add(Tridegree::new(0, 0, 0), 0);
        assert_eq!(t.len(), 0);
    }

    #[test]
    fn bidegree_projection_sums_filtrations() {
        let mut t = DimensionTable::new();
        t.set(Tridegree::new(1, 3, 1), 1);
        t.set(Tridegree::new(2, 2, 1), 2);
        t.set_labels(Tridegree::new(1, 3, 1), vec!["a".into()]);
        t.set_labels(Tridegree::new(2, 2, 1), vec!["b".into(), "c".into()]);
        let b = t.to_bidegrees();
        assert_eq!(b.get(Bidegree::new(4, 1)), 3);
        assert_eq!(b.labels(Bidegree::new(4, 1)), &["a", "b", "c"]);
    }

    #[test]
    fn diff_reports_both_directions() {
        let mut a = BidegreeTable::new();
        let mut b = BidegreeTable::new();
        a.set(Bidegree::new(0, 0), 1);
        a.set(Bidegree::new(2, 0), 1);
        b.set(Bidegree::new(2, 0), 2);
        b.set(Bidegree::new(4, 1), 1);
        let d = a.diff(&b);
        assert_eq!(
            d,
            vec![
                (Bidegree::new(0, 0), 1, 0),
                (Bidegree::new(2, 0), 1, 2),
                (Bidegree::new(4, 1), 0, 1),
            ]
        );
    }
}
