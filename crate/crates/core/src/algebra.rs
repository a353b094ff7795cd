//! Constructors that a qED universe must be closed under, and the ones that
//! follow from them.

use std::collections::BTreeMap;

use num_integer::binomial;

use crate::error::{Error, Result};
use crate::kernel::{Elem, QSet};

/// Enumeration limits for the combinatorial constructors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest operand quasi-cardinal accepted by [`power`].
    pub power: u64,
    /// Largest result quasi-cardinal accepted by [`product`].
    pub product: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            power: 16,
            product: 4096,
        }
    }
}

/// Power qset. Choosing `k` out of a class of `n` indistinguishable elements
/// yields one sub-form carrying multiplicity `C(n, k)`, so the result has
/// quasi-cardinal `2^qcard(x)`.
pub fn power(x: &QSet, caps: &Caps) -> Result<QSet> {
    let qc = x.qcard().get();
    if qc > caps.power {
        return Err(Error::CapExceeded {
            what: "power operand qcard",
            limit: caps.power,
            actual: qc,
        });
    }
    let classes: Vec<(&Elem, u64)> = x.iter().collect();
    let mut choice = vec![0u64; classes.len()];
    let mut out = BTreeMap::new();
    loop {
        let mut sub = BTreeMap::new();
        let mut mult = 1u64;
        for (&(e, n), &k) in classes.iter().zip(&choice) {
            if k > 0 {
                sub.insert(e.clone(), k);
            }
            mult *= binomial(n, k);
        }
        out.insert(Elem::Set(QSet::from_map(sub)), mult);

        // mixed-radix increment
        let mut i = 0;
        loop {
            if i == classes.len() {
                return Ok(QSet::from_map(out));
            }
            if choice[i] < classes[i].1 {
                choice[i] += 1;
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// `[x]_U`: the whole indistinguishability class of `x` in `universe`, with
/// its multiplicity there.
pub fn singleton_in(x: &Elem, universe: &QSet) -> Result<QSet> {
    match universe.count(x) {
        0 => Err(Error::NotInUniverse),
        n => Ok(QSet::from_map(BTreeMap::from([(x.clone(), n)]))),
    }
}

/// `[x, y]_U = [x]_U ∪ [y]_U`.
pub fn pair_in(x: &Elem, y: &Elem, universe: &QSet) -> Result<QSet> {
    Ok(union(
        &singleton_in(x, universe)?,
        &singleton_in(y, universe)?,
    ))
}

/// `<x, y>_U = { [x]_U, [x, y]_U }`, each with count 1. When the two
/// components coincide the result has a single element.
pub fn opair_in(x: &Elem, y: &Elem, universe: &QSet) -> Result<QSet> {
    let first = singleton_in(x, universe)?;
    let both = pair_in(x, y, universe)?;
    let mut m = BTreeMap::new();
    m.insert(Elem::Set(first), 1);
    m.insert(Elem::Set(both), 1);
    Ok(QSet::from_map(m))
}

/// Cartesian product over primitive pairs. The pair of classes `(a, b)`
/// carries multiplicity `count_x(a) * count_y(b)`.
pub fn product(x: &QSet, y: &QSet, caps: &Caps) -> Result<QSet> {
    let qc = x.qcard().get() * y.qcard().get();
    if qc > caps.product {
        return Err(Error::CapExceeded {
            what: "product result qcard",
            limit: caps.product,
            actual: qc,
        });
    }
    let mut out = BTreeMap::new();
    for (a, n) in x.iter() {
        for (b, m) in y.iter() {
            out.insert(Elem::pair(a.clone(), b.clone()), n * m);
        }
    }
    Ok(QSet::from_map(out))
}

/// Class-wise maximum of counts.
pub fn union(x: &QSet, y: &QSet) -> QSet {
    let mut out = x.elems().clone();
    for (e, n) in y.iter() {
        let slot = out.entry(e.clone()).or_insert(0);
        *slot = (*slot).max(n);
    }
    QSet::from_map(out)
}

/// A family of qsets indexed by the elements of a classical qset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedFamily {
    index: QSet,
    entries: BTreeMap<Elem, QSet>,
}

impl IndexedFamily {
    pub fn new(index: QSet, entries: BTreeMap<Elem, QSet>) -> Result<Self> {
        if !index.is_classical() {
            return Err(Error::NonClassicalIndex);
        }
        if entries.len() != index.class_count() || !entries.keys().all(|k| index.contains(k)) {
            return Err(Error::FamilyMismatch);
        }
        Ok(IndexedFamily { index, entries })
    }

    pub fn index(&self) -> &QSet {
        &self.index
    }

    pub fn entries(&self) -> &BTreeMap<Elem, QSet> {
        &self.entries
    }
}

/// `⋃_{i ∈ I} x_i`. The empty family yields the empty qset.
pub fn family_union(f: &IndexedFamily) -> Result<QSet> {
    if !f.index.is_classical() {
        return Err(Error::NonClassicalIndex);
    }
    Ok(f.entries
        .values()
        .fold(QSet::empty(), |acc, x| union(&acc, x)))
}

/// The von Neumann ordinal `n` as a classical qset.
pub fn ordinal(n: usize) -> QSet {
    let mut acc: Vec<Elem> = Vec::with_capacity(n);
    for _ in 0..n {
        let next = QSet::from_elems(acc.iter().cloned());
        acc.push(Elem::Set(next));
    }
    QSet::from_elems(acc)
}

/// Intersection, class-wise minimum. Not part of the closure conditions.
#[allow(dead_code)]
pub(crate) fn intersection(x: &QSet, y: &QSet) -> QSet {
    let out = x
        .iter()
        .filter_map(|(e, n)| match y.count(e) {
            0 => None,
            m => Some((e.clone(), n.min(m))),
        })
        .collect();
    QSet::from_map(out)
}
