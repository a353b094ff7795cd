//! Brute-force reference implementations. Nothing here goes through the
//! canonical `QSet` machinery: values are handled as labeled trees and
//! compared by exhaustive matching or by a sorted-string normal form.
#![allow(dead_code)]

use std::collections::BTreeMap;

use qset_core::kernel::{Elem, Label, LabeledElem, LabeledSet, QSet};

/// Recursive indistinguishability on labeled trees: atoms by kind or id, sets
/// by a perfect matching of indistinguishable elements.
pub fn labeled_indist(a: &LabeledElem, b: &LabeledElem) -> bool {
    match (a, b) {
        (LabeledElem::MAtom { kind: k1, .. }, LabeledElem::MAtom { kind: k2, .. }) => k1 == k2,
        (LabeledElem::CAtom(x), LabeledElem::CAtom(y)) => x == y,
        (LabeledElem::Set(x), LabeledElem::Set(y)) => labeled_set_indist(x, y),
        (LabeledElem::Pair(a1, b1), LabeledElem::Pair(a2, b2)) => {
            labeled_indist(a1, a2) && labeled_indist(b1, b2)
        }
        _ => false,
    }
}

/// Two labeled sets are indistinguishable when their elements can be paired
/// off one-to-one with indistinguishable partners. Classical elements count
/// once however often they are listed.
pub fn labeled_set_indist(x: &LabeledSet, y: &LabeledSet) -> bool {
    let xs = dedup_classical(&x.0);
    let ys = dedup_classical(&y.0);
    if xs.len() != ys.len() {
        return false;
    }
    let mut used = vec![false; ys.len()];
    'outer: for a in &xs {
        for (i, b) in ys.iter().enumerate() {
            if !used[i] && labeled_indist(a, b) {
                used[i] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

pub fn labeled_classical(e: &LabeledElem) -> bool {
    match e {
        LabeledElem::MAtom { .. } => false,
        LabeledElem::CAtom(_) => true,
        LabeledElem::Set(s) => s.0.iter().all(labeled_classical),
        LabeledElem::Pair(a, b) => labeled_classical(a) && labeled_classical(b),
    }
}

fn dedup_classical(items: &[LabeledElem]) -> Vec<&LabeledElem> {
    let mut out: Vec<&LabeledElem> = Vec::new();
    for e in items {
        if labeled_classical(e) && out.iter().any(|o| labeled_indist(o, e)) {
            continue;
        }
        out.push(e);
    }
    out
}

/// Sorted-string normal form of a labeled element. Labels are dropped, set
/// members are sorted and listed with repetition.
pub fn form(e: &LabeledElem) -> String {
    match e {
        LabeledElem::MAtom { kind, .. } => format!("m{}", kind.0),
        LabeledElem::CAtom(id) => format!("c{}", id.0),
        LabeledElem::Set(s) => set_form(s),
        LabeledElem::Pair(a, b) => format!("({},{})", form(a), form(b)),
    }
}

pub fn set_form(s: &LabeledSet) -> String {
    let mut parts: Vec<String> = s.0.iter().map(form).collect();
    parts.sort();
    parts.dedup_by(|a, b| a == b && !a.contains('m'));
    format!("{{{}}}", parts.join(","))
}

/// Normal form of a canonical element, expanding counts into repetitions.
pub fn canonical_form(e: &Elem) -> String {
    match e {
        Elem::M(k) => format!("m{}", k.0),
        Elem::C(id) => format!("c{}", id.0),
        Elem::Set(q) => {
            let mut parts = Vec::new();
            for (x, n) in q.iter() {
                for _ in 0..n {
                    parts.push(canonical_form(x));
                }
            }
            parts.sort();
            format!("{{{}}}", parts.join(","))
        }
        Elem::Pair(p) => format!("({},{})", canonical_form(&p.0), canonical_form(&p.1)),
    }
}

pub fn qset_form(q: &QSet) -> String {
    canonical_form(&Elem::Set(q.clone()))
}

/// Labeled expansion with fresh labels for every m-atom occurrence.
pub fn expand(q: &QSet, next: &mut u64) -> LabeledSet {
    fn elem(e: &Elem, next: &mut u64) -> LabeledElem {
        match e {
            Elem::M(k) => {
                *next += 1;
                LabeledElem::MAtom {
                    kind: *k,
                    label: Label(*next),
                }
            }
            Elem::C(id) => LabeledElem::CAtom(*id),
            Elem::Set(s) => LabeledElem::Set(expand(s, next)),
            Elem::Pair(p) => {
                LabeledElem::Pair(Box::new(elem(&p.0, next)), Box::new(elem(&p.1, next)))
            }
        }
    }
    let mut out = Vec::new();
    for (e, n) in q.iter() {
        for _ in 0..n {
            out.push(elem(e, next));
        }
    }
    LabeledSet(out)
}

/// Power qset by enumerating every subset of the labeled elements and
/// grouping the subsets by normal form. Returns form -> number of subsets.
pub fn power_oracle(q: &QSet) -> BTreeMap<String, u64> {
    let mut next = 0;
    let items = expand(q, &mut next).0;
    let n = items.len();
    let mut out = BTreeMap::new();
    for mask in 0u64..(1 << n) {
        let sub = LabeledSet(
            (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| items[i].clone())
                .collect(),
        );
        *out.entry(set_form(&sub)).or_insert(0) += 1;
    }
    out
}

/// Cartesian product by enumerating labeled pairs.
pub fn product_oracle(x: &QSet, y: &QSet) -> BTreeMap<String, u64> {
    let mut next = 0;
    let xs = expand(x, &mut next).0;
    let ys = expand(y, &mut next).0;
    let mut out = BTreeMap::new();
    for a in &xs {
        for b in &ys {
            *out.entry(form(&LabeledElem::Pair(
                Box::new(a.clone()),
                Box::new(b.clone()),
            )))
            .or_insert(0) += 1;
        }
    }
    out
}

/// Forms and multiplicities of a canonical qset, for comparison with the
/// enumeration oracles.
pub fn multiplicities(q: &QSet) -> BTreeMap<String, u64> {
    q.iter().map(|(e, n)| (canonical_form(e), n)).collect()
}

/// Labeled reading of the congruence condition for a class-level relation:
/// the graph is expanded to every labeled pair whose classes it relates, and
/// then checked for totality and for `x ≡ x' ⟹ y ≡ y'` over all labeled
/// pairs.
pub fn congruence_oracle(dom: &QSet, cod: &QSet, graph: &[(Elem, Elem)]) -> bool {
    let mut next = 0;
    let xs = expand(dom, &mut next).0;
    let ys = expand(cod, &mut next).0;
    let class_of = |l: &LabeledElem| form(l);
    let related: Vec<(String, String)> = graph
        .iter()
        .map(|(a, b)| (canonical_form(a), canonical_form(b)))
        .collect();
    let mut q: Vec<(&LabeledElem, &LabeledElem)> = Vec::new();
    for x in &xs {
        for y in &ys {
            if related.contains(&(class_of(x), class_of(y))) {
                q.push((x, y));
            }
        }
    }
    let total = xs
        .iter()
        .all(|x| q.iter().any(|(a, _)| std::ptr::eq(*a, x)));
    let congruent = q.iter().all(|(x, y)| {
        q.iter()
            .all(|(x2, y2)| !labeled_indist(x, x2) || labeled_indist(y, y2))
    });
    total && congruent
}

/// Every qset over `pool` with quasi-cardinal at most `max`. Classical pool
/// members appear at most once.
pub fn all_qsets(pool: &[Elem], max: u64) -> Vec<QSet> {
    fn go(pool: &[Elem], i: usize, left: u64, cur: &mut Vec<(Elem, u64)>, out: &mut Vec<QSet>) {
        if i == pool.len() {
            out.push(QSet::from_counts(cur.iter().cloned()));
            return;
        }
        let top = if pool[i].is_classical() {
            left.min(1)
        } else {
            left
        };
        for n in 0..=top {
            if n > 0 {
                cur.push((pool[i].clone(), n));
            }
            go(pool, i + 1, left - n, cur, out);
            if n > 0 {
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(pool, 0, max, &mut Vec::new(), &mut out);
    out
}

/// Every class-level graph between `dom` and `cod`.
pub fn all_graphs(dom: &QSet, cod: &QSet) -> Vec<Vec<(Elem, Elem)>> {
    let pairs: Vec<(Elem, Elem)> = dom
        .elems()
        .keys()
        .flat_map(|a| cod.elems().keys().map(move |b| (a.clone(), b.clone())))
        .collect();
    (0u64..(1 << pairs.len()))
        .map(|mask| {
            (0..pairs.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| pairs[i].clone())
                .collect()
        })
        .collect()
}
