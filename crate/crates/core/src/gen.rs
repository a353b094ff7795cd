//! Seeded random generators for qsets, labeled builds, permutations and
//! quasi-function samples. Everything here is deterministic for a fixed seed.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::kernel::{
    AtomRef, CAtomId, Elem, KindId, Label, LabeledElem, LabeledSet, Permutation, QSet,
};
use crate::lang::Value;
use crate::morphism::QuasiFunction;

/// Shape limits for generated values.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub kinds: u32,
    pub catoms: u32,
    /// Largest top-level quasi-cardinal of any generated qset.
    pub max_qcard: u64,
    /// Largest nesting depth; 1 means flat qsets of atoms.
    pub max_depth: u32,
    /// Allow primitive pairs as elements.
    pub pairs: bool,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            kinds: 2,
            catoms: 2,
            max_qcard: 4,
            max_depth: 2,
            pairs: false,
        }
    }
}

fn labeled_elem<R: Rng>(rng: &mut R, shape: &Shape, depth: u32, next: &mut u64) -> LabeledElem {
    let nested = depth > 1 && rng.gen_bool(0.3);
    if nested {
        if shape.pairs && rng.gen_bool(0.25) {
            let a = labeled_elem(rng, shape, depth - 1, next);
            let b = labeled_elem(rng, shape, depth - 1, next);
            return LabeledElem::Pair(Box::new(a), Box::new(b));
        }
        let cap = rng.gen_range(0..=shape.max_qcard.min(3));
        return LabeledElem::Set(labeled_set_upto(rng, shape, depth - 1, cap, next));
    }
    let total = shape.kinds + shape.catoms;
    if total == 0 {
        return LabeledElem::Set(LabeledSet::default());
    }
    let pick = rng.gen_range(0..total);
    if pick < shape.kinds {
        *next += 1;
        LabeledElem::MAtom {
            kind: KindId(pick),
            label: Label(*next),
        }
    } else {
        LabeledElem::CAtom(CAtomId(pick - shape.kinds))
    }
}

fn labeled_set_upto<R: Rng>(
    rng: &mut R,
    shape: &Shape,
    depth: u32,
    max: u64,
    next: &mut u64,
) -> LabeledSet {
    let n = rng.gen_range(0..=max);
    LabeledSet(
        (0..n)
            .map(|_| labeled_elem(rng, shape, depth, next))
            .collect(),
    )
}

/// A labeled build whose canonical form has quasi-cardinal at most
/// `shape.max_qcard`. Labels are fresh from `next`.
pub fn labeled_build<R: Rng>(rng: &mut R, shape: &Shape, next: &mut u64) -> LabeledSet {
    labeled_set_upto(rng, shape, shape.max_depth.max(1), shape.max_qcard, next)
}

pub fn qset<R: Rng>(rng: &mut R, shape: &Shape) -> QSet {
    let mut next = 0;
    crate::kernel::canonicalize(&labeled_build(rng, shape, &mut next))
}

/// A qset with quasi-cardinal exactly `n`, or as close as the classical
/// collapse allows.
pub fn qset_of_qcard<R: Rng>(rng: &mut R, shape: &Shape, n: u64) -> QSet {
    let mut next = 0;
    let mut items = Vec::new();
    for _ in 0..n {
        items.push(labeled_elem(rng, shape, shape.max_depth.max(1), &mut next));
    }
    crate::kernel::canonicalize(&LabeledSet(items))
}

/// A random kind-preserving permutation of the m-atom labels of `build`.
pub fn permutation<R: Rng>(rng: &mut R, build: &LabeledSet) -> Permutation {
    let mut by_kind: BTreeMap<KindId, BTreeSet<Label>> = BTreeMap::new();
    for (k, l) in build.matoms() {
        by_kind.entry(k).or_default().insert(l);
    }
    let mut pi = Permutation::new();
    for (k, labels) in by_kind {
        let from: Vec<Label> = labels.into_iter().collect();
        let mut to = from.clone();
        to.shuffle(rng);
        for (a, b) in from.into_iter().zip(to) {
            pi = pi.map((k, a), (k, b));
        }
    }
    pi
}

/// Expands a canonical qset into a labeled build, giving every m-atom and
/// every copy of a nested form its own fresh labels.
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

/// A random quasi-function between `dom` and `cod`, if one exists.
pub fn quasi_function<R: Rng>(rng: &mut R, dom: &QSet, cod: &QSet) -> Option<QuasiFunction> {
    let targets: Vec<&Elem> = cod.elems().keys().collect();
    if targets.is_empty() && !dom.is_empty() {
        return None;
    }
    let map: BTreeMap<Elem, Elem> = dom
        .elems()
        .keys()
        .map(|a| (a.clone(), (*targets.choose(rng).unwrap()).clone()))
        .collect();
    QuasiFunction::from_map(dom.clone(), cod.clone(), &map).ok()
}

/// `chains` composable chains `A -f-> B -g-> C -h-> D` over objects of
/// quasi-cardinal 1..=`max_qcard`, returned as a flat list `[f, g, h, ...]`.
pub fn law_sample<R: Rng>(rng: &mut R, chains: usize, max_qcard: u64) -> Vec<QuasiFunction> {
    let shape = Shape {
        kinds: 2,
        catoms: 2,
        max_qcard: 3,
        max_depth: 2,
        pairs: false,
    };
    let mut out = Vec::with_capacity(chains * 3);
    while out.len() < chains * 3 {
        let objs: Vec<QSet> = (0..4)
            .map(|_| {
                let n = rng.gen_range(1..=max_qcard);
                qset_of_qcard(rng, &shape, n)
            })
            .collect();
        let fs: Option<Vec<QuasiFunction>> = objs
            .windows(2)
            .map(|w| quasi_function(rng, &w[0], &w[1]))
            .collect();
        if let Some(fs) = fs {
            out.extend(fs);
        }
    }
    out
}

/// Seeds and a depth for a random fragment: one to three seeds, each an
/// m-atom, a classical atom or a small qset, built for one or two rounds.
pub fn fragment_seeds<R: Rng>(rng: &mut R) -> (Vec<Elem>, u32) {
    let shape = Shape {
        kinds: 2,
        catoms: 2,
        max_qcard: 2,
        max_depth: 2,
        pairs: false,
    };
    let n = rng.gen_range(1..=3);
    let seeds = (0..n)
        .map(|_| match rng.gen_range(0..4) {
            0 => Elem::M(KindId(rng.gen_range(0..shape.kinds))),
            1 => Elem::C(CAtomId(rng.gen_range(0..shape.catoms))),
            _ => Elem::Set(qset(rng, &shape)),
        })
        .collect();
    (seeds, rng.gen_range(1..=2))
}

/// A random language value of a type that has a literal form: qsets, atoms,
/// primitive pairs, quasi-functions and naturals. Kinds and
/// classical atoms are drawn from the first three and two ids respectively.
pub fn value<R: Rng>(rng: &mut R) -> Value {
    let shape = Shape {
        kinds: 3,
        catoms: 2,
        max_qcard: 5,
        max_depth: 3,
        pairs: true,
    };
    match rng.gen_range(1..10) {
        1 => Value::Natural(rng.gen_range(0..1000)),
        2 => Value::Atom(if rng.gen() {
            AtomRef::MAtom {
                kind: KindId(rng.gen_range(0..shape.kinds)),
                label: Label(0),
            }
        } else {
            AtomRef::CAtom(CAtomId(rng.gen_range(0..shape.catoms)))
        }),
        3 => {
            let mut next = 0;
            let a = labeled_elem(rng, &shape, 2, &mut next);
            let b = labeled_elem(rng, &shape, 2, &mut next);
            Value::Pair(LabeledElem::Pair(Box::new(a), Box::new(b)).canonical())
        }
        4 | 5 => {
            let flat = Shape {
                max_depth: 2,
                ..shape
            };
            let dom = qset(rng, &flat);
            let n = rng.gen_range(1..=3);
            let cod = qset_of_qcard(rng, &flat, n);
            match quasi_function(rng, &dom, &cod) {
                Some(f) => Value::Function(f),
                None => Value::QSet(dom),
            }
        }
        _ => Value::QSet(qset(rng, &shape)),
    }
}
