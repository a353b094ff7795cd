//! Bounded universe fragments and closure auditing.
//!
//! A qED universe is closed under power qsets, U-relative singletons,
//! cartesian products and unions of classically indexed families. No finite
//! qset is: the power qset of an element of maximal rank always escapes. A
//! [`Fragment`] is therefore a finite approximation built by a bounded number
//! of closure rounds, and [`check_qed`] reports exactly where it falls short.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::algebra::{self, Caps, IndexedFamily};
use crate::error::{Error, Result};
use crate::kernel::{Elem, QSet};
use crate::morphism::CategoryPresentation;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FragmentCaps {
    pub algebra: Caps,
    /// Largest number of distinct element forms a fragment may hold.
    pub max_elements: usize,
    /// Largest index size for audited family unions.
    pub family_index: usize,
}

impl Default for FragmentCaps {
    fn default() -> Self {
        FragmentCaps {
            algebra: Caps::default(),
            max_elements: 64,
            family_index: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BuildOp {
    Seed,
    Power,
    Singleton,
    Pair,
    OPair,
    Product,
    Union,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Added { elem: Elem, count: u64 },
    Cutoff { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerEntry {
    pub round: u32,
    pub op: BuildOp,
    pub operands: Vec<Elem>,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    elements: QSet,
    rank: BTreeMap<Elem, u32>,
    ledger: Vec<LedgerEntry>,
    depth: u32,
    caps: FragmentCaps,
}

impl Fragment {
    pub fn elements(&self) -> &QSet {
        &self.elements
    }

    pub fn rank(&self) -> &BTreeMap<Elem, u32> {
        &self.rank
    }

    pub fn ledger(&self) -> &[LedgerEntry] {
        &self.ledger
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn caps(&self) -> &FragmentCaps {
        &self.caps
    }

    pub fn cutoffs(&self) -> impl Iterator<Item = &LedgerEntry> {
        self.ledger
            .iter()
            .filter(|e| matches!(e.outcome, Outcome::Cutoff { .. }))
    }
}

fn apply(op: BuildOp, operands: &[Elem], universe: &QSet, caps: &Caps) -> Result<QSet> {
    let set = |i: usize| operands[i].as_set().ok_or(Error::NotInUniverse);
    match op {
        BuildOp::Seed => unreachable!("seeds are not computed"),
        BuildOp::Power => algebra::power(set(0)?, caps),
        BuildOp::Singleton => algebra::singleton_in(&operands[0], universe),
        BuildOp::Pair => algebra::pair_in(&operands[0], &operands[1], universe),
        BuildOp::OPair => algebra::opair_in(&operands[0], &operands[1], universe),
        BuildOp::Product => algebra::product(set(0)?, set(1)?, caps),
        BuildOp::Union => Ok(algebra::union(set(0)?, set(1)?)),
    }
}

/// Candidate operations of one closure round over the distinct element forms
/// of `elems`, in a fixed order.
fn round_candidates(elems: &[Elem]) -> Vec<(BuildOp, Vec<Elem>)> {
    let mut out = Vec::new();
    for x in elems {
        if x.as_set().is_some() {
            out.push((BuildOp::Power, vec![x.clone()]));
        }
        out.push((BuildOp::Singleton, vec![x.clone()]));
    }
    for (i, x) in elems.iter().enumerate() {
        for y in &elems[i..] {
            out.push((BuildOp::Pair, vec![x.clone(), y.clone()]));
            if x.as_set().is_some() && y.as_set().is_some() {
                out.push((BuildOp::Union, vec![x.clone(), y.clone()]));
            }
        }
    }
    for x in elems {
        for y in elems {
            out.push((BuildOp::OPair, vec![x.clone(), y.clone()]));
            if x.as_set().is_some() && y.as_set().is_some() {
                out.push((BuildOp::Product, vec![x.clone(), y.clone()]));
            }
        }
    }
    out
}

/// Seeds become elements of the fragment. m-atom seeds accumulate (two seeded
/// m-atoms of a kind give that class count 2); every other seed form is
/// present once.
fn add_seed(elems: &mut BTreeMap<Elem, u64>, e: &Elem) {
    let slot = elems.entry(e.clone()).or_insert(0);
    *slot = match e {
        Elem::M(_) => *slot + 1,
        _ => 1,
    };
}

/// Builds a fragment containing `seeds`, closed for `depth` rounds under
/// power, singleton, pair, ordered pair, product and union (subject to caps).
pub fn build_fragment(seeds: &[Elem], depth: u32, caps: FragmentCaps) -> Result<Fragment> {
    if seeds.is_empty() {
        return Err(Error::EmptySeeds);
    }
    let mut elems: BTreeMap<Elem, u64> = BTreeMap::new();
    let mut ledger = Vec::new();
    for s in seeds {
        add_seed(&mut elems, s);
    }
    if elems.len() > caps.max_elements {
        return Err(Error::CapExceeded {
            what: "distinct seed forms",
            limit: caps.max_elements as u64,
            actual: elems.len() as u64,
        });
    }
    for (e, &n) in &elems {
        ledger.push(LedgerEntry {
            round: 0,
            op: BuildOp::Seed,
            operands: Vec::new(),
            outcome: Outcome::Added {
                elem: e.clone(),
                count: n,
            },
        });
    }

    for round in 1..=depth {
        let snapshot = QSet::from_map(elems.clone());
        let forms: Vec<Elem> = snapshot.elems().keys().cloned().collect();
        for (op, operands) in round_candidates(&forms) {
            let outcome = match apply(op, &operands, &snapshot, &caps.algebra) {
                Err(e) => Outcome::Cutoff {
                    reason: e.to_string(),
                },
                Ok(r) => {
                    let r = Elem::Set(r);
                    if elems.contains_key(&r) {
                        continue;
                    }
                    if elems.len() >= caps.max_elements {
                        Outcome::Cutoff {
                            reason: format!("element cap of {} reached", caps.max_elements),
                        }
                    } else {
                        elems.insert(r.clone(), 1);
                        Outcome::Added { elem: r, count: 1 }
                    }
                }
            };
            ledger.push(LedgerEntry {
                round,
                op,
                operands,
                outcome,
            });
        }
    }

    let elements = QSet::from_map(elems);
    let rank = elements
        .elems()
        .keys()
        .map(|e| (e.clone(), e.rank()))
        .collect();
    Ok(Fragment {
        elements,
        rank,
        ledger,
        depth,
        caps,
    })
}

/// Re-executes a ledger and returns the resulting element multiset. Every
/// recorded result is recomputed and must match.
pub fn replay(ledger: &[LedgerEntry], caps: &Caps) -> Result<QSet> {
    let mut elems: BTreeMap<Elem, u64> = BTreeMap::new();
    let mut round = 0;
    let mut snapshot = QSet::empty();
    for (i, entry) in ledger.iter().enumerate() {
        let Outcome::Added { elem, count } = &entry.outcome else {
            continue;
        };
        if entry.round != round {
            round = entry.round;
            snapshot = QSet::from_map(elems.clone());
        }
        if entry.op != BuildOp::Seed {
            let r = apply(entry.op, &entry.operands, &snapshot, caps)
                .map_err(|_| Error::ReplayMismatch(i))?;
            if &Elem::Set(r) != elem || elems.contains_key(elem) {
                return Err(Error::ReplayMismatch(i));
            }
        }
        elems.insert(elem.clone(), *count);
    }
    Ok(QSet::from_map(elems))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Defect {
    pub witnesses: Vec<Elem>,
    pub missing: Elem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Construct {
    Union,
    Pair,
    OPair,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedDefect {
    pub construct: Construct,
    pub witnesses: [Elem; 2],
    pub missing: Elem,
}

/// A check that could not be carried out because a cap was exceeded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skipped {
    pub condition: u8,
    pub witnesses: Vec<Elem>,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub checked: u64,
    pub defects: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub cond1: Tally,
    pub cond2: Tally,
    pub cond3: Tally,
    pub cond4: Tally,
    pub theorem1: Tally,
    pub skipped: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClosureReport {
    /// Power qset of a member is not a member.
    pub cond1: Vec<Defect>,
    /// `[x]_U` is not a member.
    pub cond2: Vec<Defect>,
    /// Product of two members is not a member.
    pub cond3: Vec<Defect>,
    /// Union of a classically indexed family of members is not a member.
    pub cond4: Vec<Defect>,
    pub theorem1: Vec<DerivedDefect>,
    pub skipped: Vec<Skipped>,
    pub totals: Totals,
}

impl ClosureReport {
    pub fn primitive_defects(&self) -> usize {
        self.cond1.len() + self.cond2.len() + self.cond3.len() + self.cond4.len()
    }

    pub fn is_closed(&self) -> bool {
        self.primitive_defects() == 0 && self.theorem1.is_empty() && self.skipped.is_empty()
    }

    /// Derived-construct defects that no recorded primitive defect accounts for.
    ///
    /// `x ∪ y` is the union of the family `(x, y)`; `[x,y]_U` is the union of
    /// `[x]_U` and `[y]_U`; `<x,y>_U` is the union of `[a]_U` and `[b]_U` for
    /// `a = [x]_U`, `b = [x,y]_U`. A defect is explained when one of the
    /// singleton or family-union steps along that derivation is itself a
    /// recorded defect.
    pub fn unexplained_derived(&self, universe: &QSet) -> Vec<&DerivedDefect> {
        let sing_defects: BTreeSet<&Elem> = self.cond2.iter().map(|d| &d.witnesses[0]).collect();
        let fam_defects: BTreeSet<Vec<Elem>> =
            self.cond4.iter().map(|d| d.witnesses.clone()).collect();
        let fam = |a: &QSet, b: &QSet| {
            let s: BTreeSet<Elem> = [Elem::Set(a.clone()), Elem::Set(b.clone())].into();
            fam_defects.contains(&s.into_iter().collect::<Vec<_>>())
        };
        let sing = |e: &Elem| -> Option<QSet> {
            if sing_defects.contains(e) {
                None
            } else {
                algebra::singleton_in(e, universe).ok()
            }
        };
        let pair_explained = |x: &Elem, y: &Elem| match (sing(x), sing(y)) {
            (Some(sx), Some(sy)) => fam(&sx, &sy),
            _ => true,
        };

        self.theorem1
            .iter()
            .filter(|d| {
                let [x, y] = &d.witnesses;
                let explained = match d.construct {
                    Construct::Union => match (x.as_set(), y.as_set()) {
                        (Some(a), Some(b)) => fam(a, b),
                        _ => false,
                    },
                    Construct::Pair => pair_explained(x, y),
                    Construct::OPair => {
                        pair_explained(x, y) || {
                            let a = Elem::Set(algebra::singleton_in(x, universe).expect("member"));
                            let b = Elem::Set(algebra::pair_in(x, y, universe).expect("member"));
                            match (sing(&a), sing(&b)) {
                                (Some(sa), Some(sb)) => fam(&sa, &sb),
                                _ => true,
                            }
                        }
                    }
                };
                !explained
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditCaps {
    pub algebra: Caps,
    pub family_index: usize,
}

impl Default for AuditCaps {
    fn default() -> Self {
        AuditCaps {
            algebra: Caps::default(),
            family_index: 3,
        }
    }
}

impl From<&FragmentCaps> for AuditCaps {
    fn from(c: &FragmentCaps) -> Self {
        AuditCaps {
            algebra: c.algebra,
            family_index: c.family_index,
        }
    }
}

fn subsets_upto<T: Clone>(items: &[T], max: usize, mut visit: impl FnMut(&[T])) {
    fn go<T: Clone>(
        items: &[T],
        start: usize,
        max: usize,
        cur: &mut Vec<T>,
        visit: &mut impl FnMut(&[T]),
    ) {
        visit(cur);
        if cur.len() == max {
            return;
        }
        for i in start..items.len() {
            cur.push(items[i].clone());
            go(items, i + 1, max, cur, visit);
            cur.pop();
        }
    }
    go(items, 0, max, &mut Vec::new(), &mut visit);
}

/// Audits the closure conditions of a qED universe and the constructions that
/// follow from them.
///
/// Family unions are audited for every set of at most `family_index` distinct
/// qset members, indexed by a von Neumann ordinal of matching size.
pub fn check_qed(universe: &QSet, caps: &AuditCaps) -> ClosureReport {
    let mut r = ClosureReport::default();
    let members: Vec<&Elem> = universe.elems().keys().collect();
    let sets: Vec<&Elem> = members
        .iter()
        .copied()
        .filter(|e| e.as_set().is_some())
        .collect();
    let present = |q: &QSet| universe.contains(&Elem::Set(q.clone()));

    for &x in &sets {
        let q = x.as_set().unwrap();
        match algebra::power(q, &caps.algebra) {
            Ok(p) => {
                r.totals.cond1.checked += 1;
                if !present(&p) {
                    r.cond1.push(Defect {
                        witnesses: vec![x.clone()],
                        missing: Elem::Set(p),
                    });
                }
            }
            Err(e) => r.skipped.push(Skipped {
                condition: 1,
                witnesses: vec![x.clone()],
                reason: e.to_string(),
            }),
        }
    }

    for &x in &members {
        r.totals.cond2.checked += 1;
        let s = algebra::singleton_in(x, universe).expect("member");
        if !present(&s) {
            r.cond2.push(Defect {
                witnesses: vec![x.clone()],
                missing: Elem::Set(s),
            });
        }
    }

    for &x in &sets {
        for &y in &sets {
            match algebra::product(x.as_set().unwrap(), y.as_set().unwrap(), &caps.algebra) {
                Ok(p) => {
                    r.totals.cond3.checked += 1;
                    if !present(&p) {
                        r.cond3.push(Defect {
                            witnesses: vec![x.clone(), y.clone()],
                            missing: Elem::Set(p),
                        });
                    }
                }
                Err(e) => r.skipped.push(Skipped {
                    condition: 3,
                    witnesses: vec![x.clone(), y.clone()],
                    reason: e.to_string(),
                }),
            }
        }
    }

    let bound = caps.family_index.min(sets.len());
    let indices: Vec<Vec<Elem>> = (0..=bound)
        .map(|n| algebra::ordinal(n).elems().keys().cloned().collect())
        .collect();
    subsets_upto(&sets, bound, |chosen| {
        let index = &indices[chosen.len()];
        let entries: BTreeMap<Elem, QSet> = index
            .iter()
            .cloned()
            .zip(chosen.iter().map(|e| e.as_set().unwrap().clone()))
            .collect();
        let family = IndexedFamily::new(QSet::from_elems(index.iter().cloned()), entries)
            .expect("ordinal index is classical");
        let u = algebra::family_union(&family).expect("classical index");
        r.totals.cond4.checked += 1;
        if !present(&u) {
            r.cond4.push(Defect {
                witnesses: chosen.iter().map(|e| (*e).clone()).collect(),
                missing: Elem::Set(u),
            });
        }
    });

    for (i, &x) in members.iter().enumerate() {
        for (j, &y) in members.iter().enumerate() {
            let mut check = |construct, q: QSet| {
                r.totals.theorem1.checked += 1;
                if !present(&q) {
                    r.theorem1.push(DerivedDefect {
                        construct,
                        witnesses: [x.clone(), y.clone()],
                        missing: Elem::Set(q),
                    });
                }
            };
            if i <= j {
                if let (Some(a), Some(b)) = (x.as_set(), y.as_set()) {
                    check(Construct::Union, algebra::union(a, b));
                }
                check(
                    Construct::Pair,
                    algebra::pair_in(x, y, universe).expect("members"),
                );
            }
            check(
                Construct::OPair,
                algebra::opair_in(x, y, universe).expect("members"),
            );
        }
    }

    r.totals.cond1.defects = r.cond1.len() as u64;
    r.totals.cond2.defects = r.cond2.len() as u64;
    r.totals.cond3.defects = r.cond3.len() as u64;
    r.totals.cond4.defects = r.cond4.len() as u64;
    r.totals.theorem1.defects = r.theorem1.len() as u64;
    r.totals.skipped = r.skipped.len() as u64;
    r
}

pub fn check_fragment(f: &Fragment) -> ClosureReport {
    check_qed(&f.elements, &AuditCaps::from(&f.caps))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    UQset,
    UProperQclass,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    /// `x` is a member of the universe.
    pub member: bool,
    /// `x` is a sub-qset of the universe (a U-qclass).
    pub qclass: bool,
}

/// U-qset when `x` is a member; U-proper qclass when it is a sub-qset but not
/// a member; neither otherwise.
pub fn classify(x: &QSet, universe: &QSet) -> Classification {
    let member = universe.contains(&Elem::Set(x.clone()));
    let qclass = x.is_subqset_of(universe);
    let verdict = if member {
        Verdict::UQset
    } else if qclass {
        Verdict::UProperQclass
    } else {
        Verdict::Neither
    };
    Classification {
        verdict,
        member,
        qclass,
    }
}

pub fn is_small_category(c: &CategoryPresentation, universe: &QSet) -> bool {
    classify(c.objects(), universe).verdict == Verdict::UQset
        && classify(c.morphisms(), universe).verdict == Verdict::UQset
}
