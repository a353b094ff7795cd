//! Canonical quasi-sets.
//!
//! A [`QSet`] is stored as a multiset of element descriptors ([`Elem`]). An
//! m-atom contributes only its [`KindId`]: every m-atom of a kind is
//! indistinguishable from every other, so the canonical form records how many
//! occur and never which ones. Two qsets are indistinguishable exactly when
//! their canonical forms are equal, which makes `==` on [`QSet`] and [`Elem`]
//! the indistinguishability relation.
//!
//! Classical elements (M-atoms, and qsets or pairs with no m-atom anywhere
//! below them) obey ordinary identity, so they always occur with count 1.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KindId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CAtomId(pub u32);

/// Internal identity of an m-atom. Only labeled builds (the relabeling test
/// harness) carry labels; canonical values never do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub u64);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Kind {
    pub id: KindId,
    pub display_name: String,
}

/// A reference to an urelement.
///
/// Equality on `AtomRef` is indistinguishability: two m-atoms of the same kind
/// compare equal whatever their labels.
#[derive(Clone, Copy)]
pub enum AtomRef {
    MAtom { kind: KindId, label: Label },
    CAtom(CAtomId),
}

impl AtomRef {
    pub fn kind(&self) -> Option<KindId> {
        match self {
            AtomRef::MAtom { kind, .. } => Some(*kind),
            AtomRef::CAtom(_) => None,
        }
    }

    pub fn is_matom(&self) -> bool {
        matches!(self, AtomRef::MAtom { .. })
    }
}

impl PartialEq for AtomRef {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (AtomRef::MAtom { kind: a, .. }, AtomRef::MAtom { kind: b, .. }) => a == b,
            (AtomRef::CAtom(a), AtomRef::CAtom(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for AtomRef {}

impl Hash for AtomRef {
    fn hash<H: Hasher>(&self, state: &mut H) {
        Elem::from(*self).hash(state)
    }
}

impl fmt::Debug for AtomRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomRef::MAtom { kind, .. } => write!(f, "MAtom({})", kind.0),
            AtomRef::CAtom(id) => write!(f, "CAtom({})", id.0),
        }
    }
}

/// Element descriptor: one indistinguishability class of elements.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Elem {
    /// The m-atoms of a kind.
    M(KindId),
    /// An M-atom (classical urelement).
    C(CAtomId),
    Set(QSet),
    /// Primitive ordered pair, the element type of cartesian products.
    Pair(Arc<(Elem, Elem)>),
}

impl Elem {
    pub fn pair(first: Elem, second: Elem) -> Elem {
        Elem::Pair(Arc::new((first, second)))
    }

    pub fn is_classical(&self) -> bool {
        match self {
            Elem::M(_) => false,
            Elem::C(_) => true,
            Elem::Set(q) => q.is_classical(),
            Elem::Pair(p) => p.0.is_classical() && p.1.is_classical(),
        }
    }

    /// Hereditary nesting depth. Atoms have rank 0 and a qset sits one above
    /// its highest element.
    pub fn rank(&self) -> u32 {
        match self {
            Elem::M(_) | Elem::C(_) => 0,
            Elem::Set(q) => q.rank(),
            Elem::Pair(p) => 1 + p.0.rank().max(p.1.rank()),
        }
    }

    pub fn as_set(&self) -> Option<&QSet> {
        match self {
            Elem::Set(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(&Elem, &Elem)> {
        match self {
            Elem::Pair(p) => Some((&p.0, &p.1)),
            _ => None,
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Elem::M(_) | Elem::C(_))
    }
}

impl From<AtomRef> for Elem {
    fn from(a: AtomRef) -> Self {
        match a {
            AtomRef::MAtom { kind, .. } => Elem::M(kind),
            AtomRef::CAtom(id) => Elem::C(id),
        }
    }
}

impl From<QSet> for Elem {
    fn from(q: QSet) -> Self {
        Elem::Set(q)
    }
}

impl From<&QSet> for Elem {
    fn from(q: &QSet) -> Self {
        Elem::Set(q.clone())
    }
}

#[derive(Debug)]
struct Inner {
    elems: BTreeMap<Elem, u64>,
    qcard: u64,
    classical: bool,
    rank: u32,
}

/// A canonical, hereditarily finite quasi-set. Cloning is cheap.
#[derive(Clone)]
pub struct QSet(Arc<Inner>);

impl QSet {
    pub fn empty() -> QSet {
        QSet::from_map(BTreeMap::new())
    }

    /// Builds from a map that already satisfies the canonical invariants.
    pub(crate) fn from_map(elems: BTreeMap<Elem, u64>) -> QSet {
        debug_assert!(elems
            .iter()
            .all(|(e, &n)| n >= 1 && (n == 1 || !e.is_classical())));
        let qcard = elems.values().sum();
        let classical = elems.keys().all(Elem::is_classical);
        let rank = 1 + elems.keys().map(Elem::rank).max().unwrap_or(0);
        QSet(Arc::new(Inner {
            elems,
            qcard,
            classical,
            rank,
        }))
    }

    /// Collects `(element, count)` pairs. Counts of non-classical elements add
    /// up; classical elements collapse to a single occurrence. Zero counts are
    /// dropped.
    pub fn from_counts<I: IntoIterator<Item = (Elem, u64)>>(items: I) -> QSet {
        let mut b = QSetBuilder::default();
        for (e, n) in items {
            b.add(e, n);
        }
        b.build()
    }

    pub fn from_elems<I: IntoIterator<Item = Elem>>(items: I) -> QSet {
        QSet::from_counts(items.into_iter().map(|e| (e, 1)))
    }

    pub fn elems(&self) -> &BTreeMap<Elem, u64> {
        &self.0.elems
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Elem, u64)> {
        self.0.elems.iter().map(|(e, &n)| (e, n))
    }

    pub fn is_empty(&self) -> bool {
        self.0.elems.is_empty()
    }

    /// Number of distinct indistinguishability classes at the top level.
    pub fn class_count(&self) -> usize {
        self.0.elems.len()
    }

    pub fn qcard(&self) -> QCard {
        QCard(self.0.qcard)
    }

    /// Predicate Z: no m-atom occurs anywhere below this qset.
    pub fn is_classical(&self) -> bool {
        self.0.classical
    }

    pub fn rank(&self) -> u32 {
        self.0.rank
    }

    pub fn count(&self, e: &Elem) -> u64 {
        self.0.elems.get(e).copied().unwrap_or(0)
    }

    pub fn contains(&self, e: &Elem) -> bool {
        self.0.elems.contains_key(e)
    }

    pub fn m_classes(&self) -> impl Iterator<Item = (KindId, u64)> + '_ {
        self.iter().filter_map(|(e, n)| match e {
            Elem::M(k) => Some((*k, n)),
            _ => None,
        })
    }

    pub fn c_atoms(&self) -> impl Iterator<Item = CAtomId> + '_ {
        self.0.elems.keys().filter_map(|e| match e {
            Elem::C(id) => Some(*id),
            _ => None,
        })
    }

    pub fn subsets(&self) -> impl Iterator<Item = (&QSet, u64)> {
        self.iter().filter_map(|(e, n)| e.as_set().map(|q| (q, n)))
    }

    /// Count-wise inclusion per indistinguishability class.
    pub fn is_subqset_of(&self, other: &QSet) -> bool {
        self.iter().all(|(e, n)| n <= other.count(e))
    }

    /// Every element form occurring hereditarily below this qset.
    pub fn hereditary_elems(&self) -> BTreeSet<Elem> {
        fn walk(e: &Elem, out: &mut BTreeSet<Elem>) {
            if !out.insert(e.clone()) {
                return;
            }
            match e {
                Elem::Set(q) => q.0.elems.keys().for_each(|x| walk(x, out)),
                Elem::Pair(p) => {
                    walk(&p.0, out);
                    walk(&p.1, out);
                }
                _ => {}
            }
        }
        let mut out = BTreeSet::new();
        self.0.elems.keys().for_each(|e| walk(e, &mut out));
        out
    }
}

impl PartialEq for QSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.elems == other.0.elems
    }
}

impl Eq for QSet {}

impl PartialOrd for QSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QSet {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.elems.iter().cmp(other.0.elems.iter())
    }
}

impl Hash for QSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.elems.hash(state)
    }
}

impl fmt::Debug for QSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.0.elems.iter()).finish()
    }
}

impl Default for QSet {
    fn default() -> Self {
        QSet::empty()
    }
}

/// Accumulates elements under the literal merge rule of [`QSet::from_counts`].
#[derive(Debug, Default, Clone)]
pub struct QSetBuilder {
    elems: BTreeMap<Elem, u64>,
}

impl QSetBuilder {
    pub fn add(&mut self, e: Elem, n: u64) -> &mut Self {
        if n == 0 {
            return self;
        }
        let classical = e.is_classical();
        let slot = self.elems.entry(e).or_insert(0);
        *slot = if classical { 1 } else { *slot + n };
        self
    }

    pub fn build(self) -> QSet {
        QSet::from_map(self.elems)
    }
}

/// Quasi-cardinal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QCard(pub u64);

impl QCard {
    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for QCard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub fn indist(x: &Elem, y: &Elem) -> bool {
    x == y
}

pub fn qcard(x: &QSet) -> QCard {
    x.qcard()
}

pub fn is_classical(x: &QSet) -> bool {
    x.is_classical()
}

/// Multiplicity of the class of `e` at the top level of `x`.
pub fn mem_count(e: &Elem, x: &QSet) -> u64 {
    x.count(e)
}

/// Declarations of kinds and M-atoms, plus the m-atom label counter.
#[derive(Debug, Clone, Default)]
pub struct Signature {
    kinds: Vec<Kind>,
    catoms: Vec<String>,
    next_label: u64,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare_kind(&mut self, name: &str) -> Result<KindId> {
        if name.is_empty() {
            return Err(Error::InvalidName(name.to_string()));
        }
        if self.find_kind(name).is_some() {
            return Err(Error::DuplicateName(name.to_string()));
        }
        let id = KindId(self.kinds.len() as u32);
        self.kinds.push(Kind {
            id,
            display_name: name.to_string(),
        });
        Ok(id)
    }

    pub fn declare_catom(&mut self, name: &str) -> Result<CAtomId> {
        if name.is_empty() {
            return Err(Error::InvalidName(name.to_string()));
        }
        if self.find_catom(name).is_some() {
            return Err(Error::DuplicateName(name.to_string()));
        }
        self.catoms.push(name.to_string());
        Ok(CAtomId(self.catoms.len() as u32 - 1))
    }

    /// A fresh m-atom of `kind`. Labels are never reused within a signature.
    pub fn fresh_matom(&mut self, kind: KindId) -> AtomRef {
        let label = Label(self.next_label);
        self.next_label += 1;
        AtomRef::MAtom { kind, label }
    }

    pub fn fresh_label(&mut self) -> Label {
        let label = Label(self.next_label);
        self.next_label += 1;
        label
    }

    pub fn kind(&self, id: KindId) -> Option<&Kind> {
        self.kinds.get(id.0 as usize)
    }

    pub fn kinds(&self) -> &[Kind] {
        &self.kinds
    }

    pub fn catom_name(&self, id: CAtomId) -> Option<&str> {
        self.catoms.get(id.0 as usize).map(String::as_str)
    }

    pub fn catoms(&self) -> impl Iterator<Item = (CAtomId, &str)> {
        self.catoms
            .iter()
            .enumerate()
            .map(|(i, n)| (CAtomId(i as u32), n.as_str()))
    }

    pub fn find_kind(&self, name: &str) -> Option<KindId> {
        self.kinds
            .iter()
            .find(|k| k.display_name == name)
            .map(|k| k.id)
    }

    pub fn find_catom(&self, name: &str) -> Option<CAtomId> {
        self.catoms
            .iter()
            .position(|n| n == name)
            .map(|i| CAtomId(i as u32))
    }

    /// Name under which the m-atoms of a kind are rendered.
    pub fn matom_alias(&self, id: KindId) -> String {
        match self.kind(id) {
            Some(k) => format!("m_{}", k.display_name),
            None => format!("m_{}", id.0),
        }
    }

    pub fn render_elem(&self, e: &Elem) -> String {
        match e {
            Elem::M(k) => self.matom_alias(*k),
            Elem::C(id) => match self.catom_name(*id) {
                Some(n) => n.to_string(),
                None => format!("c{}", id.0),
            },
            Elem::Set(q) => self.render(q),
            Elem::Pair(p) => format!("pp({}, {})", self.render_elem(&p.0), self.render_elem(&p.1)),
        }
    }

    /// Canonical textual form: m-classes by kind id, M-atoms by id, then
    /// nested qsets and pairs each ordered by their own textual form. Counts
    /// above one are written `elem^n`.
    pub fn render(&self, q: &QSet) -> String {
        let mut atoms = Vec::new();
        let mut sets = Vec::new();
        let mut pairs = Vec::new();
        for (e, n) in q.iter() {
            let mut s = self.render_elem(e);
            if n > 1 {
                s = format!("{s}^{n}");
            }
            match e {
                Elem::M(_) | Elem::C(_) => atoms.push(s),
                Elem::Set(_) => sets.push(s),
                Elem::Pair(_) => pairs.push(s),
            }
        }
        sets.sort();
        pairs.sort();
        atoms.extend(sets);
        atoms.extend(pairs);
        format!("{{{}}}", atoms.join(", "))
    }
}

/// An m-atom-labeled build: every m-atom carries its own label, as if atoms
/// had identity. Used to test that canonical forms never depend on labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabeledElem {
    MAtom { kind: KindId, label: Label },
    CAtom(CAtomId),
    Set(LabeledSet),
    Pair(Box<LabeledElem>, Box<LabeledElem>),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabeledSet(pub Vec<LabeledElem>);

impl LabeledElem {
    pub fn canonical(&self) -> Elem {
        match self {
            LabeledElem::MAtom { kind, .. } => Elem::M(*kind),
            LabeledElem::CAtom(id) => Elem::C(*id),
            LabeledElem::Set(s) => Elem::Set(canonicalize(s)),
            LabeledElem::Pair(a, b) => Elem::pair(a.canonical(), b.canonical()),
        }
    }

    fn collect_matoms(&self, out: &mut Vec<(KindId, Label)>) {
        match self {
            LabeledElem::MAtom { kind, label } => out.push((*kind, *label)),
            LabeledElem::CAtom(_) => {}
            LabeledElem::Set(s) => s.0.iter().for_each(|e| e.collect_matoms(out)),
            LabeledElem::Pair(a, b) => {
                a.collect_matoms(out);
                b.collect_matoms(out);
            }
        }
    }

    fn permuted(&self, pi: &Permutation) -> LabeledElem {
        match self {
            LabeledElem::MAtom { kind, label } => {
                let (kind, label) = pi.image(*kind, *label);
                LabeledElem::MAtom { kind, label }
            }
            LabeledElem::CAtom(id) => LabeledElem::CAtom(*id),
            LabeledElem::Set(s) => {
                LabeledElem::Set(LabeledSet(s.0.iter().map(|e| e.permuted(pi)).collect()))
            }
            LabeledElem::Pair(a, b) => {
                LabeledElem::Pair(Box::new(a.permuted(pi)), Box::new(b.permuted(pi)))
            }
        }
    }
}

impl LabeledSet {
    /// All labeled m-atoms occurring hereditarily, with repetition.
    pub fn matoms(&self) -> Vec<(KindId, Label)> {
        let mut out = Vec::new();
        self.0.iter().for_each(|e| e.collect_matoms(&mut out));
        out
    }

    /// Applies `pi` to every m-atom label. Fails unless `pi` is kind-preserving
    /// and injective on the labels that occur.
    pub fn permuted(&self, pi: &Permutation) -> Result<LabeledSet> {
        let occurring: BTreeSet<(KindId, Label)> = self.matoms().into_iter().collect();
        let mut images = BTreeSet::new();
        for &(kind, label) in &occurring {
            let (k2, l2) = pi.image(kind, label);
            if k2 != kind {
                return Err(Error::InvalidPermutation(format!(
                    "label {} of kind {} is sent to kind {}",
                    label.0, kind.0, k2.0
                )));
            }
            if !images.insert((k2, l2)) {
                return Err(Error::InvalidPermutation(format!(
                    "two labels are sent to label {}",
                    l2.0
                )));
            }
        }
        Ok(LabeledSet(self.0.iter().map(|e| e.permuted(pi)).collect()))
    }
}

/// Forgets labels, producing the canonical qset.
pub fn canonicalize(build: &LabeledSet) -> QSet {
    QSet::from_counts(build.0.iter().map(|e| (e.canonical(), 1)))
}

/// `canonicalize(pi(build))`.
pub fn relabel(build: &LabeledSet, pi: &Permutation) -> Result<QSet> {
    Ok(canonicalize(&build.permuted(pi)?))
}

/// A relabeling of m-atoms; labels without an entry are fixed.
#[derive(Debug, Clone, Default)]
pub struct Permutation {
    map: BTreeMap<(KindId, Label), (KindId, Label)>,
}

impl Permutation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn map(mut self, from: (KindId, Label), to: (KindId, Label)) -> Self {
        self.map.insert(from, to);
        self
    }

    pub fn swap(self, kind: KindId, a: Label, b: Label) -> Self {
        self.map((kind, a), (kind, b)).map((kind, b), (kind, a))
    }

    pub fn image(&self, kind: KindId, label: Label) -> (KindId, Label) {
        self.map
            .get(&(kind, label))
            .copied()
            .unwrap_or((kind, label))
    }
}
