//! Quasi-relations, quasi-functions and the category laws of QSet.
//!
//! Graphs are kept at class level: a pair `(a, b)` says that the elements of
//! class `a` in the domain go to elements of class `b` in the codomain. Each
//! class pair appears at most once, which is what makes `1 ∘ f ≡ f` hold
//! without multiplicities inflating.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{Elem, QSet};

pub type Graph = BTreeSet<(Elem, Elem)>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuasiRelation {
    dom: QSet,
    cod: QSet,
    graph: Graph,
}

impl QuasiRelation {
    pub fn new(
        dom: QSet,
        cod: QSet,
        graph: impl IntoIterator<Item = (Elem, Elem)>,
    ) -> Result<Self> {
        let graph: Graph = graph.into_iter().collect();
        for (a, b) in &graph {
            if !dom.contains(a) {
                return Err(Error::UnknownClass("domain"));
            }
            if !cod.contains(b) {
                return Err(Error::UnknownClass("codomain"));
            }
        }
        Ok(QuasiRelation { dom, cod, graph })
    }

    pub fn dom(&self) -> &QSet {
        &self.dom
    }

    pub fn cod(&self) -> &QSet {
        &self.cod
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }
}

/// True iff every domain class appears in exactly one graph pair: the graph is
/// total and sends indistinguishable arguments to indistinguishable values.
pub fn is_quasi_function(q: &QuasiRelation) -> bool {
    let mut seen: BTreeMap<&Elem, usize> = BTreeMap::new();
    for (a, _) in &q.graph {
        *seen.entry(a).or_default() += 1;
    }
    q.dom.elems().keys().all(|a| seen.get(a) == Some(&1))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuasiFunction(QuasiRelation);

impl TryFrom<QuasiRelation> for QuasiFunction {
    type Error = Error;

    fn try_from(q: QuasiRelation) -> Result<Self> {
        if is_quasi_function(&q) {
            Ok(QuasiFunction(q))
        } else {
            Err(Error::NotAQuasiFunction(
                "some domain class has no image or more than one".into(),
            ))
        }
    }
}

impl QuasiFunction {
    pub fn new(
        dom: QSet,
        cod: QSet,
        graph: impl IntoIterator<Item = (Elem, Elem)>,
    ) -> Result<Self> {
        QuasiRelation::new(dom, cod, graph)?.try_into()
    }

    /// Builds from a class map; every domain class must be a key.
    pub fn from_map(dom: QSet, cod: QSet, map: &BTreeMap<Elem, Elem>) -> Result<Self> {
        QuasiFunction::new(dom, cod, map.iter().map(|(a, b)| (a.clone(), b.clone())))
    }

    pub fn dom(&self) -> &QSet {
        &self.0.dom
    }

    pub fn cod(&self) -> &QSet {
        &self.0.cod
    }

    pub fn graph(&self) -> &Graph {
        &self.0.graph
    }

    pub fn relation(&self) -> &QuasiRelation {
        &self.0
    }

    pub fn apply(&self, a: &Elem) -> Option<&Elem> {
        self.0.graph.iter().find(|(x, _)| x == a).map(|(_, y)| y)
    }

    /// Element form used for morphisms inside a category presentation:
    /// `pp(dom, pp(cod, graph))`, the graph written as a qset of class pairs.
    pub fn encode(&self) -> Elem {
        let graph = QSet::from_elems(
            self.0
                .graph
                .iter()
                .map(|(a, b)| Elem::pair(a.clone(), b.clone())),
        );
        Elem::pair(
            Elem::Set(self.0.dom.clone()),
            Elem::pair(Elem::Set(self.0.cod.clone()), Elem::Set(graph)),
        )
    }

    pub fn decode(e: &Elem) -> Option<QuasiFunction> {
        let (dom, rest) = e.as_pair()?;
        let (cod, graph) = rest.as_pair()?;
        let graph = graph.as_set()?;
        let mut pairs = Vec::new();
        for (p, n) in graph.iter() {
            if n != 1 {
                return None;
            }
            let (a, b) = p.as_pair()?;
            pairs.push((a.clone(), b.clone()));
        }
        QuasiFunction::new(dom.as_set()?.clone(), cod.as_set()?.clone(), pairs).ok()
    }
}

pub fn identity(a: &QSet) -> QuasiFunction {
    let graph = a.elems().keys().map(|e| (e.clone(), e.clone())).collect();
    QuasiFunction(QuasiRelation {
        dom: a.clone(),
        cod: a.clone(),
        graph,
    })
}

/// `g ∘ f`.
pub fn compose(g: &QuasiFunction, f: &QuasiFunction) -> Result<QuasiFunction> {
    if f.cod() != g.dom() {
        return Err(Error::NotComposable);
    }
    let gmap: BTreeMap<&Elem, &Elem> = g.graph().iter().map(|(b, c)| (b, c)).collect();
    let graph = f
        .graph()
        .iter()
        .map(|(a, b)| (a.clone(), gmap[b].clone()))
        .collect();
    Ok(QuasiFunction(QuasiRelation {
        dom: f.dom().clone(),
        cod: g.cod().clone(),
        graph,
    }))
}

pub fn qfun_equiv(f: &QuasiFunction, g: &QuasiFunction) -> bool {
    f == g
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    Associativity,
    LeftIdentity,
    RightIdentity,
    Composition,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub law: Law,
    /// Positions in the sample of the morphisms involved.
    pub morphisms: Vec<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub seed: u64,
    pub morphisms: usize,
    pub composable_triples: u64,
    pub sampled: bool,
    pub triples_checked: u64,
    pub identity_checks: u64,
    pub violations: Vec<Violation>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LawConfig {
    pub seed: u64,
    /// Above this many composable triples, a seeded sample of this size is
    /// checked instead of all of them.
    pub triple_budget: u64,
}

impl Default for LawConfig {
    fn default() -> Self {
        LawConfig {
            seed: 0,
            triple_budget: 50_000,
        }
    }
}

pub fn check_category_laws(sample: &[QuasiFunction], seed: u64) -> LawReport {
    check_category_laws_with(
        sample,
        LawConfig {
            seed,
            ..Default::default()
        },
        compose,
    )
}

/// Checks both identity laws for every morphism and associativity for every
/// composable triple, using `comp` as the composition.
pub fn check_category_laws_with<C>(sample: &[QuasiFunction], cfg: LawConfig, comp: C) -> LawReport
where
    C: Fn(&QuasiFunction, &QuasiFunction) -> Result<QuasiFunction>,
{
    let mut violations = Vec::new();
    let mut identity_checks = 0;

    for (i, f) in sample.iter().enumerate() {
        let checks = [
            (Law::LeftIdentity, comp(&identity(f.cod()), f)),
            (Law::RightIdentity, comp(f, &identity(f.dom()))),
        ];
        for (law, result) in checks {
            identity_checks += 1;
            match result {
                Ok(r) if qfun_equiv(&r, f) => {}
                Ok(_) => violations.push(Violation {
                    law,
                    morphisms: vec![i],
                    detail: "composite with identity differs".into(),
                }),
                Err(e) => violations.push(Violation {
                    law,
                    morphisms: vec![i],
                    detail: e.to_string(),
                }),
            }
        }
    }

    // morphisms grouped by domain
    let mut by_dom: BTreeMap<&QSet, Vec<usize>> = BTreeMap::new();
    for (i, f) in sample.iter().enumerate() {
        by_dom.entry(f.dom()).or_default().push(i);
    }
    let next = |i: usize| -> &[usize] {
        by_dom
            .get(sample[i].cod())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    };

    let mut total: u64 = 0;
    for i in 0..sample.len() {
        for &j in next(i) {
            total += next(j).len() as u64;
        }
    }

    let sampled = total > cfg.triple_budget;
    let triples: Vec<(usize, usize, usize)> = if sampled {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let starts: Vec<usize> = (0..sample.len())
            .filter(|&i| next(i).iter().any(|&j| !next(j).is_empty()))
            .collect();
        let mut out = Vec::with_capacity(cfg.triple_budget as usize);
        while (out.len() as u64) < cfg.triple_budget {
            let &i = starts.choose(&mut rng).expect("composable triples exist");
            let js: Vec<usize> = next(i)
                .iter()
                .copied()
                .filter(|&j| !next(j).is_empty())
                .collect();
            let &j = js.choose(&mut rng).expect("nonempty");
            let &k = next(j).choose(&mut rng).expect("nonempty");
            out.push((i, j, k));
        }
        out
    } else {
        let mut out = Vec::new();
        for i in 0..sample.len() {
            for &j in next(i) {
                for &k in next(j) {
                    out.push((i, j, k));
                }
            }
        }
        out
    };

    for &(i, j, k) in &triples {
        let (f, g, h) = (&sample[i], &sample[j], &sample[k]);
        let left = comp(g, f).and_then(|gf| comp(h, &gf));
        let right = comp(h, g).and_then(|hg| comp(&hg, f));
        match (left, right) {
            (Ok(l), Ok(r)) if qfun_equiv(&l, &r) => {}
            (Ok(_), Ok(_)) => violations.push(Violation {
                law: Law::Associativity,
                morphisms: vec![i, j, k],
                detail: "h∘(g∘f) and (h∘g)∘f differ".into(),
            }),
            (Err(e), _) | (_, Err(e)) => violations.push(Violation {
                law: Law::Composition,
                morphisms: vec![i, j, k],
                detail: e.to_string(),
            }),
        }
    }

    LawReport {
        seed: cfg.seed,
        morphisms: sample.len(),
        composable_triples: total,
        sampled,
        triples_checked: triples.len() as u64,
        identity_checks,
        violations,
    }
}

/// Every quasi-function from `dom` to `cod`.
pub fn all_quasi_functions(dom: &QSet, cod: &QSet) -> Vec<QuasiFunction> {
    let dcls: Vec<&Elem> = dom.elems().keys().collect();
    let ccls: Vec<&Elem> = cod.elems().keys().collect();
    if ccls.is_empty() {
        return if dcls.is_empty() {
            vec![identity(dom)]
        } else {
            Vec::new()
        };
    }
    let mut out = Vec::new();
    let mut choice = vec![0usize; dcls.len()];
    loop {
        let graph = dcls
            .iter()
            .zip(&choice)
            .map(|(a, &c)| ((*a).clone(), ccls[c].clone()))
            .collect();
        out.push(QuasiFunction(QuasiRelation {
            dom: dom.clone(),
            cod: cod.clone(),
            graph,
        }));
        let mut i = 0;
        loop {
            if i == dcls.len() {
                return out;
            }
            choice[i] += 1;
            if choice[i] < ccls.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Objects and morphisms of a category, both given as qsets; each morphism
/// element is a [`QuasiFunction::encode`] form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryPresentation {
    objects: QSet,
    morphisms: QSet,
}

impl CategoryPresentation {
    pub fn new(objects: QSet, morphisms: QSet) -> Result<Self> {
        for (m, _) in morphisms.iter() {
            let f = QuasiFunction::decode(m).ok_or_else(|| {
                Error::NotAQuasiFunction("morphism element is not an encoded quasi-function".into())
            })?;
            if !objects.contains(&Elem::Set(f.dom().clone()))
                || !objects.contains(&Elem::Set(f.cod().clone()))
            {
                return Err(Error::UnknownClass("objects"));
            }
        }
        Ok(CategoryPresentation { objects, morphisms })
    }

    /// The objects with their identity morphisms.
    pub fn discrete(objects: QSet) -> Self {
        let morphisms = QSet::from_elems(
            objects
                .elems()
                .keys()
                .filter_map(Elem::as_set)
                .map(|o| identity(o).encode()),
        );
        CategoryPresentation { objects, morphisms }
    }

    pub fn objects(&self) -> &QSet {
        &self.objects
    }

    pub fn morphisms(&self) -> &QSet {
        &self.morphisms
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{CAtomId, KindId};

    const K: Elem = Elem::M(KindId(0));
    const J: Elem = Elem::M(KindId(1));
    const A1: Elem = Elem::C(CAtomId(0));
    const A2: Elem = Elem::C(CAtomId(1));

    fn q(items: &[(Elem, u64)]) -> QSet {
        QSet::from_counts(items.iter().cloned())
    }

    #[test]
    fn congruence_examples() {
        let r = QuasiRelation::new(q(&[(K, 2)]), q(&[(J, 2)]), [(K, J)]).unwrap();
        assert!(is_quasi_function(&r));
        let r = QuasiRelation::new(q(&[(K, 2)]), q(&[(J, 2), (A1, 1)]), [(K, J), (K, A1)]).unwrap();
        assert!(!is_quasi_function(&r));
        let c = q(&[(A1, 1), (A2, 1)]);
        let r = QuasiRelation::new(c.clone(), c, [(A1, A2), (A2, A1)]).unwrap();
        assert!(is_quasi_function(&r));
        // partial
        let r = QuasiRelation::new(q(&[(K, 1), (A1, 1)]), q(&[(J, 1)]), [(K, J)]).unwrap();
        assert!(!is_quasi_function(&r));
    }

    #[test]
    fn relation_classes_must_exist() {
        assert_eq!(
            QuasiRelation::new(q(&[(K, 1)]), q(&[(J, 1)]), [(A1, J)]),
            Err(Error::UnknownClass("domain"))
        );
        assert_eq!(
            QuasiRelation::new(q(&[(K, 1)]), q(&[(J, 1)]), [(K, A1)]),
            Err(Error::UnknownClass("codomain"))
        );
    }

    #[test]
    fn identity_examples() {
        assert!(identity(&QSet::empty()).graph().is_empty());
        let a = q(&[(K, 2), (A1, 1)]);
        let id = identity(&a);
        assert_eq!(id.graph(), &Graph::from([(K, K), (A1, A1)]));
        assert!(is_quasi_function(id.relation()));
        assert!(qfun_equiv(&identity(&a), &identity(&a.clone())));
    }

    #[test]
    fn compose_examples() {
        let f = QuasiFunction::new(q(&[(K, 2)]), q(&[(J, 1)]), [(K, J)]).unwrap();
        let g = QuasiFunction::new(q(&[(J, 1)]), q(&[(A1, 1)]), [(J, A1)]).unwrap();
        let gf = compose(&g, &f).unwrap();
        assert_eq!(gf.graph(), &Graph::from([(K, A1)]));
        assert!(qfun_equiv(&compose(&identity(f.cod()), &f).unwrap(), &f));
        assert_eq!(compose(&f, &g), Err(Error::NotComposable));
    }

    #[test]
    fn equiv_examples() {
        let a = q(&[(K, 1), (A1, 1)]);
        let b = q(&[(J, 1), (A2, 1)]);
        let f = QuasiFunction::new(a.clone(), b.clone(), [(K, J), (A1, A2)]).unwrap();
        let g = QuasiFunction::new(a, b, [(K, A2), (A1, J)]).unwrap();
        assert!(qfun_equiv(&f, &f));
        assert!(!qfun_equiv(&f, &g));
    }

    #[test]
    fn enumerates_all_functions() {
        let a = q(&[(K, 2), (A1, 1)]);
        let b = q(&[(J, 1), (A2, 1), (K, 3)]);
        assert_eq!(all_quasi_functions(&a, &b).len(), 9);
        assert_eq!(all_quasi_functions(&QSet::empty(), &b).len(), 1);
        assert!(all_quasi_functions(&a, &QSet::empty()).is_empty());
    }

    #[test]
    fn identities_satisfy_the_laws() {
        let sample: Vec<_> = [q(&[]), q(&[(K, 2)]), q(&[(A1, 1), (J, 1)])]
            .iter()
            .map(identity)
            .collect();
        let r = check_category_laws(&sample, 0);
        assert!(r.passed());
        assert_eq!(r.identity_checks, 6);
        assert_eq!(r.triples_checked, 3);
    }

    #[test]
    fn corrupted_composition_is_caught() {
        let a = q(&[(K, 1), (A1, 1)]);
        let sample: Vec<_> = all_quasi_functions(&a, &a);
        // always answers with the constant map onto the first class
        let bad = |g: &QuasiFunction, f: &QuasiFunction| {
            let c = g.cod().elems().keys().next().cloned();
            let graph: Vec<_> = f
                .dom()
                .elems()
                .keys()
                .map(|x| (x.clone(), c.clone().unwrap()))
                .collect();
            QuasiFunction::new(f.dom().clone(), g.cod().clone(), graph)
        };
        let r = check_category_laws_with(&sample, LawConfig::default(), bad);
        assert!(!r.violations.is_empty());
    }

    #[test]
    fn encoding_round_trips() {
        let f = QuasiFunction::new(q(&[(K, 2), (A1, 1)]), q(&[(J, 1)]), [(K, J), (A1, J)]).unwrap();
        assert_eq!(QuasiFunction::decode(&f.encode()), Some(f));
        assert_eq!(QuasiFunction::decode(&K), None);
    }

    #[test]
    fn presentation_checks_objects() {
        let a = q(&[(K, 1)]);
        let b = q(&[(J, 1)]);
        let f = QuasiFunction::new(a.clone(), b.clone(), [(K, J)]).unwrap();
        let objs = QSet::from_elems([Elem::Set(a.clone()), Elem::Set(b)]);
        assert!(CategoryPresentation::new(objs, QSet::from_elems([f.encode()])).is_ok());
        let only_a = QSet::from_elems([Elem::Set(a)]);
        assert!(CategoryPresentation::new(only_a, QSet::from_elems([f.encode()])).is_err());
    }
}
