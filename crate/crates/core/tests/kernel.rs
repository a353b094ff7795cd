mod oracle;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qset_core::gen::{self, Shape};
use qset_core::kernel::{canonicalize, relabel, LabeledElem, LabeledSet};

fn shape(kinds: u32, catoms: u32, max_qcard: u64, max_depth: u32) -> Shape {
    Shape {
        kinds,
        catoms,
        max_qcard,
        max_depth,
        pairs: true,
    }
}

fn build(seed: u64, s: &Shape) -> LabeledSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut next = 0;
    gen::labeled_build(&mut rng, s, &mut next)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn canonical_form_is_permutation_invariant(seed in any::<u64>()) {
        let b = build(seed, &shape(3, 2, 8, 3));
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let base = canonicalize(&b);
        for _ in 0..5 {
            let pi = gen::permutation(&mut rng, &b);
            prop_assert_eq!(&relabel(&b, &pi).unwrap(), &base);
        }
    }

    #[test]
    fn equality_agrees_with_labeled_matching(s1 in any::<u64>(), s2 in any::<u64>()) {
        // Few kinds and small sizes so that equal pairs are common.
        let sh = shape(1, 1, 3, 2);
        let a = build(s1, &sh);
        let b = build(s2, &sh);
        prop_assert_eq!(
            canonicalize(&a) == canonicalize(&b),
            oracle::labeled_set_indist(&a, &b)
        );
    }

    #[test]
    fn equality_is_an_equivalence(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let sh = shape(1, 1, 2, 2);
        let (a, b, c) = (canonicalize(&build(s1, &sh)), canonicalize(&build(s2, &sh)), canonicalize(&build(s3, &sh)));
        prop_assert!(a == a);
        prop_assert_eq!(a == b, b == a);
        if a == b && b == c {
            prop_assert!(a == c);
        }
    }

    #[test]
    fn qcard_counts_labeled_elements(seed in any::<u64>()) {
        let b = build(seed, &shape(2, 0, 6, 3));
        // No classical atoms, so only classical nested sets (built from the
        // empty set) can collapse.
        let q = canonicalize(&b);
        let collapsed = dedup_count(&b);
        prop_assert_eq!(q.qcard().get(), collapsed);
    }

    #[test]
    fn classical_agrees_with_labeled_reading(seed in any::<u64>()) {
        let b = build(seed, &shape(2, 2, 5, 3));
        let q = canonicalize(&b);
        prop_assert_eq!(q.is_classical(), b.0.iter().all(oracle::labeled_classical));
    }

    #[test]
    fn classical_sets_are_hereditarily_classical(seed in any::<u64>()) {
        let b = build(seed, &shape(0, 3, 5, 4));
        let q = canonicalize(&b);
        prop_assert!(q.is_classical());
        for e in q.hereditary_elems() {
            prop_assert!(e.is_classical(), "{:?}", e);
        }
        for (_, n) in q.iter() {
            prop_assert_eq!(n, 1);
        }
    }

    #[test]
    fn normal_forms_agree(seed in any::<u64>()) {
        let b = build(seed, &shape(3, 2, 6, 3));
        let q = canonicalize(&b);
        prop_assert_eq!(oracle::set_form(&b), oracle::qset_form(&q));
    }
}

fn dedup_count(b: &LabeledSet) -> u64 {
    let mut kept: Vec<&LabeledElem> = Vec::new();
    for e in &b.0 {
        if oracle::labeled_classical(e) && kept.iter().any(|k| oracle::labeled_indist(k, e)) {
            continue;
        }
        kept.push(e);
    }
    kept.len() as u64
}

#[test]
fn expansion_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let q = gen::qset(&mut rng, &shape(2, 2, 5, 3));
        let mut next = 0;
        assert_eq!(canonicalize(&oracle::expand(&q, &mut next)), q);
    }
}

#[test]
fn atoms_of_distinct_kinds_differ() {
    let a = LabeledElem::MAtom {
        kind: qset_core::KindId(0),
        label: qset_core::kernel::Label(1),
    };
    let b = LabeledElem::MAtom {
        kind: qset_core::KindId(1),
        label: qset_core::kernel::Label(1),
    };
    assert!(!oracle::labeled_indist(&a, &b));
    assert_ne!(
        canonicalize(&LabeledSet(vec![a])),
        canonicalize(&LabeledSet(vec![b]))
    );
}
