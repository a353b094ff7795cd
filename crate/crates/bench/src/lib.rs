//! Deterministic inputs shared by the benchmarks.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qset_core::gen::{self, Shape};
use qset_core::kernel::{CAtomId, Elem, KindId, QSet};
use qset_core::QuasiFunction;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A flat qset of quasi-cardinal `n` spread over three kinds and one
/// classical atom.
pub fn flat(n: u64) -> QSet {
    let per = n / 3;
    let mut items = vec![
        (Elem::M(KindId(0)), per),
        (Elem::M(KindId(1)), per),
        (Elem::M(KindId(2)), n - 2 * per - (n > 0) as u64),
    ];
    if n > 0 {
        items.push((Elem::C(CAtomId(0)), 1));
    }
    QSet::from_counts(items.into_iter().filter(|&(_, c)| c > 0))
}

/// A nested qset of quasi-cardinal `n` from a fixed seed.
pub fn nested(n: u64) -> QSet {
    let shape = Shape {
        kinds: 3,
        catoms: 2,
        max_qcard: n,
        max_depth: 3,
        pairs: true,
    };
    gen::qset_of_qcard(&mut rng(n), &shape, n)
}

pub fn law_sample(chains: usize) -> Vec<QuasiFunction> {
    gen::law_sample(&mut rng(0), chains, 5)
}
