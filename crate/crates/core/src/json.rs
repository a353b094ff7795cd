//! Stable JSON views of fragments, closure reports and law reports.
//!
//! Element forms are written in canonical textual form, so output depends only
//! on the declarations and the values themselves.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::kernel::{Elem, QSet, Signature};
use crate::morphism::{LawReport, Violation};
use crate::universe::{ClosureReport, Construct, Fragment, Totals};

pub const SCHEMA: &str = "qset/1";

#[derive(Debug, Serialize)]
pub struct DefectJson {
    pub witnesses: Vec<String>,
    pub missing: String,
}

#[derive(Debug, Serialize)]
pub struct DerivedJson {
    pub construct: Construct,
    pub witnesses: Vec<String>,
    pub missing: String,
}

#[derive(Debug, Serialize)]
pub struct DefectsJson {
    pub cond1: Vec<DefectJson>,
    pub cond2: Vec<DefectJson>,
    pub cond3: Vec<DefectJson>,
    pub cond4: Vec<DefectJson>,
    pub theorem1: Vec<DerivedJson>,
}

#[derive(Debug, Serialize)]
pub struct SkippedJson {
    pub condition: u8,
    pub witnesses: Vec<String>,
    pub reason: String,
}

#[derive(Debug, Serialize)]
pub struct AuditJson {
    pub schema: &'static str,
    /// `[textual form, count]` per element class.
    pub elements: Vec<(String, u64)>,
    pub rank: BTreeMap<String, u32>,
    pub cutoffs: usize,
    pub defects: DefectsJson,
    pub skipped: Vec<SkippedJson>,
    pub totals: Totals,
}

#[derive(Debug, Serialize)]
pub struct LawsJson<'a> {
    pub schema: &'static str,
    pub seed: u64,
    pub samples: usize,
    pub morphisms: usize,
    pub composable_triples: u64,
    pub sampled: bool,
    pub triples_checked: u64,
    pub identity_checks: u64,
    pub violations: &'a [Violation],
}

fn texts(sig: &Signature, es: &[Elem]) -> Vec<String> {
    es.iter().map(|e| sig.render_elem(e)).collect()
}

/// Audit of a universe given as a plain qset, or of a fragment when one is
/// supplied (its cutoff count is then included).
pub fn audit(
    sig: &Signature,
    universe: &QSet,
    fragment: Option<&Fragment>,
    r: &ClosureReport,
) -> AuditJson {
    let defects = |ds: &[crate::universe::Defect]| {
        ds.iter()
            .map(|d| DefectJson {
                witnesses: texts(sig, &d.witnesses),
                missing: sig.render_elem(&d.missing),
            })
            .collect()
    };
    AuditJson {
        schema: SCHEMA,
        elements: universe
            .iter()
            .map(|(e, n)| (sig.render_elem(e), n))
            .collect(),
        rank: universe
            .elems()
            .keys()
            .map(|e| (sig.render_elem(e), e.rank()))
            .collect(),
        cutoffs: fragment.map_or(0, |f| f.cutoffs().count()),
        defects: DefectsJson {
            cond1: defects(&r.cond1),
            cond2: defects(&r.cond2),
            cond3: defects(&r.cond3),
            cond4: defects(&r.cond4),
            theorem1: r
                .theorem1
                .iter()
                .map(|d| DerivedJson {
                    construct: d.construct,
                    witnesses: texts(sig, &d.witnesses),
                    missing: sig.render_elem(&d.missing),
                })
                .collect(),
        },
        skipped: r
            .skipped
            .iter()
            .map(|s| SkippedJson {
                condition: s.condition,
                witnesses: texts(sig, &s.witnesses),
                reason: s.reason.clone(),
            })
            .collect(),
        totals: r.totals.clone(),
    }
}

pub fn laws(samples: usize, r: &LawReport) -> LawsJson<'_> {
    LawsJson {
        schema: SCHEMA,
        seed: r.seed,
        samples,
        morphisms: r.morphisms,
        composable_triples: r.composable_triples,
        sampled: r.sampled,
        triples_checked: r.triples_checked,
        identity_checks: r.identity_checks,
        violations: &r.violations,
    }
}
