use std::cell::Cell;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use thiserror::Error;

use super::lexer::{tokenize, Span};
use super::parser::{parse, parse_expr, Expr, ExprKind, Op, Program, Stmt, StmtKind};
use super::LangError;
use crate::algebra::{self, IndexedFamily};
use crate::error::Error;
use crate::kernel::{AtomRef, Elem, KindId, QSet, Signature};
use crate::morphism::{self, CategoryPresentation, QuasiFunction};
use crate::universe::{self, Classification, ClosureReport, Fragment, FragmentCaps, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound name `{0}`")]
    Unbound(String),
    #[error("`{op}` expects {expected}, found {found}")]
    TypeMismatch {
        op: String,
        expected: &'static str,
        found: &'static str,
    },
    #[error("`{0}` names a kind, not a value")]
    KindAsValue(String),
    #[error("only {declared} m-atom(s) declared as `{name}`, literal uses {used}")]
    MAtomBudget {
        name: String,
        declared: u64,
        used: u64,
    },
    #[error("m-atom `{0}` cannot appear in an equality assertion; use `indist`")]
    MAtomEquality(String),
    #[error("unknown kind `{0}`")]
    UnknownKind(String),
    #[error("`check` needs a boolean, found {0}")]
    CheckNotBoolean(&'static str),
    #[error("family is not functional: index element {0} occurs twice")]
    FamilyNotFunctional(String),
    #[error(transparent)]
    Op(#[from] Error),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Report {
    Closure(Arc<ClosureReport>),
    Classification(Classification),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    QSet(QSet),
    Atom(AtomRef),
    /// A primitive pair, usable only as an element.
    Pair(Elem),
    Function(QuasiFunction),
    Fragment(Arc<Fragment>),
    Boolean(bool),
    Natural(u64),
    Report(Report),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::QSet(_) => "qset",
            Value::Atom(_) => "atom",
            Value::Pair(_) => "pair",
            Value::Function(_) => "quasi-function",
            Value::Fragment(_) => "fragment",
            Value::Boolean(_) => "boolean",
            Value::Natural(_) => "natural",
            Value::Report(_) => "report",
        }
    }
}

#[derive(Debug, Clone)]
enum Binding {
    Kind(KindId),
    /// `budget` is `None` for the implicit `m_K` alias of a kind.
    Alias {
        kind: KindId,
        budget: Option<u64>,
    },
    Value(Value),
}

/// Outcome of one top-level statement.
#[derive(Debug, Clone, PartialEq)]
pub struct StmtResult {
    pub span: Span,
    /// Value of an expression statement.
    pub value: Option<Value>,
    /// Result of a `check` statement.
    pub check: Option<bool>,
}

/// Declarations, bindings and limits of one evaluation session.
#[derive(Debug, Clone, Default)]
pub struct Session {
    sig: Signature,
    env: HashMap<String, Binding>,
    pub caps: FragmentCaps,
    /// Depth used by `build` when none is given.
    pub default_depth: u32,
    checks: Vec<(Span, bool)>,
}

fn type_err(op: Op, expected: &'static str, v: &Value) -> EvalError {
    EvalError::TypeMismatch {
        op: op.name().to_string(),
        expected,
        found: v.type_name(),
    }
}

impl Session {
    pub fn new() -> Self {
        Session {
            default_depth: 1,
            ..Default::default()
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn checks(&self) -> &[(Span, bool)] {
        &self.checks
    }

    pub fn lookup(&self, name: &str) -> Option<&Value> {
        match self.env.get(name) {
            Some(Binding::Value(v)) => Some(v),
            _ => None,
        }
    }

    /// Runs a whole program, stopping at the first error.
    pub fn run(&mut self, src: &str) -> Result<Vec<StmtResult>, LangError> {
        let program = parse(&tokenize(src)?)?;
        self.run_program(&program)
    }

    pub fn run_program(&mut self, program: &Program) -> Result<Vec<StmtResult>, LangError> {
        program.stmts.iter().map(|s| self.execute(s)).collect()
    }

    /// Evaluates a single expression in the current session.
    pub fn eval_str(&mut self, src: &str) -> Result<Value, LangError> {
        let expr = parse_expr(&tokenize(src)?)?;
        self.eval(&expr)
    }

    pub fn render(&self, v: &Value) -> String {
        match v {
            Value::QSet(q) => self.sig.render(q),
            Value::Atom(a) => self.sig.render_elem(&Elem::from(*a)),
            Value::Pair(e) => self.sig.render_elem(e),
            Value::Function(f) => {
                let graph = QSet::from_elems(
                    f.graph()
                        .iter()
                        .map(|(a, b)| Elem::pair(a.clone(), b.clone())),
                );
                format!(
                    "qfun({}, {}, {})",
                    self.sig.render(f.dom()),
                    self.sig.render(f.cod()),
                    self.sig.render(&graph)
                )
            }
            Value::Fragment(fr) => format!(
                "<fragment: {} classes, qcard {}, depth {}, {} cutoffs>",
                fr.elements().class_count(),
                fr.elements().qcard(),
                fr.depth(),
                fr.cutoffs().count()
            ),
            Value::Boolean(b) => b.to_string(),
            Value::Natural(n) => n.to_string(),
            Value::Report(Report::Closure(r)) => format!(
                "<closure: cond1 {}/{}, cond2 {}/{}, cond3 {}/{}, cond4 {}/{}, theorem1 {}/{}, skipped {}>",
                r.totals.cond1.defects,
                r.totals.cond1.checked,
                r.totals.cond2.defects,
                r.totals.cond2.checked,
                r.totals.cond3.defects,
                r.totals.cond3.checked,
                r.totals.cond4.defects,
                r.totals.cond4.checked,
                r.totals.theorem1.defects,
                r.totals.theorem1.checked,
                r.totals.skipped
            ),
            Value::Report(Report::Classification(c)) => match c.verdict {
                Verdict::UQset => "u_qset".into(),
                Verdict::UProperQclass => "u_proper_qclass".into(),
                Verdict::Neither => "neither".into(),
            },
        }
    }

    fn bind(&mut self, name: &super::Ident, b: Binding) -> Result<(), LangError> {
        if self.env.contains_key(&name.name) {
            return Err(LangError::Eval {
                span: name.span,
                error: Error::DuplicateName(name.name.clone()).into(),
            });
        }
        self.env.insert(name.name.clone(), b);
        Ok(())
    }

    pub fn execute(&mut self, stmt: &Stmt) -> Result<StmtResult, LangError> {
        let mut out = StmtResult {
            span: stmt.span,
            value: None,
            check: None,
        };
        let err = |span, error: EvalError| LangError::Eval { span, error };
        match &stmt.node {
            StmtKind::KindDecl(name) => {
                let alias = format!("m_{}", name.name);
                if self.env.contains_key(&alias) {
                    return Err(err(name.span, Error::DuplicateName(alias).into()));
                }
                if self.env.contains_key(&name.name) {
                    return Err(err(
                        name.span,
                        Error::DuplicateName(name.name.clone()).into(),
                    ));
                }
                let id = self
                    .sig
                    .declare_kind(&name.name)
                    .map_err(|e| err(name.span, e.into()))?;
                self.env.insert(name.name.clone(), Binding::Kind(id));
                self.env.insert(
                    alias,
                    Binding::Alias {
                        kind: id,
                        budget: None,
                    },
                );
            }
            StmtKind::MAtomDecl { name, kind, count } => {
                let Some(Binding::Kind(id)) = self.env.get(&kind.name) else {
                    return Err(err(kind.span, EvalError::UnknownKind(kind.name.clone())));
                };
                let b = Binding::Alias {
                    kind: *id,
                    budget: Some(*count),
                };
                self.bind(name, b)?;
            }
            StmtKind::CAtomDecl(name) => {
                if self.env.contains_key(&name.name) {
                    return Err(err(
                        name.span,
                        Error::DuplicateName(name.name.clone()).into(),
                    ));
                }
                let id = self
                    .sig
                    .declare_catom(&name.name)
                    .map_err(|e| err(name.span, e.into()))?;
                self.env.insert(
                    name.name.clone(),
                    Binding::Value(Value::Atom(AtomRef::CAtom(id))),
                );
            }
            StmtKind::Let { name, value } => {
                let v = self.eval(value)?;
                self.bind(name, Binding::Value(v))?;
            }
            StmtKind::Check(e) => match self.eval(e)? {
                Value::Boolean(b) => {
                    self.checks.push((stmt.span, b));
                    out.check = Some(b);
                }
                v => return Err(err(e.span, EvalError::CheckNotBoolean(v.type_name()))),
            },
            StmtKind::Expr(e) => out.value = Some(self.eval(e)?),
        }
        Ok(out)
    }

    pub fn eval(&mut self, e: &Expr) -> Result<Value, LangError> {
        match &e.node {
            ExprKind::Int(n) => Ok(Value::Natural(*n)),
            ExprKind::Name(n) => match self.env.get(n) {
                None => Err(LangError::Eval {
                    span: e.span,
                    error: EvalError::Unbound(n.clone()),
                }),
                Some(Binding::Kind(_)) => Err(LangError::Eval {
                    span: e.span,
                    error: EvalError::KindAsValue(n.clone()),
                }),
                Some(Binding::Alias { kind, .. }) => {
                    let kind = *kind;
                    Ok(Value::Atom(self.sig.fresh_matom(kind)))
                }
                Some(Binding::Value(v)) => Ok(v.clone()),
            },
            ExprKind::QSetLit(items) => {
                let mut used: BTreeMap<&str, u64> = BTreeMap::new();
                let mut counts = Vec::with_capacity(items.len());
                for it in items {
                    if let ExprKind::Name(n) = &it.expr.node {
                        if let Some(Binding::Alias {
                            budget: Some(declared),
                            ..
                        }) = self.env.get(n)
                        {
                            let u = used.entry(n).or_default();
                            *u += it.count;
                            if *u > *declared {
                                return Err(LangError::Eval {
                                    span: it.span,
                                    error: EvalError::MAtomBudget {
                                        name: n.clone(),
                                        declared: *declared,
                                        used: *u,
                                    },
                                });
                            }
                        }
                    }
                    let v = self.eval(&it.expr)?;
                    let elem = as_elem(&v).ok_or_else(|| LangError::Eval {
                        span: it.expr.span,
                        error: EvalError::TypeMismatch {
                            op: "{...}".into(),
                            expected: "an element",
                            found: v.type_name(),
                        },
                    })?;
                    counts.push((elem, it.count));
                }
                Ok(Value::QSet(QSet::from_counts(counts)))
            }
            ExprKind::App { op, args } => {
                let vals = args
                    .iter()
                    .map(|a| self.eval(a))
                    .collect::<Result<Vec<_>, _>>()?;
                let blame = Cell::new(None);
                self.apply(*op, &vals, args, &blame)
                    .map_err(|error| LangError::Eval {
                        span: blame.get().map_or(e.span, |i: usize| args[i].span),
                        error,
                    })
            }
        }
    }

    /// Applies `op`; on a type error `blame` is set to the offending argument.
    fn apply(
        &mut self,
        op: Op,
        v: &[Value],
        args: &[Expr],
        blame: &Cell<Option<usize>>,
    ) -> Result<Value, EvalError> {
        let caps = self.caps;
        let fail = |i: usize, expected| {
            blame.set(Some(i));
            type_err(op, expected, &v[i])
        };
        let elem = |i: usize| as_elem(&v[i]).ok_or_else(|| fail(i, "an element"));
        let qset = |i: usize| as_qset(&v[i]).ok_or_else(|| fail(i, "a qset"));
        let fun = |i: usize| match &v[i] {
            Value::Function(f) => Ok(f),
            _ => Err(fail(i, "a quasi-function")),
        };
        let nat = |i: usize| match &v[i] {
            Value::Natural(n) => Ok(*n),
            _ => Err(fail(i, "a natural")),
        };
        Ok(match op {
            Op::Indist => match (&v[0], &v[1]) {
                (Value::Function(f), Value::Function(g)) => {
                    Value::Boolean(morphism::qfun_equiv(f, g))
                }
                _ => Value::Boolean(crate::kernel::indist(&elem(0)?, &elem(1)?)),
            },
            Op::Qc => Value::Natural(qset(0)?.qcard().get()),
            Op::Classical => Value::Boolean(qset(0)?.is_classical()),
            Op::Mem => Value::Natural(crate::kernel::mem_count(&elem(0)?, &qset(1)?)),
            Op::Pow => Value::QSet(algebra::power(&qset(0)?, &caps.algebra)?),
            Op::Sing => Value::QSet(algebra::singleton_in(&elem(0)?, &qset(1)?)?),
            Op::Pair => Value::QSet(algebra::pair_in(&elem(0)?, &elem(1)?, &qset(2)?)?),
            Op::OPair => Value::QSet(algebra::opair_in(&elem(0)?, &elem(1)?, &qset(2)?)?),
            Op::Prod => Value::QSet(algebra::product(&qset(0)?, &qset(1)?, &caps.algebra)?),
            Op::Union => Value::QSet(algebra::union(&qset(0)?, &qset(1)?)),
            Op::BigUnion => {
                let fam = qset(0)?;
                let mut entries = BTreeMap::new();
                for (p, _) in fam.iter() {
                    let (i, x) = p
                        .as_pair()
                        .ok_or_else(|| fail(0, "a qset of pp(index, qset) pairs"))?;
                    let x = x
                        .as_set()
                        .ok_or_else(|| fail(0, "a qset of pp(index, qset) pairs"))?;
                    if entries.insert(i.clone(), x.clone()).is_some() {
                        return Err(EvalError::FamilyNotFunctional(self.sig.render_elem(i)));
                    }
                }
                let index = QSet::from_elems(entries.keys().cloned());
                Value::QSet(algebra::family_union(&IndexedFamily::new(index, entries)?)?)
            }
            Op::QFun => {
                let graph = qset(2)?;
                let mut pairs = Vec::new();
                for (p, _) in graph.iter() {
                    let (a, b) = p
                        .as_pair()
                        .ok_or_else(|| fail(2, "a qset of pp(class, class) pairs"))?;
                    pairs.push((a.clone(), b.clone()));
                }
                Value::Function(QuasiFunction::new(qset(0)?, qset(1)?, pairs)?)
            }
            Op::IdQ => Value::Function(morphism::identity(&qset(0)?)),
            Op::Comp => Value::Function(morphism::compose(fun(0)?, fun(1)?)?),
            Op::QEquiv => match (&v[0], &v[1]) {
                (Value::Function(f), Value::Function(g)) => {
                    Value::Boolean(morphism::qfun_equiv(f, g))
                }
                _ => Value::Boolean(qset(0)? == qset(1)?),
            },
            Op::Build => {
                let seeds_q = qset(0)?;
                let depth = if v.len() > 1 {
                    nat(1)? as u32
                } else {
                    self.default_depth
                };
                let mut seeds = Vec::new();
                for (e, n) in seeds_q.iter() {
                    for _ in 0..n {
                        seeds.push(e.clone());
                    }
                }
                Value::Fragment(Arc::new(universe::build_fragment(&seeds, depth, caps)?))
            }
            Op::Audit => {
                let report = match &v[0] {
                    Value::Fragment(f) => universe::check_fragment(f),
                    _ => universe::check_qed(&qset(0)?, &(&caps).into()),
                };
                Value::Report(Report::Closure(Arc::new(report)))
            }
            Op::Classify => Value::Report(Report::Classification(universe::classify(
                &qset(0)?,
                &qset(1)?,
            ))),
            Op::Small => {
                let objects = qset(0)?;
                let (pres, u) = if v.len() == 2 {
                    (CategoryPresentation::discrete(objects), qset(1)?)
                } else {
                    (CategoryPresentation::new(objects, qset(1)?)?, qset(2)?)
                };
                Value::Boolean(universe::is_small_category(&pres, &u))
            }
            Op::Pp => Value::Pair(Elem::pair(elem(0)?, elem(1)?)),
            Op::Eq => {
                for (i, (a, x)) in args.iter().zip(v).enumerate() {
                    if let Value::Atom(at) = x {
                        if at.is_matom() {
                            blame.set(Some(i));
                            let name = match &a.node {
                                ExprKind::Name(n) => n.clone(),
                                _ => "m-atom".into(),
                            };
                            return Err(EvalError::MAtomEquality(name));
                        }
                    }
                }
                Value::Boolean(match (&v[0], &v[1]) {
                    (Value::Natural(a), Value::Natural(b)) => a == b,
                    (Value::Boolean(a), Value::Boolean(b)) => a == b,
                    (Value::Function(f), Value::Function(g)) => morphism::qfun_equiv(f, g),
                    (Value::Natural(_) | Value::Boolean(_), _) => {
                        return Err(fail(1, "a value of the same type"))
                    }
                    _ => elem(0)? == elem(1)?,
                })
            }
        })
    }
}

fn as_elem(v: &Value) -> Option<Elem> {
    match v {
        Value::QSet(q) => Some(Elem::Set(q.clone())),
        Value::Atom(a) => Some((*a).into()),
        Value::Pair(e) => Some(e.clone()),
        Value::Function(f) => Some(f.encode()),
        Value::Fragment(f) => Some(Elem::Set(f.elements().clone())),
        _ => None,
    }
}

fn as_qset(v: &Value) -> Option<QSet> {
    match v {
        Value::QSet(q) => Some(q.clone()),
        Value::Fragment(f) => Some(f.elements().clone()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn session(prelude: &str) -> Session {
        let mut s = Session::new();
        s.run(prelude).unwrap();
        s
    }

    fn nat(s: &mut Session, src: &str) -> u64 {
        match s.eval_str(src).unwrap() {
            Value::Natural(n) => n,
            v => panic!("expected natural, got {v:?}"),
        }
    }

    #[test]
    fn quasi_cardinals() {
        let mut s = session("kind K; matoms m: K^2");
        assert_eq!(nat(&mut s, "qc({m^2})"), 2);
        assert_eq!(nat(&mut s, "qc(pow({m^2}))"), 4);
    }

    #[test]
    fn singleton_outside_universe() {
        let src = "kind K; kind J; matoms m: K^1; matoms n: J^3\nsing(m, {n^3})";
        let mut s = Session::new();
        let err = s.run(src).unwrap_err();
        let LangError::Eval { span, error } = err else {
            panic!("expected evaluation error")
        };
        assert_eq!(error, EvalError::Op(Error::NotInUniverse));
        assert_eq!(&src[span.start..span.end], "sing(m, {n^3})");
    }

    #[test]
    fn render_uses_kind_alias() {
        let mut s = session("kind K; catom A1; matoms m: K^2");
        let v = s.eval_str("{m^2, A1}").unwrap();
        assert_eq!(s.render(&v), "{m_K^2, A1}");
        let e = s.eval_str("{}").unwrap();
        assert_eq!(s.render(&e), "{}");
    }

    #[test]
    fn budget_enforced() {
        let mut s = session("kind K; matoms m: K^2");
        let err = s.eval_str("{m, m^2}").unwrap_err();
        assert!(matches!(
            err,
            LangError::Eval {
                error: EvalError::MAtomBudget { .. },
                ..
            }
        ));
        // the implicit alias is unbounded
        assert_eq!(nat(&mut s, "qc({m_K^7})"), 7);
    }

    #[test]
    fn checks_are_recorded() {
        let mut s = Session::new();
        let r = s
            .run("kind K; matoms m: K^2\nlet B = {m^2}\nlet f = idq(B)\ncheck qequiv(comp(idq(B), f), f)\ncheck eq(qc(B), 3)")
            .unwrap();
        assert_eq!(r[4].check, Some(true));
        assert_eq!(r[5].check, Some(false));
        assert_eq!(s.checks().len(), 2);
    }

    #[test]
    fn matom_equality_rejected() {
        let mut s = session("kind K; matoms m: K^2");
        assert!(matches!(
            s.eval_str("eq(m, m)"),
            Err(LangError::Eval {
                error: EvalError::MAtomEquality(_),
                ..
            })
        ));
        assert_eq!(s.eval_str("indist(m, m)").unwrap(), Value::Boolean(true));
    }

    #[test]
    fn type_errors_point_at_argument() {
        let src = "sing(classical({}), {})";
        let mut s = Session::new();
        let err = s.run(src).unwrap_err();
        assert_eq!(&src[err.span().start..err.span().end], "classical({})");
    }

    #[test]
    fn unbound_names() {
        let mut s = Session::new();
        let err = s.run("qc(x)").unwrap_err();
        assert_eq!(err.span(), Span::new(3, 4));
    }

    #[test]
    fn functions_render_and_reparse() {
        let mut s = session("kind K; kind J; catom A1");
        let f = s
            .eval_str("qfun({m_K^2, A1}, {m_J}, {pp(m_K, m_J), pp(A1, m_J)})")
            .unwrap();
        let text = s.render(&f);
        assert_eq!(
            text,
            "qfun({m_K^2, A1}, {m_J}, {pp(A1, m_J), pp(m_K, m_J)})"
        );
        assert_eq!(s.eval_str(&text).unwrap(), f);
        assert!(s
            .eval_str("qfun({m_K}, {m_J, A1}, {pp(m_K, m_J), pp(m_K, A1)})")
            .is_err());
    }

    #[test]
    fn family_union_from_pairs() {
        let mut s = session("kind K; kind J; catom A1; catom A2");
        let v = s
            .eval_str("bigunion({pp(A1, {m_K}), pp(A2, {m_J})})")
            .unwrap();
        assert_eq!(s.render(&v), "{m_K, m_J}");
        assert!(s.eval_str("bigunion({pp(m_K, {})})").is_err());
        assert!(s.eval_str("bigunion({pp(A1, {}), pp(A1, {m_K})})").is_err());
    }

    #[test]
    fn fragments_and_reports() {
        let mut s = session("kind K; matoms m: K^1");
        s.run("let U = build({{m}}, 1)").unwrap();
        let c = s.eval_str("classify(U, U)").unwrap();
        assert_eq!(s.render(&c), "u_proper_qclass");
        assert_eq!(s.eval_str("small(U, U)").unwrap(), Value::Boolean(false));
        let r = s.eval_str("audit(U)").unwrap();
        assert!(s.render(&r).starts_with("<closure: cond1 "));
    }

    #[test]
    fn redeclaration_rejected() {
        let mut s = Session::new();
        assert!(s.run("kind K; kind K").is_err());
        let mut s = Session::new();
        assert!(s.run("catom m_K; kind K").is_err());
    }
}
