//! Syntax-directed type checking, derivations, and one-hole typed contexts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{dual, Formula, Name, Process};

pub type Context = BTreeMap<Name, Formula>;

pub fn ctx_of<'a, I: IntoIterator<Item = (&'a str, Formula)>>(items: I) -> Context {
    items.into_iter().map(|(n, a)| (Name::new(n), a)).collect()
}

pub fn show_ctx(ctx: &Context) -> String {
    let parts: Vec<String> = ctx.iter().map(|(x, a)| format!("{}:{}", x, a)).collect();
    parts.join(", ")
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum System {
    Cp,
    Cp0,
    Cp02,
}

impl System {
    pub fn allows_mix0(self) -> bool {
        self >= System::Cp0
    }
    pub fn allows_mix2(self) -> bool {
        self == System::Cp02
    }
}

impl std::str::FromStr for System {
    type Err = String;
    fn from_str(s: &str) -> Result<System, String> {
        match s {
            "cp" => Ok(System::Cp),
            "cp0" => Ok(System::Cp0),
            "cp02" => Ok(System::Cp02),
            other => Err(format!("unknown system {}", other)),
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            System::Cp => "cp",
            System::Cp0 => "cp0",
            System::Cp02 => "cp02",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unbound name {0}")]
    UnboundName(Name),
    #[error("linearity violation on {0}: {1}")]
    LinearityViolation(Name, String),
    #[error("rule mismatch: {0}")]
    RuleMismatch(String),
    #[error("server on {0} with non-? context entry {1}")]
    NonBangContext(Name, Name),
    #[error("{0} is not available in system {1}")]
    SystemViolation(String, System),
    #[error("hole typed {expected} but filled at {found}")]
    HoleTypeMismatch { expected: String, found: String },
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
}

/// One instance of a typing rule; names identify the principal channel(s).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    Id(Name, Name),
    One(Name),
    Bot(Name),
    /// `Tensor { x, y }` for `x[y].(P | Q)`
    Tensor { x: Name, y: Name },
    Par { x: Name, y: Name },
    Plus { x: Name, i: u8 },
    With(Name),
    OfCourse { x: Name, y: Name },
    WhyNot { x: Name, y: Name },
    Weaken(Name, Formula),
    Contract { x: Name, x1: Name, x2: Name },
    Cut { x: Name, annot: Formula },
    Mix2,
    Mix0,
}

impl Rule {
    pub fn label(&self) -> &'static str {
        match self {
            Rule::Id(..) => "Id",
            Rule::One(_) => "1",
            Rule::Bot(_) => "bot",
            Rule::Tensor { .. } => "*",
            Rule::Par { .. } => "%",
            Rule::Plus { i: 1, .. } => "+1",
            Rule::Plus { .. } => "+2",
            Rule::With(_) => "&",
            Rule::OfCourse { .. } => "!",
            Rule::WhyNot { .. } => "?",
            Rule::Weaken(..) => "W",
            Rule::Contract { .. } => "C",
            Rule::Cut { .. } => "Cut",
            Rule::Mix2 => "Mix2",
            Rule::Mix0 => "Mix0",
        }
    }
}

/// A typing derivation. Each node records its rule, its conclusion context and its premises;
/// the conclusion process is recovered with [`Derivation::process`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: Rule,
    pub ctx: Context,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn process(&self) -> Process {
        use Rule::*;
        let p = |i: usize| Box::new(self.premises[i].process());
        match &self.rule {
            Id(x, y) => Process::Fwd(x.clone(), y.clone()),
            One(x) => Process::EmptyOut(x.clone()),
            Bot(x) => Process::EmptyIn(x.clone(), p(0)),
            Tensor { x, y } => Process::Out(y.clone(), x.clone(), p(0), p(1)),
            Par { x, y } => Process::In(x.clone(), y.clone(), p(0)),
            Plus { x, i } => Process::Select(x.clone(), *i, p(0)),
            With(x) => Process::Case(x.clone(), p(0), p(1)),
            OfCourse { x, y } => Process::Server(x.clone(), y.clone(), p(0)),
            WhyNot { x, y } => Process::Client(x.clone(), y.clone(), p(0)),
            Weaken(x, a) => Process::Weak(x.clone(), a.clone(), p(0)),
            Contract { x, x1, x2 } => Process::Contract(x.clone(), x1.clone(), x2.clone(), p(0)),
            Cut { x, annot } => Process::Cut(x.clone(), annot.clone(), p(0), p(1)),
            Mix2 => Process::Par(p(0), p(1)),
            Mix0 => Process::Inact,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(|d| d.size()).sum::<usize>()
    }

    /// Least system in which this derivation is valid.
    pub fn system(&self) -> System {
        let own = match self.rule {
            Rule::Mix2 => System::Cp02,
            Rule::Mix0 => System::Cp0,
            _ => System::Cp,
        };
        self.premises.iter().map(|d| d.system()).fold(own, |a, b| a.max(b))
    }

    pub fn summary(&self) -> String {
        let mut counts: BTreeMap<&'static str, usize> = BTreeMap::new();
        self.count_rules(&mut counts);
        let parts: Vec<String> = counts.iter().map(|(r, n)| format!("{}:{}", r, n)).collect();
        format!(
            "root {} |- {} ; {} rule instances ({}) ; least system {}",
            self.rule.label(),
            show_ctx(&self.ctx),
            self.size(),
            parts.join(" "),
            self.system()
        )
    }

    fn count_rules(&self, acc: &mut BTreeMap<&'static str, usize>) {
        *acc.entry(self.rule.label()).or_insert(0) += 1;
        for d in &self.premises {
            d.count_rules(acc);
        }
    }
}

fn lookup<'a>(ctx: &'a Context, x: &Name) -> Result<&'a Formula, TypeError> {
    ctx.get(x).ok_or_else(|| TypeError::UnboundName(x.clone()))
}

fn without(ctx: &Context, x: &Name) -> Context {
    let mut c = ctx.clone();
    c.remove(x);
    c
}

fn with(mut ctx: Context, x: &Name, a: Formula) -> Context {
    ctx.insert(x.clone(), a);
    ctx
}

/// Split `ctx` between two premises according to the names each premise uses.
fn split(
    ctx: &Context,
    left: &BTreeSet<Name>,
    right: &BTreeSet<Name>,
) -> Result<(Context, Context), TypeError> {
    let mut l = Context::new();
    let mut r = Context::new();
    for (x, a) in ctx {
        match (left.contains(x), right.contains(x)) {
            (true, true) => {
                return Err(TypeError::LinearityViolation(x.clone(), "used by both premises".into()))
            }
            (true, false) => {
                l.insert(x.clone(), a.clone());
            }
            (false, true) => {
                r.insert(x.clone(), a.clone());
            }
            (false, false) => {
                return Err(TypeError::LinearityViolation(x.clone(), "unused".into()))
            }
        }
    }
    Ok((l, r))
}

fn free_minus(p: &Process, bound: &[&Name]) -> BTreeSet<Name> {
    let mut s = p.free_names();
    for b in bound {
        s.remove(*b);
    }
    s
}

/// Check `p ⊢ ctx` in `sys`, returning the unique derivation.
pub fn check(p: &Process, ctx: &Context, sys: System) -> Result<Derivation, TypeError> {
    // every free name must be assigned, every assignment used
    let fv = p.free_names();
    for x in &fv {
        if !ctx.contains_key(x) {
            return Err(TypeError::UnboundName(x.clone()));
        }
    }
    for x in ctx.keys() {
        if !fv.contains(x) {
            return Err(TypeError::LinearityViolation(x.clone(), "unused".into()));
        }
    }
    check_node(p, ctx, sys)
}

fn node(rule: Rule, ctx: &Context, premises: Vec<Derivation>) -> Result<Derivation, TypeError> {
    Ok(Derivation { rule, ctx: ctx.clone(), premises })
}

fn mismatch(what: &str, x: &Name, a: &Formula) -> TypeError {
    TypeError::RuleMismatch(format!("{} on {} at type {}", what, x, a))
}

fn check_node(p: &Process, ctx: &Context, sys: System) -> Result<Derivation, TypeError> {
    use Formula as F;
    use Process::*;
    match p {
        Inact => {
            if !sys.allows_mix0() {
                return Err(TypeError::SystemViolation("Mix0 (process 0)".into(), sys));
            }
            node(Rule::Mix0, ctx, vec![])
        }
        Fwd(x, y) => {
            if x == y {
                return Err(TypeError::LinearityViolation(x.clone(), "forwarder to itself".into()));
            }
            let a = lookup(ctx, x)?;
            let b = lookup(ctx, y)?;
            if *b != dual(a) {
                return Err(TypeError::RuleMismatch(format!(
                    "forwarder needs dual types, found {}:{} and {}:{}",
                    x, a, y, b
                )));
            }
            node(Rule::Id(x.clone(), y.clone()), ctx, vec![])
        }
        EmptyOut(x) => match lookup(ctx, x)? {
            F::One => node(Rule::One(x.clone()), ctx, vec![]),
            a => Err(mismatch("x[]", x, a)),
        },
        EmptyIn(x, q) => match lookup(ctx, x)? {
            F::Bot => {
                let d = check(q, &without(ctx, x), sys)?;
                node(Rule::Bot(x.clone()), ctx, vec![d])
            }
            a => Err(mismatch("x().P", x, a)),
        },
        Out(y, x, l, r) => match lookup(ctx, x)? {
            F::Tensor(a, b) => {
                let lf = free_minus(l, &[y]);
                if lf.contains(x) {
                    return Err(TypeError::LinearityViolation(x.clone(), "subject used in left premise".into()));
                }
                let rest = without(ctx, x);
                let mut rf = r.free_names();
                rf.remove(x);
                let (cl, cr) = split(&rest, &lf, &rf)?;
                let dl = check(l, &with(cl, y, (**a).clone()), sys)?;
                let dr = check(r, &with(cr, x, (**b).clone()), sys)?;
                node(Rule::Tensor { x: x.clone(), y: y.clone() }, ctx, vec![dl, dr])
            }
            a => Err(mismatch("output", x, a)),
        },
        In(x, y, q) => match lookup(ctx, x)? {
            F::Par(a, b) => {
                if x == y {
                    return Err(TypeError::LinearityViolation(x.clone(), "input binds its own subject".into()));
                }
                let c = with(with(without(ctx, x), y, (**a).clone()), x, (**b).clone());
                let d = check(q, &c, sys)?;
                node(Rule::Par { x: x.clone(), y: y.clone() }, ctx, vec![d])
            }
            a => Err(mismatch("input", x, a)),
        },
        Select(x, i, q) => match lookup(ctx, x)? {
            F::Plus(a, b) => {
                let ai = match i {
                    1 => a,
                    2 => b,
                    _ => return Err(TypeError::RuleMismatch(format!("selection index {}", i))),
                };
                let d = check(q, &with(ctx.clone(), x, (**ai).clone()), sys)?;
                node(Rule::Plus { x: x.clone(), i: *i }, ctx, vec![d])
            }
            a => Err(mismatch("selection", x, a)),
        },
        Case(x, l, r) => match lookup(ctx, x)? {
            F::With(a, b) => {
                let dl = check(l, &with(ctx.clone(), x, (**a).clone()), sys)?;
                let dr = check(r, &with(ctx.clone(), x, (**b).clone()), sys)?;
                node(Rule::With(x.clone()), ctx, vec![dl, dr])
            }
            a => Err(mismatch("case", x, a)),
        },
        Server(x, y, q) => match lookup(ctx, x)? {
            F::OfCourse(a) => {
                for (z, b) in ctx {
                    if z != x && !b.is_why_not() {
                        return Err(TypeError::NonBangContext(x.clone(), z.clone()));
                    }
                }
                let d = check(q, &with(without(ctx, x), y, (**a).clone()), sys)?;
                node(Rule::OfCourse { x: x.clone(), y: y.clone() }, ctx, vec![d])
            }
            a => Err(mismatch("server", x, a)),
        },
        Client(x, y, q) => match lookup(ctx, x)? {
            F::WhyNot(a) => {
                if free_minus(q, &[y]).contains(x) {
                    return Err(TypeError::LinearityViolation(
                        x.clone(),
                        "client subject reused without contraction".into(),
                    ));
                }
                let d = check(q, &with(without(ctx, x), y, (**a).clone()), sys)?;
                node(Rule::WhyNot { x: x.clone(), y: y.clone() }, ctx, vec![d])
            }
            a => Err(mismatch("client", x, a)),
        },
        Weak(x, annot, q) => {
            let a = lookup(ctx, x)?;
            if !a.is_why_not() || a != annot {
                return Err(TypeError::RuleMismatch(format!(
                    "weakening of {} annotated {} at type {}",
                    x, annot, a
                )));
            }
            if q.is_free(x) {
                return Err(TypeError::LinearityViolation(x.clone(), "weakened name still used".into()));
            }
            let d = check(q, &without(ctx, x), sys)?;
            node(Rule::Weaken(x.clone(), annot.clone()), ctx, vec![d])
        }
        Contract(x, x1, x2, q) => {
            let a = lookup(ctx, x)?;
            if !a.is_why_not() {
                return Err(mismatch("contraction", x, a));
            }
            if x1 == x2 {
                return Err(TypeError::LinearityViolation(x1.clone(), "contraction binds one name twice".into()));
            }
            if free_minus(q, &[x1, x2]).contains(x) {
                return Err(TypeError::LinearityViolation(x.clone(), "contracted name still used".into()));
            }
            let c = with(with(without(ctx, x), x1, a.clone()), x2, a.clone());
            let d = check(q, &c, sys)?;
            node(Rule::Contract { x: x.clone(), x1: x1.clone(), x2: x2.clone() }, ctx, vec![d])
        }
        Cut(x, annot, l, r) => {
            let lf = free_minus(l, &[x]);
            let rf = free_minus(r, &[x]);
            let (cl, cr) = split(ctx, &lf, &rf)?;
            let dl = check(l, &with(cl, x, annot.clone()), sys)?;
            let dr = check(r, &with(cr, x, dual(annot)), sys)?;
            node(Rule::Cut { x: x.clone(), annot: annot.clone() }, ctx, vec![dl, dr])
        }
        Par(l, r) => {
            if !sys.allows_mix2() {
                return Err(TypeError::SystemViolation("Mix2 (parallel composition)".into(), sys));
            }
            let (cl, cr) = split(ctx, &l.free_names(), &r.free_names())?;
            let dl = check(l, &cl, sys)?;
            let dr = check(r, &cr, sys)?;
            node(Rule::Mix2, ctx, vec![dl, dr])
        }
    }
}

/// A process with one hole, built by the three context rules (hole, cut with a closed
/// process on the right, parallel with a closed process on the right).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypedContext {
    Hole,
    Cut(Name, Formula, Box<TypedContext>, Process),
    Mix(Box<TypedContext>, Process),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ContextDerivation {
    Hole(Context),
    Cut { x: Name, annot: Formula, inner: Box<ContextDerivation>, right: Derivation, result: Context },
    Mix { inner: Box<ContextDerivation>, right: Derivation, result: Context },
}

impl ContextDerivation {
    pub fn result(&self) -> &Context {
        match self {
            ContextDerivation::Hole(c) => c,
            ContextDerivation::Cut { result, .. } | ContextDerivation::Mix { result, .. } => result,
        }
    }
}

fn names_through(k: &TypedContext, hole: &Context) -> BTreeSet<Name> {
    match k {
        TypedContext::Hole => hole.keys().cloned().collect(),
        TypedContext::Cut(x, _, inner, right) => {
            let mut s = names_through(inner, hole);
            s.extend(right.free_names());
            s.remove(x);
            s
        }
        TypedContext::Mix(inner, right) => {
            let mut s = names_through(inner, hole);
            s.extend(right.free_names());
            s
        }
    }
}

/// Check `k : hole ⊢ result`.
pub fn check_context(
    k: &TypedContext,
    hole: &Context,
    result: &Context,
    sys: System,
) -> Result<ContextDerivation, TypeError> {
    match k {
        TypedContext::Hole => {
            if hole != result {
                return Err(TypeError::HoleTypeMismatch {
                    expected: show_ctx(result),
                    found: show_ctx(hole),
                });
            }
            Ok(ContextDerivation::Hole(hole.clone()))
        }
        TypedContext::Cut(x, annot, inner, right) => {
            let inner_names = names_through(inner, hole);
            if !inner_names.contains(x) {
                return Err(TypeError::LinearityViolation(x.clone(), "cut name not provided by the hole side".into()));
            }
            let mut lnames = inner_names.clone();
            lnames.remove(x);
            let mut rnames = right.free_names();
            rnames.remove(x);
            let (cl, cr) = split(result, &lnames, &rnames)?;
            let dr = check(right, &with(cr, x, dual(annot)), sys)?;
            let di = check_context(inner, hole, &with(cl, x, annot.clone()), sys)?;
            Ok(ContextDerivation::Cut {
                x: x.clone(),
                annot: annot.clone(),
                inner: Box::new(di),
                right: dr,
                result: result.clone(),
            })
        }
        TypedContext::Mix(inner, right) => {
            if !sys.allows_mix2() {
                return Err(TypeError::SystemViolation("Mix2 in context".into(), sys));
            }
            let inner_names = names_through(inner, hole);
            let (cl, cr) = split(result, &inner_names, &right.free_names())?;
            let dr = check(right, &cr, sys)?;
            let di = check_context(inner, hole, &cl, sys)?;
            Ok(ContextDerivation::Mix { inner: Box::new(di), right: dr, result: result.clone() })
        }
    }
}

/// Plug `p` into the hole.
pub fn fill(k: &TypedContext, p: &Process) -> Process {
    match k {
        TypedContext::Hole => p.clone(),
        TypedContext::Cut(x, a, inner, right) => {
            Process::Cut(x.clone(), a.clone(), Box::new(fill(inner, p)), Box::new(right.clone()))
        }
        TypedContext::Mix(inner, right) => Process::Par(Box::new(fill(inner, p)), Box::new(right.clone())),
    }
}

/// Fill after checking that `p` has the hole type.
pub fn fill_checked(
    k: &TypedContext,
    cd: &ContextDerivation,
    p: &Process,
    hole: &Context,
    sys: System,
) -> Result<Process, TypeError> {
    let d = check(p, hole, sys)?;
    let hole_of = |cd: &ContextDerivation| -> Context {
        let mut c = cd;
        loop {
            match c {
                ContextDerivation::Hole(h) => return h.clone(),
                ContextDerivation::Cut { inner, .. } | ContextDerivation::Mix { inner, .. } => c = inner,
            }
        }
    };
    let expected = hole_of(cd);
    if d.ctx != expected {
        return Err(TypeError::TypeMismatch(format!(
            "hole expects {} but process has {}",
            show_ctx(&expected),
            show_ctx(&d.ctx)
        )));
    }
    Ok(fill(k, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::build::*;

    fn f1() -> Formula {
        Formula::One
    }

    #[test]
    fn one_rule() {
        let d = check(&close("x"), &ctx_of([("x", f1())]), System::Cp).unwrap();
        assert_eq!(d.rule, Rule::One(Name::new("x")));
        assert_eq!(d.process(), close("x"));
    }

    #[test]
    fn inact_needs_mix0() {
        assert!(matches!(
            check(&inact(), &Context::new(), System::Cp),
            Err(TypeError::SystemViolation(..))
        ));
        let d = check(&inact(), &Context::new(), System::Cp0).unwrap();
        assert_eq!(d.rule, Rule::Mix0);
    }

    #[test]
    fn forwarder_needs_duals() {
        let e = check(&fwd("x", "y"), &ctx_of([("x", f1()), ("y", f1())]), System::Cp);
        assert!(matches!(e, Err(TypeError::RuleMismatch(_))));
        assert!(check(&fwd("x", "y"), &ctx_of([("x", f1()), ("y", Formula::Bot)]), System::Cp).is_ok());
    }

    #[test]
    fn linearity_and_unbound() {
        let e = check(&close("x"), &ctx_of([("x", f1()), ("y", f1())]), System::Cp);
        assert!(matches!(e, Err(TypeError::LinearityViolation(..))));
        let e = check(&close("x"), &Context::new(), System::Cp);
        assert!(matches!(e, Err(TypeError::UnboundName(_))));
        let e = check(&close("x"), &ctx_of([("x", Formula::Bot)]), System::Cp);
        assert!(matches!(e, Err(TypeError::RuleMismatch(_))));
    }

    #[test]
    fn server_context_must_be_why_not() {
        let p = server("x", "y", wait("z", close("y")));
        let c = ctx_of([("x", Formula::of_course(f1())), ("z", Formula::Bot)]);
        assert!(matches!(check(&p, &c, System::Cp), Err(TypeError::NonBangContext(..))));
        let ok = server("x", "y", close("y"));
        assert!(check(&ok, &ctx_of([("x", Formula::of_course(f1()))]), System::Cp).is_ok());
    }

    #[test]
    fn tensor_split_by_free_names() {
        let a = Formula::tensor(f1(), f1());
        let p = out("x", "y", close("y"), close("x"));
        let d = check(&p, &ctx_of([("x", a)]), System::Cp).unwrap();
        assert_eq!(d.premises.len(), 2);
        assert_eq!(d.process(), p);
    }

    #[test]
    fn mix2_only_in_cp02() {
        let p = mix(close("x"), close("y"));
        let c = ctx_of([("x", f1()), ("y", f1())]);
        assert!(check(&p, &c, System::Cp0).is_err());
        assert!(check(&p, &c, System::Cp02).is_ok());
    }

    #[test]
    fn contexts_and_fill() {
        let c = ctx_of([("x", f1())]);
        let cd = check_context(&TypedContext::Hole, &c, &c, System::Cp).unwrap();
        assert_eq!(cd.result(), &c);
        assert_eq!(fill(&TypedContext::Hole, &close("x")), close("x"));

        // cut the hole's x:1 against a closed-off x().y[]
        let k = TypedContext::Cut(Name::new("x"), f1(), Box::new(TypedContext::Hole), wait("x", close("y")));
        let res = ctx_of([("y", f1())]);
        let cd = check_context(&k, &c, &res, System::Cp).unwrap();
        let filled = fill_checked(&k, &cd, &close("x"), &c, System::Cp).unwrap();
        assert!(check(&filled, &res, System::Cp).is_ok());
        let bad = fill_checked(&k, &cd, &wait("x", inact()), &ctx_of([("x", Formula::Bot)]), System::Cp0);
        assert!(matches!(bad, Err(TypeError::TypeMismatch(_))));

        let km = TypedContext::Mix(Box::new(TypedContext::Hole), close("x"));
        let e = check_context(&km, &ctx_of([("y", f1())]), &ctx_of([("y", f1()), ("x", Formula::Bot)]), System::Cp02);
        assert!(e.is_err());
    }
}
