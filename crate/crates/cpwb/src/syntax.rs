//! Formulas, intuitionistic formulas and CP process terms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Name {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The name with a trailing `'`. Injective, and never equal to an unprimed name.
    pub fn primed(&self) -> Name {
        Name::new(&format!("{}'", self.0))
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Name {
        Name::new(s)
    }
}

/// Deterministic supply of names avoiding a reserved set.
#[derive(Clone, Debug)]
pub struct Fresh {
    prefix: String,
    next: usize,
    avoid: BTreeSet<Name>,
}

impl Fresh {
    pub fn new(prefix: &str) -> Fresh {
        Fresh { prefix: prefix.to_string(), next: 0, avoid: BTreeSet::new() }
    }

    pub fn avoiding<I: IntoIterator<Item = Name>>(prefix: &str, avoid: I) -> Fresh {
        Fresh { prefix: prefix.to_string(), next: 0, avoid: avoid.into_iter().collect() }
    }

    pub fn reserve(&mut self, n: &Name) {
        self.avoid.insert(n.clone());
    }

    pub fn name(&mut self) -> Name {
        loop {
            let n = Name::new(&format!("{}{}", self.prefix, self.next));
            self.next += 1;
            if !self.avoid.contains(&n) {
                self.avoid.insert(n.clone());
                return n;
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Formula {
    One,
    Bot,
    Tensor(Box<Formula>, Box<Formula>),
    Par(Box<Formula>, Box<Formula>),
    Plus(Box<Formula>, Box<Formula>),
    With(Box<Formula>, Box<Formula>),
    OfCourse(Box<Formula>),
    WhyNot(Box<Formula>),
}

impl Formula {
    pub fn tensor(a: Formula, b: Formula) -> Formula {
        Formula::Tensor(Box::new(a), Box::new(b))
    }
    pub fn par(a: Formula, b: Formula) -> Formula {
        Formula::Par(Box::new(a), Box::new(b))
    }
    pub fn plus(a: Formula, b: Formula) -> Formula {
        Formula::Plus(Box::new(a), Box::new(b))
    }
    pub fn with(a: Formula, b: Formula) -> Formula {
        Formula::With(Box::new(a), Box::new(b))
    }
    pub fn of_course(a: Formula) -> Formula {
        Formula::OfCourse(Box::new(a))
    }
    pub fn why_not(a: Formula) -> Formula {
        Formula::WhyNot(Box::new(a))
    }

    pub fn dual(&self) -> Formula {
        dual(self)
    }

    pub fn depth(&self) -> usize {
        use Formula::*;
        match self {
            One | Bot => 0,
            Tensor(a, b) | Par(a, b) | Plus(a, b) | With(a, b) => 1 + a.depth().max(b.depth()),
            OfCourse(a) | WhyNot(a) => 1 + a.depth(),
        }
    }

    pub fn has_exponentials(&self) -> bool {
        use Formula::*;
        match self {
            One | Bot => false,
            Tensor(a, b) | Par(a, b) | Plus(a, b) | With(a, b) => {
                a.has_exponentials() || b.has_exponentials()
            }
            OfCourse(_) | WhyNot(_) => true,
        }
    }

    pub fn is_why_not(&self) -> bool {
        matches!(self, Formula::WhyNot(_))
    }
}

pub fn dual(a: &Formula) -> Formula {
    use Formula::*;
    match a {
        One => Bot,
        Bot => One,
        Tensor(a, b) => Formula::par(dual(a), dual(b)),
        Par(a, b) => Formula::tensor(dual(a), dual(b)),
        Plus(a, b) => Formula::with(dual(a), dual(b)),
        With(a, b) => Formula::plus(dual(a), dual(b)),
        OfCourse(a) => Formula::why_not(dual(a)),
        WhyNot(a) => Formula::of_course(dual(a)),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Formula::*;
        match self {
            One => write!(f, "1"),
            Bot => write!(f, "bot"),
            Tensor(a, b) => write!(f, "({} * {})", a, b),
            Par(a, b) => write!(f, "({} % {})", a, b),
            Plus(a, b) => write!(f, "({} + {})", a, b),
            With(a, b) => write!(f, "({} & {})", a, b),
            OfCourse(a) => write!(f, "!{}", a),
            WhyNot(a) => write!(f, "?{}", a),
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum IllFormula {
    One,
    Tensor(Box<IllFormula>, Box<IllFormula>),
    Lollipop(Box<IllFormula>, Box<IllFormula>),
    Plus(Box<IllFormula>, Box<IllFormula>),
    With(Box<IllFormula>, Box<IllFormula>),
    OfCourse(Box<IllFormula>),
}

impl IllFormula {
    pub fn tensor(a: IllFormula, b: IllFormula) -> IllFormula {
        IllFormula::Tensor(Box::new(a), Box::new(b))
    }
    pub fn lolli(a: IllFormula, b: IllFormula) -> IllFormula {
        IllFormula::Lollipop(Box::new(a), Box::new(b))
    }
    pub fn plus(a: IllFormula, b: IllFormula) -> IllFormula {
        IllFormula::Plus(Box::new(a), Box::new(b))
    }
    pub fn with(a: IllFormula, b: IllFormula) -> IllFormula {
        IllFormula::With(Box::new(a), Box::new(b))
    }
    pub fn of_course(a: IllFormula) -> IllFormula {
        IllFormula::OfCourse(Box::new(a))
    }
}

impl fmt::Display for IllFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use IllFormula::*;
        match self {
            One => write!(f, "1"),
            Tensor(a, b) => write!(f, "({} * {})", a, b),
            Lollipop(a, b) => write!(f, "({} -o {})", a, b),
            Plus(a, b) => write!(f, "({} + {})", a, b),
            With(a, b) => write!(f, "({} & {})", a, b),
            OfCourse(a) => write!(f, "!{}", a),
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Process {
    Inact,
    /// `new x:A (P | Q)`; `P` uses `x` at `A`.
    Cut(Name, Formula, Box<Process>, Box<Process>),
    Par(Box<Process>, Box<Process>),
    Fwd(Name, Name),
    /// `Out(y, x, P, Q)` is `x[y].(P | Q)`; `y` is bound in `P` only.
    Out(Name, Name, Box<Process>, Box<Process>),
    /// `In(x, y, P)` is `x(y).P`.
    In(Name, Name, Box<Process>),
    Server(Name, Name, Box<Process>),
    Client(Name, Name, Box<Process>),
    Select(Name, u8, Box<Process>),
    Case(Name, Box<Process>, Box<Process>),
    EmptyOut(Name),
    EmptyIn(Name, Box<Process>),
    Weak(Name, Formula, Box<Process>),
    /// `Contract(x, x1, x2, P)`: `x1`, `x2` are bound in `P` and merged into `x`.
    Contract(Name, Name, Name, Box<Process>),
}

/// Smart constructors, mostly used by generators and tests.
pub mod build {
    use super::*;

    fn n(s: &str) -> Name {
        Name::new(s)
    }

    pub fn inact() -> Process {
        Process::Inact
    }
    pub fn cut(x: &str, a: Formula, p: Process, q: Process) -> Process {
        Process::Cut(n(x), a, Box::new(p), Box::new(q))
    }
    pub fn mix(p: Process, q: Process) -> Process {
        Process::Par(Box::new(p), Box::new(q))
    }
    pub fn fwd(x: &str, y: &str) -> Process {
        Process::Fwd(n(x), n(y))
    }
    /// `x[y].(p | q)`
    pub fn out(x: &str, y: &str, p: Process, q: Process) -> Process {
        Process::Out(n(y), n(x), Box::new(p), Box::new(q))
    }
    pub fn inp(x: &str, y: &str, p: Process) -> Process {
        Process::In(n(x), n(y), Box::new(p))
    }
    pub fn server(x: &str, y: &str, p: Process) -> Process {
        Process::Server(n(x), n(y), Box::new(p))
    }
    pub fn client(x: &str, y: &str, p: Process) -> Process {
        Process::Client(n(x), n(y), Box::new(p))
    }
    pub fn select(x: &str, i: u8, p: Process) -> Process {
        Process::Select(n(x), i, Box::new(p))
    }
    pub fn case(x: &str, p: Process, q: Process) -> Process {
        Process::Case(n(x), Box::new(p), Box::new(q))
    }
    pub fn close(x: &str) -> Process {
        Process::EmptyOut(n(x))
    }
    pub fn wait(x: &str, p: Process) -> Process {
        Process::EmptyIn(n(x), Box::new(p))
    }
    pub fn weak(x: &str, a: Formula, p: Process) -> Process {
        Process::Weak(n(x), a, Box::new(p))
    }
    pub fn contract(x: &str, x1: &str, x2: &str, p: Process) -> Process {
        Process::Contract(n(x), n(x1), n(x2), Box::new(p))
    }
}

impl Process {
    /// Number of constructors.
    pub fn size(&self) -> usize {
        use Process::*;
        match self {
            Inact | Fwd(..) | EmptyOut(_) => 1,
            Cut(_, _, p, q) | Par(p, q) | Out(_, _, p, q) | Case(_, p, q) => 1 + p.size() + q.size(),
            In(_, _, p)
            | Server(_, _, p)
            | Client(_, _, p)
            | Select(_, _, p)
            | EmptyIn(_, p)
            | Weak(_, _, p)
            | Contract(_, _, _, p) => 1 + p.size(),
        }
    }

    pub fn free_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        collect_free(self, &mut out);
        out
    }

    pub fn is_free(&self, x: &Name) -> bool {
        use Process::*;
        match self {
            Inact => false,
            Fwd(a, b) => a == x || b == x,
            EmptyOut(a) => a == x,
            EmptyIn(a, p) => a == x || p.is_free(x),
            Cut(c, _, p, q) => c != x && (p.is_free(x) || q.is_free(x)),
            Par(p, q) => p.is_free(x) || q.is_free(x),
            Out(y, a, p, q) => a == x || (y != x && p.is_free(x)) || q.is_free(x),
            In(a, y, p) | Server(a, y, p) | Client(a, y, p) => a == x || (y != x && p.is_free(x)),
            Select(a, _, p) => a == x || p.is_free(x),
            Case(a, p, q) => a == x || p.is_free(x) || q.is_free(x),
            Weak(a, _, p) => a == x || p.is_free(x),
            Contract(a, a1, a2, p) => a == x || (a1 != x && a2 != x && p.is_free(x)),
        }
    }

    /// Every name occurring anywhere, bound or free.
    pub fn all_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        collect_all(self, &mut out);
        out
    }

    pub fn has_exponentials(&self) -> bool {
        use Process::*;
        match self {
            Inact | Fwd(..) | EmptyOut(_) => false,
            Server(..) | Client(..) | Weak(..) | Contract(..) => true,
            Cut(_, a, p, q) => a.has_exponentials() || p.has_exponentials() || q.has_exponentials(),
            Par(p, q) | Out(_, _, p, q) | Case(_, p, q) => p.has_exponentials() || q.has_exponentials(),
            In(_, _, p) | Select(_, _, p) | EmptyIn(_, p) => p.has_exponentials(),
        }
    }
}

fn collect_free(p: &Process, out: &mut BTreeSet<Name>) {
    use Process::*;
    let without = |p: &Process, bound: &[&Name], out: &mut BTreeSet<Name>| {
        let mut inner = BTreeSet::new();
        collect_free(p, &mut inner);
        for b in bound {
            inner.remove(*b);
        }
        out.extend(inner);
    };
    match p {
        Inact => {}
        Fwd(a, b) => {
            out.insert(a.clone());
            out.insert(b.clone());
        }
        EmptyOut(a) => {
            out.insert(a.clone());
        }
        EmptyIn(a, p) | Select(a, _, p) | Weak(a, _, p) => {
            out.insert(a.clone());
            collect_free(p, out);
        }
        Cut(x, _, p, q) => {
            without(p, &[x], out);
            without(q, &[x], out);
        }
        Par(p, q) => {
            collect_free(p, out);
            collect_free(q, out);
        }
        Out(y, x, p, q) => {
            out.insert(x.clone());
            without(p, &[y], out);
            collect_free(q, out);
        }
        In(x, y, p) | Server(x, y, p) | Client(x, y, p) => {
            without(p, &[y], out);
            out.insert(x.clone());
        }
        Case(x, p, q) => {
            out.insert(x.clone());
            collect_free(p, out);
            collect_free(q, out);
        }
        Contract(x, x1, x2, p) => {
            without(p, &[x1, x2], out);
            out.insert(x.clone());
        }
    }
}

fn collect_all(p: &Process, out: &mut BTreeSet<Name>) {
    use Process::*;
    match p {
        Inact => {}
        Fwd(a, b) => {
            out.insert(a.clone());
            out.insert(b.clone());
        }
        EmptyOut(a) => {
            out.insert(a.clone());
        }
        EmptyIn(a, p) | Select(a, _, p) | Weak(a, _, p) => {
            out.insert(a.clone());
            collect_all(p, out);
        }
        Cut(x, _, p, q) => {
            out.insert(x.clone());
            collect_all(p, out);
            collect_all(q, out);
        }
        Par(p, q) => {
            collect_all(p, out);
            collect_all(q, out);
        }
        Out(y, x, p, q) => {
            out.insert(x.clone());
            out.insert(y.clone());
            collect_all(p, out);
            collect_all(q, out);
        }
        In(x, y, p) | Server(x, y, p) | Client(x, y, p) => {
            out.insert(x.clone());
            out.insert(y.clone());
            collect_all(p, out);
        }
        Case(x, p, q) => {
            out.insert(x.clone());
            collect_all(p, out);
            collect_all(q, out);
        }
        Contract(x, x1, x2, p) => {
            out.insert(x.clone());
            out.insert(x1.clone());
            out.insert(x2.clone());
            collect_all(p, out);
        }
    }
}

/// Simultaneous capture-avoiding renaming of free names.
pub fn rename(p: &Process, map: &BTreeMap<Name, Name>) -> Process {
    let mut avoid: BTreeSet<Name> = p.all_names();
    avoid.extend(map.keys().cloned());
    avoid.extend(map.values().cloned());
    let mut fresh = Fresh::avoiding("r", avoid);
    rename_in(p, map, &mut fresh)
}

/// `P{y/x}`: replace free `x` by `y`.
pub fn substitute(p: &Process, y: &Name, x: &Name) -> Process {
    let mut m = BTreeMap::new();
    m.insert(x.clone(), y.clone());
    rename(p, &m)
}

fn rn(map: &BTreeMap<Name, Name>, x: &Name) -> Name {
    map.get(x).cloned().unwrap_or_else(|| x.clone())
}

// Enter binders `bs` with body `body`: drop shadowed entries and rename any binder
// that would capture an image of the map.
fn under_binders(
    bs: &[&Name],
    bodies: &[&Process],
    map: &BTreeMap<Name, Name>,
    fresh: &mut Fresh,
) -> (Vec<Name>, BTreeMap<Name, Name>) {
    let mut inner = map.clone();
    for b in bs {
        inner.remove(*b);
    }
    // images of names actually free in the bodies
    let mut images = BTreeSet::new();
    for (k, v) in &inner {
        if bodies.iter().any(|p| p.is_free(k)) {
            images.insert(v.clone());
        }
    }
    let mut new_bs = Vec::new();
    for b in bs {
        if images.contains(*b) {
            let nb = fresh.name();
            inner.insert((*b).clone(), nb.clone());
            new_bs.push(nb);
        } else {
            new_bs.push((*b).clone());
        }
    }
    (new_bs, inner)
}

fn rename_in(p: &Process, map: &BTreeMap<Name, Name>, fresh: &mut Fresh) -> Process {
    use Process::*;
    match p {
        Inact => Inact,
        Fwd(a, b) => Fwd(rn(map, a), rn(map, b)),
        EmptyOut(a) => EmptyOut(rn(map, a)),
        EmptyIn(a, q) => EmptyIn(rn(map, a), Box::new(rename_in(q, map, fresh))),
        Select(a, i, q) => Select(rn(map, a), *i, Box::new(rename_in(q, map, fresh))),
        Weak(a, f, q) => Weak(rn(map, a), f.clone(), Box::new(rename_in(q, map, fresh))),
        Par(l, r) => Par(Box::new(rename_in(l, map, fresh)), Box::new(rename_in(r, map, fresh))),
        Case(a, l, r) => Case(
            rn(map, a),
            Box::new(rename_in(l, map, fresh)),
            Box::new(rename_in(r, map, fresh)),
        ),
        Cut(x, f, l, r) => {
            let (bs, inner) = under_binders(&[x], &[l, r], map, fresh);
            Cut(
                bs[0].clone(),
                f.clone(),
                Box::new(rename_in(l, &inner, fresh)),
                Box::new(rename_in(r, &inner, fresh)),
            )
        }
        Out(y, x, l, r) => {
            let (bs, inner) = under_binders(&[y], &[l], map, fresh);
            Out(
                bs[0].clone(),
                rn(map, x),
                Box::new(rename_in(l, &inner, fresh)),
                Box::new(rename_in(r, map, fresh)),
            )
        }
        In(x, y, q) | Server(x, y, q) | Client(x, y, q) => {
            let (bs, inner) = under_binders(&[y], &[q], map, fresh);
            let body = Box::new(rename_in(q, &inner, fresh));
            let x2 = rn(map, x);
            match p {
                In(..) => In(x2, bs[0].clone(), body),
                Server(..) => Server(x2, bs[0].clone(), body),
                _ => Client(x2, bs[0].clone(), body),
            }
        }
        Contract(x, x1, x2, q) => {
            let (bs, inner) = under_binders(&[x1, x2], &[q], map, fresh);
            Contract(rn(map, x), bs[0].clone(), bs[1].clone(), Box::new(rename_in(q, &inner, fresh)))
        }
    }
}

/// Equality up to renaming of bound names.
pub fn alpha_eq(p: &Process, q: &Process) -> bool {
    let mut env = Vec::new();
    alpha(p, q, &mut env)
}

// env: stack of (left binder, right binder), innermost last
fn lookup(env: &[(Name, Name)], a: &Name, b: &Name) -> bool {
    for (l, r) in env.iter().rev() {
        if l == a || r == b {
            return l == a && r == b;
        }
    }
    a == b
}

fn alpha(p: &Process, q: &Process, env: &mut Vec<(Name, Name)>) -> bool {
    use Process::*;
    let bind = |env: &mut Vec<(Name, Name)>, pairs: &[(&Name, &Name)], f: &mut dyn FnMut(&mut Vec<(Name, Name)>) -> bool| {
        let n = env.len();
        for (a, b) in pairs {
            env.push(((*a).clone(), (*b).clone()));
        }
        let r = f(env);
        env.truncate(n);
        r
    };
    match (p, q) {
        (Inact, Inact) => true,
        (Fwd(a, b), Fwd(c, d)) => lookup(env, a, c) && lookup(env, b, d),
        (EmptyOut(a), EmptyOut(b)) => lookup(env, a, b),
        (EmptyIn(a, p1), EmptyIn(b, q1)) => lookup(env, a, b) && alpha(p1, q1, env),
        (Select(a, i, p1), Select(b, j, q1)) => i == j && lookup(env, a, b) && alpha(p1, q1, env),
        (Weak(a, f, p1), Weak(b, g, q1)) => f == g && lookup(env, a, b) && alpha(p1, q1, env),
        (Par(p1, p2), Par(q1, q2)) => alpha(p1, q1, env) && alpha(p2, q2, env),
        (Case(a, p1, p2), Case(b, q1, q2)) => {
            lookup(env, a, b) && alpha(p1, q1, env) && alpha(p2, q2, env)
        }
        (Cut(x, f, p1, p2), Cut(y, g, q1, q2)) => {
            f == g && bind(env, &[(x, y)], &mut |env| alpha(p1, q1, env) && alpha(p2, q2, env))
        }
        (Out(y1, x1, p1, p2), Out(y2, x2, q1, q2)) => {
            lookup(env, x1, x2)
                && alpha(p2, q2, env)
                && bind(env, &[(y1, y2)], &mut |env| alpha(p1, q1, env))
        }
        (In(x1, y1, p1), In(x2, y2, q1))
        | (Server(x1, y1, p1), Server(x2, y2, q1))
        | (Client(x1, y1, p1), Client(x2, y2, q1)) => {
            lookup(env, x1, x2) && bind(env, &[(y1, y2)], &mut |env| alpha(p1, q1, env))
        }
        (Contract(x, a1, a2, p1), Contract(y, b1, b2, q1)) => {
            lookup(env, x, y)
                && (a1 == a2) == (b1 == b2)
                && bind(env, &[(a1, b1), (a2, b2)], &mut |env| alpha(p1, q1, env))
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::build::*;
    use super::*;

    fn n(s: &str) -> Name {
        Name::new(s)
    }

    #[test]
    fn dual_examples() {
        assert_eq!(dual(&Formula::One), Formula::Bot);
        assert_eq!(dual(&Formula::of_course(Formula::One)), Formula::why_not(Formula::Bot));
        let a = Formula::tensor(Formula::plus(Formula::One, Formula::Bot), Formula::of_course(Formula::One));
        assert_eq!(dual(&dual(&a)), a);
    }

    #[test]
    fn substitute_examples() {
        assert_eq!(substitute(&close("x"), &n("y"), &n("x")), close("y"));
        let p = inp("x", "z", fwd("z", "x"));
        assert!(alpha_eq(&substitute(&p, &n("y"), &n("x")), &inp("y", "z", fwd("z", "y"))));
        // binder y must be renamed, so the result still forwards to the outer y
        let p = inp("x", "y", fwd("y", "x"));
        let r = substitute(&p, &n("y"), &n("x"));
        assert!(alpha_eq(&r, &inp("y", "u", fwd("u", "y"))));
        assert!(r.is_free(&n("y")));
    }

    #[test]
    fn free_name_examples() {
        let fv = fwd("x", "y").free_names();
        assert_eq!(fv, [n("x"), n("y")].into_iter().collect());
        assert!(cut("x", Formula::One, close("x"), wait("x", inact())).free_names().is_empty());
        let p = out("x", "y", fwd("y", "a"), fwd("x", "b"));
        assert_eq!(p.free_names(), [n("a"), n("b"), n("x")].into_iter().collect());
        let p = contract("x", "x1", "x2", mix(fwd("x1", "a"), fwd("x2", "b")));
        assert_eq!(p.free_names(), [n("a"), n("b"), n("x")].into_iter().collect());
    }

    #[test]
    fn alpha_examples() {
        assert!(alpha_eq(&inp("x", "y", fwd("y", "x")), &inp("x", "z", fwd("z", "x"))));
        assert!(!alpha_eq(&close("x"), &close("y")));
        assert!(!alpha_eq(&fwd("x", "y"), &fwd("y", "x")));
        // a bound name may not be identified with a free one
        assert!(!alpha_eq(&inp("x", "y", fwd("y", "z")), &inp("x", "z", fwd("z", "z"))));
    }

    #[test]
    fn substitution_under_two_binders() {
        let p = contract("a", "b", "c", mix(fwd("b", "x"), fwd("c", "d")));
        let r = substitute(&p, &n("b"), &n("x"));
        assert_eq!(
            r.free_names(),
            [n("a"), n("b"), n("d")].into_iter().collect::<BTreeSet<_>>()
        );
    }
}
