//! Bounded enumeration of formulas and of well-typed processes.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::syntax::{dual, Formula, Name, Process};
use crate::typing::{Context, System};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Connective {
    One,
    Bot,
    Tensor,
    Par,
    Plus,
    With,
    OfCourse,
    WhyNot,
}

impl Connective {
    pub const ALL: [Connective; 8] = [
        Connective::One,
        Connective::Bot,
        Connective::Tensor,
        Connective::Par,
        Connective::Plus,
        Connective::With,
        Connective::OfCourse,
        Connective::WhyNot,
    ];

    pub const ADDITIVE_MULTIPLICATIVE: [Connective; 6] = [
        Connective::One,
        Connective::Bot,
        Connective::Tensor,
        Connective::Par,
        Connective::Plus,
        Connective::With,
    ];
}

/// All formulas of depth at most `d` over `cs`, without repetition, ordered by depth and then
/// structurally.
pub fn enumerate_formulas(d: usize, cs: &[Connective]) -> Vec<Formula> {
    let has = |c: Connective| cs.contains(&c);
    let mut levels: Vec<Vec<Formula>> = Vec::new();
    let mut leaves = Vec::new();
    if has(Connective::One) {
        leaves.push(Formula::One);
    }
    if has(Connective::Bot) {
        leaves.push(Formula::Bot);
    }
    levels.push(leaves);
    for depth in 1..=d {
        let below: Vec<Formula> = levels.iter().flatten().cloned().collect();
        let prev = &levels[depth - 1];
        let prev_set: BTreeSet<&Formula> = prev.iter().collect();
        let mut next = Vec::new();
        for c in cs {
            match c {
                Connective::Tensor | Connective::Par | Connective::Plus | Connective::With => {
                    for a in &below {
                        for b in &below {
                            if !prev_set.contains(a) && !prev_set.contains(b) {
                                continue;
                            }
                            let f = match c {
                                Connective::Tensor => Formula::tensor(a.clone(), b.clone()),
                                Connective::Par => Formula::par(a.clone(), b.clone()),
                                Connective::Plus => Formula::plus(a.clone(), b.clone()),
                                _ => Formula::with(a.clone(), b.clone()),
                            };
                            next.push(f);
                        }
                    }
                }
                Connective::OfCourse => next.extend(prev.iter().map(|a| Formula::of_course(a.clone()))),
                Connective::WhyNot => next.extend(prev.iter().map(|a| Formula::why_not(a.clone()))),
                _ => {}
            }
        }
        levels.push(next);
    }
    levels.into_iter().flatten().collect()
}

/// Derivation-directed generator of well-typed processes, memoised on (context, size).
pub struct Enumerator {
    pub sys: System,
    /// Formulas tried at each cut; the dual side is derived.
    pub cut_formulas: Vec<Formula>,
    /// Forwarders are emitted in one orientation only, `x < y`.
    pub one_forwarder_orientation: bool,
    memo: HashMap<(Context, usize), Arc<Vec<Process>>>,
}

const NAME_POOL: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];

fn fresh_for(ctx: &Context, extra: &[&Name]) -> Name {
    let taken = |n: &Name| ctx.contains_key(n) || extra.contains(&n);
    for s in NAME_POOL {
        let n = Name::new(s);
        if !taken(&n) {
            return n;
        }
    }
    let mut i = 0;
    loop {
        let n = Name::new(&format!("n{}", i));
        if !taken(&n) {
            return n;
        }
        i += 1;
    }
}

fn without(ctx: &Context, x: &Name) -> Context {
    let mut c = ctx.clone();
    c.remove(x);
    c
}

fn with(ctx: &Context, x: &Name, a: Formula) -> Context {
    let mut c = ctx.clone();
    c.insert(x.clone(), a);
    c
}

/// Every way to split a context in two.
fn splits(ctx: &Context) -> Vec<(Context, Context)> {
    let items: Vec<(&Name, &Formula)> = ctx.iter().collect();
    let n = items.len();
    (0..(1usize << n))
        .map(|mask| {
            let mut l = Context::new();
            let mut r = Context::new();
            for (i, (x, a)) in items.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    l.insert((*x).clone(), (*a).clone());
                } else {
                    r.insert((*x).clone(), (*a).clone());
                }
            }
            (l, r)
        })
        .collect()
}

fn b(p: &Process) -> Box<Process> {
    Box::new(p.clone())
}

impl Enumerator {
    pub fn new(sys: System, cut_formulas: Vec<Formula>) -> Enumerator {
        Enumerator { sys, cut_formulas, one_forwarder_orientation: true, memo: HashMap::new() }
    }

    /// All processes of size at most `s` typed at `ctx`.
    pub fn up_to(&mut self, ctx: &Context, s: usize) -> Vec<Process> {
        (1..=s).flat_map(|n| self.exact(ctx, n).as_ref().clone()).collect()
    }

    /// All processes of exactly `n` constructors typed at `ctx`.
    pub fn exact(&mut self, ctx: &Context, n: usize) -> Arc<Vec<Process>> {
        let key = (ctx.clone(), n);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let v = Arc::new(self.generate(ctx, n));
        self.memo.insert(key, v.clone());
        v
    }

    /// Pairs `(P, Q)` with sizes summing to `n` over the given contexts.
    fn pairs(&mut self, l: &Context, r: &Context, n: usize) -> Vec<(Process, Process)> {
        let mut out = Vec::new();
        for n1 in 1..n {
            let ls = self.exact(l, n1);
            if ls.is_empty() {
                continue;
            }
            let rs = self.exact(r, n - n1);
            for p in ls.iter() {
                for q in rs.iter() {
                    out.push((p.clone(), q.clone()));
                }
            }
        }
        out
    }

    fn generate(&mut self, ctx: &Context, n: usize) -> Vec<Process> {
        let mut out = Vec::new();
        if n == 0 {
            return out;
        }
        if n == 1 {
            if ctx.is_empty() && self.sys.allows_mix0() {
                out.push(Process::Inact);
            }
            if ctx.len() == 1 {
                let (x, a) = ctx.iter().next().unwrap();
                if *a == Formula::One {
                    out.push(Process::EmptyOut(x.clone()));
                }
            }
            if ctx.len() == 2 {
                let mut it = ctx.iter();
                let (x, a) = it.next().unwrap();
                let (y, bb) = it.next().unwrap();
                if *bb == dual(a) {
                    out.push(Process::Fwd(x.clone(), y.clone()));
                    if !self.one_forwarder_orientation {
                        out.push(Process::Fwd(y.clone(), x.clone()));
                    }
                }
            }
            return out;
        }
        let m = n - 1;
        let entries: Vec<(Name, Formula)> = ctx.iter().map(|(x, a)| (x.clone(), a.clone())).collect();
        for (x, a) in &entries {
            let rest = without(ctx, x);
            match a {
                Formula::Bot => {
                    for p in self.exact(&rest, m).iter() {
                        out.push(Process::EmptyIn(x.clone(), b(p)));
                    }
                }
                Formula::Par(l, r) => {
                    let y = fresh_for(ctx, &[]);
                    let c = with(&with(&rest, &y, (**l).clone()), x, (**r).clone());
                    for p in self.exact(&c, m).iter() {
                        out.push(Process::In(x.clone(), y.clone(), b(p)));
                    }
                }
                Formula::Tensor(l, r) => {
                    let y = fresh_for(ctx, &[]);
                    for (g1, g2) in splits(&rest) {
                        let c1 = with(&g1, &y, (**l).clone());
                        let c2 = with(&g2, x, (**r).clone());
                        for (p, q) in self.pairs(&c1, &c2, m) {
                            out.push(Process::Out(y.clone(), x.clone(), Box::new(p), Box::new(q)));
                        }
                    }
                }
                Formula::Plus(l, r) => {
                    for (i, side) in [(1u8, l), (2u8, r)] {
                        let c = with(&rest, x, (**side).clone());
                        for p in self.exact(&c, m).iter() {
                            out.push(Process::Select(x.clone(), i, b(p)));
                        }
                    }
                }
                Formula::With(l, r) => {
                    let c1 = with(&rest, x, (**l).clone());
                    let c2 = with(&rest, x, (**r).clone());
                    for (p, q) in self.pairs(&c1, &c2, m) {
                        out.push(Process::Case(x.clone(), Box::new(p), Box::new(q)));
                    }
                }
                Formula::OfCourse(c) => {
                    if rest.values().all(|f| f.is_why_not()) {
                        let y = fresh_for(ctx, &[]);
                        let cc = with(&rest, &y, (**c).clone());
                        for p in self.exact(&cc, m).iter() {
                            out.push(Process::Server(x.clone(), y.clone(), b(p)));
                        }
                    }
                }
                Formula::WhyNot(c) => {
                    let y = fresh_for(ctx, &[]);
                    let cc = with(&rest, &y, (**c).clone());
                    for p in self.exact(&cc, m).iter() {
                        out.push(Process::Client(x.clone(), y.clone(), b(p)));
                    }
                    for p in self.exact(&rest, m).iter() {
                        out.push(Process::Weak(x.clone(), a.clone(), b(p)));
                    }
                    let x1 = fresh_for(ctx, &[]);
                    let x2 = fresh_for(ctx, &[&x1]);
                    let cc = with(&with(&rest, &x1, a.clone()), &x2, a.clone());
                    for p in self.exact(&cc, m).iter() {
                        out.push(Process::Contract(x.clone(), x1.clone(), x2.clone(), b(p)));
                    }
                }
                Formula::One => {}
            }
        }
        let cut_formulas = self.cut_formulas.clone();
        if !cut_formulas.is_empty() {
            let y = fresh_for(ctx, &[]);
            for (g1, g2) in splits(ctx) {
                for a in &cut_formulas {
                    let c1 = with(&g1, &y, a.clone());
                    let c2 = with(&g2, &y, dual(a));
                    for (p, q) in self.pairs(&c1, &c2, m) {
                        out.push(Process::Cut(y.clone(), a.clone(), Box::new(p), Box::new(q)));
                    }
                }
            }
        }
        if self.sys.allows_mix2() {
            for (g1, g2) in splits(ctx) {
                for (p, q) in self.pairs(&g1, &g2, m) {
                    out.push(Process::Par(Box::new(p), Box::new(q)));
                }
            }
        }
        out
    }
}

/// Convenience wrapper: all processes of size at most `s` at `ctx`, with unit cut formulas.
pub fn enumerate_processes(ctx: &Context, s: usize, sys: System) -> Vec<Process> {
    Enumerator::new(sys, vec![Formula::One, Formula::Bot]).up_to(ctx, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::build::*;
    use crate::typing::{check, ctx_of};

    #[test]
    fn formula_counts() {
        let units = [Connective::One, Connective::Bot];
        assert_eq!(enumerate_formulas(0, &units), vec![Formula::One, Formula::Bot]);
        let fs = enumerate_formulas(1, &[Connective::One, Connective::Bot, Connective::Tensor]);
        assert!(fs.contains(&Formula::tensor(Formula::One, Formula::Bot)));
        assert_eq!(enumerate_formulas(1, &Connective::ADDITIVE_MULTIPLICATIVE).len(), 18);
        let all2 = enumerate_formulas(2, &Connective::ALL);
        assert_eq!(all2.len(), 1982);
        let set: BTreeSet<&Formula> = all2.iter().collect();
        assert_eq!(set.len(), all2.len());
        assert!(all2.iter().all(|f| f.depth() <= 2));
    }

    #[test]
    fn process_examples() {
        assert_eq!(enumerate_processes(&ctx_of([("x", Formula::One)]), 1, System::Cp), vec![close("x")]);
        let ps = enumerate_processes(&ctx_of([("x", Formula::plus(Formula::One, Formula::One))]), 2, System::Cp);
        assert_eq!(ps, vec![select("x", 1, close("x")), select("x", 2, close("x"))]);
        let ps = enumerate_processes(&ctx_of([("x", Formula::One), ("y", Formula::Bot)]), 1, System::Cp);
        assert!(ps.contains(&fwd("x", "y")));
    }

    #[test]
    fn emitted_processes_check() {
        let ctxs = [
            ctx_of([("x", Formula::par(Formula::Bot, Formula::One))]),
            ctx_of([("x", Formula::with(Formula::One, Formula::One)), ("y", Formula::Bot)]),
            ctx_of([("x", Formula::why_not(Formula::Bot)), ("y", Formula::of_course(Formula::One))]),
            Context::new(),
        ];
        for sys in [System::Cp, System::Cp0, System::Cp02] {
            for c in &ctxs {
                let ps = enumerate_processes(c, 5, sys);
                for p in &ps {
                    let d = check(p, c, sys).unwrap_or_else(|e| panic!("{:?}: {}", p, e));
                    assert_eq!(d.size(), p.size());
                    assert!(p.size() <= 5);
                }
            }
        }
    }

    #[test]
    fn deterministic() {
        let c = ctx_of([("x", Formula::tensor(Formula::One, Formula::One))]);
        assert_eq!(enumerate_processes(&c, 5, System::Cp02), enumerate_processes(&c, 5, System::Cp02));
    }
}
