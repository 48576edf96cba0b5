//! Configurations and the big-step observation relation.
//!
//! A closed configuration is flattened into a soup of components joined by link names.
//! Flattening realises the structural congruence (cut commutativity, reassociation of
//! independent cuts, associativity and commutativity of parallel). The observation search
//! then fires interaction rules between two components sharing a link, in every order.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::denotations::{bag_union, denote_set, join, product, ObsTuple, Observation};
use crate::syntax::{dual, rename, Formula, Name, Process};
use crate::typing::{check, show_ctx, Context, Derivation, System, TypeError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Configuration {
    Zero,
    Proc(Derivation),
    /// `C1 ⋈x C2` with `x` observable at the annotated type on the `C1` side.
    Cut(Name, Formula, Box<Configuration>, Box<Configuration>),
    Par(Box<Configuration>, Box<Configuration>),
    Weak(Name, Formula, Box<Configuration>),
    /// `C{x1/x2}`: `x2` is merged into `x1`.
    Con(Name, Name, Box<Configuration>),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("cut on {0}: endpoints are not dual")]
    CutTypeMismatch(Name),
    #[error("name {0} occurs twice among free and observable names")]
    NameClash(Name),
    #[error("configuration is open: {0}")]
    OpenConfiguration(String),
    #[error("observation search exceeded depth {depth}; {} partial results", partial.len())]
    DepthExceeded { depth: usize, partial: BTreeSet<ObsTuple> },
    #[error("configuration has no processes to infer the type of {0}")]
    Untypable(Name),
}

fn disjoint_union(a: &Context, b: &Context) -> Result<Context, ConfigError> {
    let mut out = a.clone();
    for (x, f) in b {
        if out.insert(x.clone(), f.clone()).is_some() {
            return Err(ConfigError::NameClash(x.clone()));
        }
    }
    Ok(out)
}

/// Free names `Γ` and observable names `Θ`.
pub fn check_config(c: &Configuration, sys: System) -> Result<(Context, Context), ConfigError> {
    let (g, t) = match c {
        Configuration::Zero => (Context::new(), Context::new()),
        Configuration::Proc(d) => {
            // re-check so that hand-built derivations are validated
            let d2 = check(&d.process(), &d.ctx, sys)?;
            (d2.ctx, Context::new())
        }
        Configuration::Cut(x, a, c1, c2) => {
            let (mut g1, t1) = check_config(c1, sys)?;
            let (mut g2, t2) = check_config(c2, sys)?;
            match (g1.remove(x), g2.remove(x)) {
                (Some(a1), Some(a2)) if a1 == *a && a2 == dual(a) => {}
                (Some(_), Some(_)) => return Err(ConfigError::CutTypeMismatch(x.clone())),
                _ => return Err(ConfigError::Type(TypeError::UnboundName(x.clone()))),
            }
            let g = disjoint_union(&g1, &g2)?;
            let mut t = disjoint_union(&t1, &t2)?;
            if t.insert(x.clone(), a.clone()).is_some() {
                return Err(ConfigError::NameClash(x.clone()));
            }
            (g, t)
        }
        Configuration::Par(c1, c2) => {
            if !sys.allows_mix2() {
                return Err(TypeError::SystemViolation("configuration parallel".into(), sys).into());
            }
            let (g1, t1) = check_config(c1, sys)?;
            let (g2, t2) = check_config(c2, sys)?;
            (disjoint_union(&g1, &g2)?, disjoint_union(&t1, &t2)?)
        }
        Configuration::Weak(x, a, c) => {
            if !a.is_why_not() {
                return Err(TypeError::RuleMismatch(format!("configuration weakening of {} at {}", x, a)).into());
            }
            let (mut g, t) = check_config(c, sys)?;
            if g.insert(x.clone(), a.clone()).is_some() {
                return Err(ConfigError::NameClash(x.clone()));
            }
            (g, t)
        }
        Configuration::Con(x1, x2, c) => {
            let (mut g, t) = check_config(c, sys)?;
            let a1 = g.get(x1).cloned().ok_or_else(|| TypeError::UnboundName(x1.clone()))?;
            let a2 = g.remove(x2).ok_or_else(|| TypeError::UnboundName(x2.clone()))?;
            if a1 != a2 || !a1.is_why_not() || x1 == x2 {
                return Err(TypeError::RuleMismatch(format!("configuration contraction of {} and {}", x1, x2)).into());
            }
            (g, t)
        }
    };
    for x in g.keys() {
        if t.contains_key(x) {
            return Err(ConfigError::NameClash(x.clone()));
        }
    }
    Ok((g, t))
}

/// Denotation of a configuration: process clauses, with cuts keeping their coordinate.
pub fn config_denotation(c: &Configuration, k: usize) -> BTreeSet<ObsTuple> {
    match c {
        Configuration::Zero => [ObsTuple::new()].into_iter().collect(),
        Configuration::Proc(d) => denote_set(d, k),
        Configuration::Cut(x, _, c1, c2) => join(&config_denotation(c1, k), &config_denotation(c2, k), x, true),
        Configuration::Par(c1, c2) => product(&config_denotation(c1, k), &config_denotation(c2, k)),
        Configuration::Weak(x, _, c) => config_denotation(c, k)
            .into_iter()
            .map(|mut t| {
                t.insert(x.clone(), Observation::Bag(vec![]));
                t
            })
            .collect(),
        Configuration::Con(x1, x2, c) => config_denotation(c, k)
            .into_iter()
            .filter_map(|mut t| {
                let a = t.remove(x1)?;
                let b = t.remove(x2)?;
                let u = bag_union(&a, &b);
                if u.max_bag() > k {
                    return None;
                }
                t.insert(x1.clone(), u);
                Some(t)
            })
            .collect(),
    }
}

/// Configuration written without typing contexts; types flow down from cut annotations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawConfig {
    Zero,
    Proc(Process),
    Cut(Name, Formula, Box<RawConfig>, Box<RawConfig>),
    Par(Box<RawConfig>, Box<RawConfig>),
    Weak(Name, Formula, Box<RawConfig>),
    Con(Name, Name, Box<RawConfig>),
}

impl RawConfig {
    fn free_names(&self) -> BTreeSet<Name> {
        match self {
            RawConfig::Zero => BTreeSet::new(),
            RawConfig::Proc(p) => p.free_names(),
            RawConfig::Cut(x, _, a, b) => {
                let mut s = a.free_names();
                s.extend(b.free_names());
                s.remove(x);
                s
            }
            RawConfig::Par(a, b) => {
                let mut s = a.free_names();
                s.extend(b.free_names());
                s
            }
            RawConfig::Weak(x, _, c) => {
                let mut s = c.free_names();
                s.insert(x.clone());
                s
            }
            RawConfig::Con(x1, x2, c) => {
                let mut s = c.free_names();
                s.remove(x2);
                s.insert(x1.clone());
                s
            }
        }
    }

    /// Attach typing derivations, given the types of the free names.
    pub fn resolve(&self, env: &Context, sys: System) -> Result<Configuration, ConfigError> {
        let restrict = |c: &RawConfig| -> Context {
            let fv = c.free_names();
            env.iter().filter(|(x, _)| fv.contains(*x)).map(|(x, a)| (x.clone(), a.clone())).collect()
        };
        Ok(match self {
            RawConfig::Zero => Configuration::Zero,
            RawConfig::Proc(p) => Configuration::Proc(check(p, env, sys)?),
            RawConfig::Cut(x, a, c1, c2) => {
                let mut e1 = restrict(c1);
                e1.insert(x.clone(), a.clone());
                let mut e2 = restrict(c2);
                e2.insert(x.clone(), dual(a));
                Configuration::Cut(x.clone(), a.clone(), Box::new(c1.resolve(&e1, sys)?), Box::new(c2.resolve(&e2, sys)?))
            }
            RawConfig::Par(c1, c2) => {
                Configuration::Par(Box::new(c1.resolve(&restrict(c1), sys)?), Box::new(c2.resolve(&restrict(c2), sys)?))
            }
            RawConfig::Weak(x, a, c) => {
                let mut e = env.clone();
                e.remove(x);
                Configuration::Weak(x.clone(), a.clone(), Box::new(c.resolve(&e, sys)?))
            }
            RawConfig::Con(x1, x2, c) => {
                let a = env.get(x1).cloned().ok_or_else(|| ConfigError::Untypable(x1.clone()))?;
                let mut e = env.clone();
                e.insert(x2.clone(), a);
                Configuration::Con(x1.clone(), x2.clone(), Box::new(c.resolve(&e, sys)?))
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Comp {
    Proc(Process),
    WeakEnd(Name),
    ConEnd { out: Name, a: Name, b: Name },
}

impl Comp {
    fn has(&self, l: &Name) -> bool {
        match self {
            Comp::Proc(p) => p.is_free(l),
            Comp::WeakEnd(x) => x == l,
            Comp::ConEnd { out, a, b } => out == l || a == l || b == l,
        }
    }

    fn rename(&self, from: &Name, to: &Name) -> Comp {
        let r = |x: &Name| if x == from { to.clone() } else { x.clone() };
        match self {
            Comp::Proc(p) => {
                let mut m = BTreeMap::new();
                m.insert(from.clone(), to.clone());
                Comp::Proc(rename(p, &m))
            }
            Comp::WeakEnd(x) => Comp::WeakEnd(r(x)),
            Comp::ConEnd { out, a, b } => Comp::ConEnd { out: r(out), a: r(a), b: r(b) },
        }
    }
}

#[derive(Clone, Debug)]
enum Recipe {
    Star,
    Pair(Name, Name),
    Tag(u8, Name),
    Bag(Vec<Name>),
    Union(Name, Name),
    Alias(Name),
}

#[derive(Clone, Debug)]
struct State {
    comps: Vec<Comp>,
    recipes: BTreeMap<Name, Recipe>,
    next: usize,
    steps: usize,
}

impl State {
    fn fresh(&mut self) -> Name {
        let n = Name::new(&format!("%{}", self.next));
        self.next += 1;
        n
    }

    fn rename_proc(p: &Process, pairs: &[(&Name, &Name)]) -> Process {
        let m: BTreeMap<Name, Name> = pairs.iter().map(|(a, b)| ((*a).clone(), (*b).clone())).collect();
        rename(p, &m)
    }

    /// Structural steps: 0, Mix, Comm, and surfacing weakening/contraction markers.
    fn push(&mut self, c: Comp) {
        let mut work = vec![c];
        while let Some(c) = work.pop() {
            match c {
                Comp::Proc(Process::Inact) => {}
                Comp::Proc(Process::Par(p, q)) => {
                    work.push(Comp::Proc(*p));
                    work.push(Comp::Proc(*q));
                }
                Comp::Proc(Process::Cut(x, _, p, q)) => {
                    self.steps += 1;
                    let l = self.fresh();
                    work.push(Comp::Proc(Self::rename_proc(&p, &[(&x, &l)])));
                    work.push(Comp::Proc(Self::rename_proc(&q, &[(&x, &l)])));
                }
                Comp::Proc(Process::Weak(x, _, p)) => {
                    work.push(Comp::WeakEnd(x));
                    work.push(Comp::Proc(*p));
                }
                Comp::Proc(Process::Contract(x, x1, x2, p)) => {
                    let a = self.fresh();
                    let b = self.fresh();
                    work.push(Comp::ConEnd { out: x, a: a.clone(), b: b.clone() });
                    work.push(Comp::Proc(Self::rename_proc(&p, &[(&x1, &a), (&x2, &b)])));
                }
                other => self.comps.push(other),
            }
        }
    }
}

/// The redex found between components `i` and `j` on link `l`.
#[derive(Clone, Debug)]
struct Redex {
    i: usize,
    j: usize,
    l: Name,
}

fn subject(c: &Comp) -> Vec<Name> {
    match c {
        Comp::Proc(p) => match p {
            Process::Fwd(a, b) => vec![a.clone(), b.clone()],
            Process::Out(_, x, _, _)
            | Process::In(x, _, _)
            | Process::EmptyOut(x)
            | Process::EmptyIn(x, _)
            | Process::Select(x, _, _)
            | Process::Case(x, _, _)
            | Process::Server(x, _, _)
            | Process::Client(x, _, _) => vec![x.clone()],
            _ => vec![],
        },
        Comp::WeakEnd(x) => vec![x.clone()],
        Comp::ConEnd { out, .. } => vec![out.clone()],
    }
}

fn ready_pair(a: &Comp, b: &Comp, l: &Name) -> bool {
    use Process::*;
    match (a, b) {
        (Comp::Proc(Fwd(..)), _) => true,
        (Comp::Proc(Out(..)), Comp::Proc(In(..)))
        | (Comp::Proc(EmptyOut(_)), Comp::Proc(EmptyIn(..)))
        | (Comp::Proc(Select(..)), Comp::Proc(Case(..)))
        | (Comp::Proc(Server(..)), Comp::Proc(Client(..)))
        | (Comp::Proc(Server(..)), Comp::WeakEnd(_)) => subject(b).contains(l),
        (Comp::Proc(Server(..)), Comp::ConEnd { out, .. }) => out == l,
        _ => false,
    }
}

fn redexes(s: &State) -> Vec<Redex> {
    let mut out = Vec::new();
    for (i, a) in s.comps.iter().enumerate() {
        for l in subject(a) {
            for (j, b) in s.comps.iter().enumerate() {
                if i != j && b.has(&l) && ready_pair(a, b, &l) {
                    out.push(Redex { i, j, l: l.clone() });
                }
            }
        }
    }
    out
}

fn fire(s: &State, r: &Redex) -> State {
    use Process::*;
    let mut n = s.clone();
    n.steps += 1;
    let a = s.comps[r.i].clone();
    let b = s.comps[r.j].clone();
    let (hi, lo) = if r.i > r.j { (r.i, r.j) } else { (r.j, r.i) };
    n.comps.remove(hi);
    n.comps.remove(lo);
    let l = &r.l;
    match (a, b) {
        (Comp::Proc(Fwd(x, y)), other) => {
            // Link: the partner takes over the far end of the forwarder
            let far = if &x == l { y } else { x };
            n.recipes.insert(l.clone(), Recipe::Alias(far.clone()));
            n.push(other.rename(l, &far));
        }
        (Comp::Proc(Out(y, _, p, q)), Comp::Proc(In(_, y2, rr))) => {
            let ya = n.fresh();
            let xb = n.fresh();
            n.recipes.insert(l.clone(), Recipe::Pair(ya.clone(), xb.clone()));
            n.push(Comp::Proc(State::rename_proc(&p, &[(&y, &ya)])));
            n.push(Comp::Proc(State::rename_proc(&q, &[(l, &xb)])));
            n.push(Comp::Proc(State::rename_proc(&rr, &[(&y2, &ya), (l, &xb)])));
        }
        (Comp::Proc(EmptyOut(_)), Comp::Proc(EmptyIn(_, p))) => {
            n.recipes.insert(l.clone(), Recipe::Star);
            n.push(Comp::Proc(*p));
        }
        (Comp::Proc(Select(_, i, p)), Comp::Proc(Case(_, q1, q2))) => {
            let xb = n.fresh();
            n.recipes.insert(l.clone(), Recipe::Tag(i, xb.clone()));
            let q = if i == 1 { q1 } else { q2 };
            n.push(Comp::Proc(State::rename_proc(&p, &[(l, &xb)])));
            n.push(Comp::Proc(State::rename_proc(&q, &[(l, &xb)])));
        }
        (Comp::Proc(Server(_, y, p)), Comp::Proc(Client(_, y2, q))) => {
            let ya = n.fresh();
            n.recipes.insert(l.clone(), Recipe::Bag(vec![ya.clone()]));
            n.push(Comp::Proc(State::rename_proc(&p, &[(&y, &ya)])));
            n.push(Comp::Proc(State::rename_proc(&q, &[(&y2, &ya)])));
        }
        (Comp::Proc(srv @ Server(..)), Comp::WeakEnd(_)) => {
            n.recipes.insert(l.clone(), Recipe::Bag(vec![]));
            for g in srv.free_names() {
                if &g != l {
                    n.push(Comp::WeakEnd(g));
                }
            }
        }
        (Comp::Proc(Server(_, y, p)), Comp::ConEnd { a, b, .. }) => {
            n.recipes.insert(l.clone(), Recipe::Union(a.clone(), b.clone()));
            let srv = Server(l.clone(), y.clone(), p.clone());
            let ctx: Vec<Name> = srv.free_names().into_iter().filter(|g| g != l).collect();
            let mut left = Vec::new();
            let mut right = Vec::new();
            for g in &ctx {
                let ga = n.fresh();
                let gb = n.fresh();
                n.push(Comp::ConEnd { out: g.clone(), a: ga.clone(), b: gb.clone() });
                left.push((g.clone(), ga));
                right.push((g.clone(), gb));
            }
            let mk = |target: &Name, subst: &[(Name, Name)]| -> Process {
                let pairs: Vec<(&Name, &Name)> = subst.iter().map(|(x, y)| (x, y)).collect();
                let body = State::rename_proc(&p, &pairs);
                Server(target.clone(), y.clone(), Box::new(body))
            };
            n.push(Comp::Proc(mk(&a, &left)));
            n.push(Comp::Proc(mk(&b, &right)));
        }
        _ => unreachable!("not a redex"),
    }
    n
}

fn eval(recipes: &BTreeMap<Name, Recipe>, l: &Name) -> Option<Observation> {
    Some(match recipes.get(l)? {
        Recipe::Star => Observation::Star,
        Recipe::Pair(a, b) => Observation::pair(eval(recipes, a)?, eval(recipes, b)?),
        Recipe::Tag(i, a) => Observation::tag(*i, eval(recipes, a)?),
        Recipe::Bag(xs) => Observation::bag(xs.iter().map(|x| eval(recipes, x)).collect::<Option<Vec<_>>>()?),
        Recipe::Union(a, b) => bag_union(&eval(recipes, a)?, &eval(recipes, b)?),
        Recipe::Alias(a) => eval(recipes, a)?,
    })
}

/// All `θ` with `C ⇓ θ`. Every interleaving of enabled rules is explored; `depth` bounds the
/// number of rule applications along one path. Observations with a bag above `k` are dropped.
pub fn observe(c: &Configuration, k: usize, depth: usize) -> Result<BTreeSet<ObsTuple>, ConfigError> {
    let (g, theta) = check_config(c, System::Cp02)?;
    if !g.is_empty() {
        return Err(ConfigError::OpenConfiguration(show_ctx(&g)));
    }
    let mut st = State { comps: vec![], recipes: BTreeMap::new(), next: 0, steps: 0 };
    let mut observable: BTreeMap<Name, Name> = BTreeMap::new();
    flatten(c, &BTreeMap::new(), &mut st, &mut observable);

    let mut results = BTreeSet::new();
    let mut exceeded = false;
    let mut stack = vec![st];
    while let Some(s) = stack.pop() {
        if s.steps > depth {
            exceeded = true;
            continue;
        }
        let rs = redexes(&s);
        if rs.is_empty() {
            if s.comps.is_empty() {
                let mut t = ObsTuple::new();
                let mut ok = true;
                for (x, l) in &observable {
                    match eval(&s.recipes, l) {
                        Some(o) => {
                            t.insert(x.clone(), o);
                        }
                        None => ok = false,
                    }
                }
                if ok && t.len() == theta.len() && t.values().all(|o| o.max_bag() <= k) {
                    results.insert(t);
                }
            }
            continue;
        }
        // independent redexes commute; exploring all of them witnesses confluence
        for r in rs.iter().rev() {
            stack.push(fire(&s, r));
        }
    }
    if exceeded {
        return Err(ConfigError::DepthExceeded { depth, partial: results });
    }
    Ok(results)
}

/// Like [`observe`] but fires only the first enabled redex at each step.
pub fn observe_first(c: &Configuration, k: usize, depth: usize) -> Result<BTreeSet<ObsTuple>, ConfigError> {
    let (g, theta) = check_config(c, System::Cp02)?;
    if !g.is_empty() {
        return Err(ConfigError::OpenConfiguration(show_ctx(&g)));
    }
    let mut s = State { comps: vec![], recipes: BTreeMap::new(), next: 0, steps: 0 };
    let mut observable: BTreeMap<Name, Name> = BTreeMap::new();
    flatten(c, &BTreeMap::new(), &mut s, &mut observable);
    loop {
        if s.steps > depth {
            return Err(ConfigError::DepthExceeded { depth, partial: BTreeSet::new() });
        }
        let rs = redexes(&s);
        match rs.first() {
            Some(r) => s = fire(&s, r),
            None => break,
        }
    }
    let mut out = BTreeSet::new();
    if s.comps.is_empty() {
        let t: Option<ObsTuple> = observable.iter().map(|(x, l)| eval(&s.recipes, l).map(|o| (x.clone(), o))).collect();
        if let Some(t) = t {
            if t.len() == theta.len() && t.values().all(|o| o.max_bag() <= k) {
                out.insert(t);
            }
        }
    }
    Ok(out)
}

fn flatten(c: &Configuration, links: &BTreeMap<Name, Name>, st: &mut State, observable: &mut BTreeMap<Name, Name>) {
    match c {
        Configuration::Zero => {}
        Configuration::Proc(d) => {
            let p = rename(&d.process(), links);
            st.push(Comp::Proc(p));
        }
        Configuration::Cut(x, _, c1, c2) => {
            let l = st.fresh();
            observable.insert(x.clone(), l.clone());
            let mut inner = links.clone();
            inner.insert(x.clone(), l);
            flatten(c1, &inner, st, observable);
            flatten(c2, &inner, st, observable);
        }
        Configuration::Par(c1, c2) => {
            flatten(c1, links, st, observable);
            flatten(c2, links, st, observable);
        }
        Configuration::Weak(x, _, c) => {
            let l = links.get(x).cloned().unwrap_or_else(|| x.clone());
            st.push(Comp::WeakEnd(l));
            flatten(c, links, st, observable);
        }
        Configuration::Con(x1, x2, c) => {
            let out = links.get(x1).cloned().unwrap_or_else(|| x1.clone());
            let a = st.fresh();
            let b = st.fresh();
            st.push(Comp::ConEnd { out, a: a.clone(), b: b.clone() });
            let mut inner = links.clone();
            inner.insert(x1.clone(), a);
            inner.insert(x2.clone(), b);
            flatten(c, &inner, st, observable);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdequacyVerdict {
    pub holds: bool,
    pub observed: BTreeSet<ObsTuple>,
    pub denoted: BTreeSet<ObsTuple>,
}

/// Compare the observation set with the configuration denotation.
pub fn adequacy_check(c: &Configuration, k: usize, depth: usize) -> Result<AdequacyVerdict, ConfigError> {
    let observed = observe(c, k, depth)?;
    let denoted = config_denotation(c, k);
    Ok(AdequacyVerdict { holds: observed == denoted, observed, denoted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::build::*;
    use crate::typing::ctx_of;

    fn proc_cfg(p: Process, c: Context) -> Configuration {
        Configuration::Proc(check(&p, &c, System::Cp02).unwrap())
    }

    fn one_bot_cut() -> Configuration {
        Configuration::Cut(
            Name::new("x"),
            Formula::One,
            Box::new(proc_cfg(close("x"), ctx_of([("x", Formula::One)]))),
            Box::new(proc_cfg(wait("x", inact()), ctx_of([("x", Formula::Bot)]))),
        )
    }

    #[test]
    fn zero_observes_empty_tuple() {
        let r = observe(&Configuration::Zero, 2, 100).unwrap();
        assert_eq!(r, [ObsTuple::new()].into_iter().collect());
        assert!(adequacy_check(&Configuration::Zero, 2, 100).unwrap().holds);
    }

    #[test]
    fn config_typing() {
        let (g, t) = check_config(&Configuration::Zero, System::Cp).unwrap();
        assert!(g.is_empty() && t.is_empty());
        let (g, t) = check_config(&proc_cfg(close("x"), ctx_of([("x", Formula::One)])), System::Cp).unwrap();
        assert_eq!(g, ctx_of([("x", Formula::One)]));
        assert!(t.is_empty());
        let (g, t) = check_config(&one_bot_cut(), System::Cp0).unwrap();
        assert!(g.is_empty());
        assert_eq!(t, ctx_of([("x", Formula::One)]));
        let bad = Configuration::Cut(
            Name::new("x"),
            Formula::One,
            Box::new(proc_cfg(close("x"), ctx_of([("x", Formula::One)]))),
            Box::new(proc_cfg(close("x"), ctx_of([("x", Formula::One)]))),
        );
        assert!(matches!(check_config(&bad, System::Cp), Err(ConfigError::CutTypeMismatch(_))));
    }

    #[test]
    fn one_bot() {
        let r = observe(&one_bot_cut(), 2, 100).unwrap();
        let mut t = ObsTuple::new();
        t.insert(Name::new("x"), Observation::Star);
        assert_eq!(r, [t].into_iter().collect());
        assert!(adequacy_check(&one_bot_cut(), 2, 100).unwrap().holds);
    }

    #[test]
    fn link_relates_both_ends() {
        // (fwd x y ⋈x x<2.x[]) ⋈y y>{y().0 ; y().0}
        let a = Formula::plus(Formula::One, Formula::One);
        let inner = Configuration::Cut(
            Name::new("x"),
            Formula::with(Formula::Bot, Formula::Bot),
            Box::new(proc_cfg(fwd("x", "y"), ctx_of([("x", dual(&a)), ("y", a.clone())]))),
            Box::new(proc_cfg(select("x", 2, close("x")), ctx_of([("x", a.clone())]))),
        );
        let c = Configuration::Cut(
            Name::new("y"),
            a.clone(),
            Box::new(inner),
            Box::new(proc_cfg(case("y", wait("y", inact()), wait("y", inact())), ctx_of([("y", dual(&a))]))),
        );
        let r = observe(&c, 2, 100).unwrap();
        assert_eq!(r.len(), 1);
        let t = r.iter().next().unwrap();
        assert_eq!(t[&Name::new("x")], t[&Name::new("y")]);
        assert_eq!(t[&Name::new("x")], Observation::tag(2, Observation::Star));
        assert!(adequacy_check(&c, 2, 100).unwrap().holds);
    }

    #[test]
    fn server_with_contraction() {
        // !x(y).y[]  ⋈x  ctr x<a,b>.?a[u].?b[v].u().v().0
        let srv = server("x", "y", close("y"));
        let cli = contract("x", "a", "b", client("a", "u", client("b", "v", wait("u", wait("v", inact())))));
        let c = Configuration::Cut(
            Name::new("x"),
            Formula::of_course(Formula::One),
            Box::new(proc_cfg(srv, ctx_of([("x", Formula::of_course(Formula::One))]))),
            Box::new(proc_cfg(cli, ctx_of([("x", Formula::why_not(Formula::Bot))]))),
        );
        let r = observe(&c, 2, 100).unwrap();
        let mut t = ObsTuple::new();
        t.insert(Name::new("x"), Observation::bag(vec![Observation::Star, Observation::Star]));
        assert_eq!(r, [t].into_iter().collect());
        assert!(adequacy_check(&c, 2, 100).unwrap().holds);
        // above the bound there is nothing to observe, on both sides
        let v = adequacy_check(&c, 1, 100).unwrap();
        assert!(v.holds && v.observed.is_empty());
    }

    #[test]
    fn open_configuration_rejected() {
        let c = proc_cfg(close("x"), ctx_of([("x", Formula::One)]));
        assert!(matches!(observe(&c, 2, 10), Err(ConfigError::OpenConfiguration(_))));
    }
}
