//! Observation spaces and the relational semantics of typed processes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::Value;
use thiserror::Error;

use crate::syntax::{Formula, Name, Process};
use crate::typing::{check, show_ctx, Context, Derivation, Rule, System, TypeError};

/// An observation. The derived order is Star < Pair < Tag < Bag, lexicographic inside.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Observation {
    Star,
    Pair(Box<Observation>, Box<Observation>),
    Tag(u8, Box<Observation>),
    /// Always sorted.
    Bag(Vec<Observation>),
}

impl Observation {
    pub fn pair(a: Observation, b: Observation) -> Observation {
        Observation::Pair(Box::new(a), Box::new(b))
    }

    pub fn tag(i: u8, a: Observation) -> Observation {
        Observation::Tag(i, Box::new(a))
    }

    pub fn bag(mut items: Vec<Observation>) -> Observation {
        items.sort();
        Observation::Bag(items)
    }

    /// Largest multiset cardinality anywhere inside.
    pub fn max_bag(&self) -> usize {
        match self {
            Observation::Star => 0,
            Observation::Pair(a, b) => a.max_bag().max(b.max_bag()),
            Observation::Tag(_, a) => a.max_bag(),
            Observation::Bag(xs) => xs.iter().map(|x| x.max_bag()).fold(xs.len(), usize::max),
        }
    }

    pub fn sorted_at(&self, a: &Formula) -> bool {
        use Formula as F;
        match (self, a) {
            (Observation::Star, F::One | F::Bot) => true,
            (Observation::Pair(x, y), F::Tensor(a, b) | F::Par(a, b)) => x.sorted_at(a) && y.sorted_at(b),
            (Observation::Tag(1, x), F::Plus(a, _) | F::With(a, _)) => x.sorted_at(a),
            (Observation::Tag(2, x), F::Plus(_, b) | F::With(_, b)) => x.sorted_at(b),
            (Observation::Bag(xs), F::OfCourse(a) | F::WhyNot(a)) => xs.iter().all(|x| x.sorted_at(a)),
            _ => false,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Observation::Star => Value::String("*".into()),
            Observation::Pair(a, b) => Value::Array(vec!["pair".into(), a.to_json(), b.to_json()]),
            Observation::Tag(i, a) => Value::Array(vec!["tag".into(), (*i).into(), a.to_json()]),
            Observation::Bag(xs) => Value::Array(vec![
                "bag".into(),
                Value::Array(xs.iter().map(|x| x.to_json()).collect()),
            ]),
        }
    }
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observation::Star => write!(f, "*"),
            Observation::Pair(a, b) => write!(f, "({},{})", a, b),
            Observation::Tag(i, a) => write!(f, "({},{})", i, a),
            Observation::Bag(xs) => {
                write!(f, "[")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", x)?;
                }
                write!(f, "]")
            }
        }
    }
}

/// Multiset union of two bag observations.
pub fn bag_union(a: &Observation, b: &Observation) -> Observation {
    match (a, b) {
        (Observation::Bag(xs), Observation::Bag(ys)) => {
            let mut v = xs.clone();
            v.extend(ys.iter().cloned());
            Observation::bag(v)
        }
        _ => panic!("bag union of non-bags {} and {}", a, b),
    }
}

pub type ObsTuple = BTreeMap<Name, Observation>;

pub fn tuple_to_json(t: &ObsTuple) -> Value {
    let mut m = serde_json::Map::new();
    for (k, v) in t {
        m.insert(k.to_string(), v.to_json());
    }
    Value::Object(m)
}

pub fn show_tuple(t: &ObsTuple) -> String {
    let parts: Vec<String> = t.iter().map(|(k, v)| format!("{}={}", k, v)).collect();
    format!("({})", parts.join(", "))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenotationSet {
    pub ctx: Context,
    pub k: usize,
    pub tuples: BTreeSet<ObsTuple>,
}

impl DenotationSet {
    pub fn to_json(&self) -> Value {
        Value::Array(self.tuples.iter().map(tuple_to_json).collect())
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn well_sorted(&self) -> bool {
        self.tuples.iter().all(|t| {
            t.len() == self.ctx.len()
                && t.iter().all(|(x, o)| self.ctx.get(x).is_some_and(|a| o.sorted_at(a)) && o.max_bag() <= self.k)
        })
    }
}

/// Canonical JSON text for a set of tuples.
pub fn set_to_json_string(s: &BTreeSet<ObsTuple>) -> String {
    Value::Array(s.iter().map(tuple_to_json).collect()).to_string()
}

/// `⟦A⟧` with every multiset layer limited to `k` elements.
pub fn obs_space(a: &Formula, k: usize) -> Vec<Observation> {
    use Formula as F;
    let mut out = match a {
        F::One | F::Bot => vec![Observation::Star],
        F::Tensor(a, b) | F::Par(a, b) => {
            let xs = obs_space(a, k);
            let ys = obs_space(b, k);
            let mut v = Vec::with_capacity(xs.len() * ys.len());
            for x in &xs {
                for y in &ys {
                    v.push(Observation::pair(x.clone(), y.clone()));
                }
            }
            v
        }
        F::Plus(a, b) | F::With(a, b) => {
            let mut v: Vec<Observation> = obs_space(a, k).into_iter().map(|x| Observation::tag(1, x)).collect();
            v.extend(obs_space(b, k).into_iter().map(|x| Observation::tag(2, x)));
            v
        }
        F::OfCourse(a) | F::WhyNot(a) => {
            let xs = obs_space(a, k);
            multisets(&xs, k).into_iter().map(Observation::bag).collect()
        }
    };
    out.sort();
    out
}

/// Size of the bounded observation space, saturating.
pub fn obs_space_size(a: &Formula, k: usize) -> usize {
    use Formula as F;
    match a {
        F::One | F::Bot => 1,
        F::Tensor(a, b) | F::Par(a, b) => obs_space_size(a, k).saturating_mul(obs_space_size(b, k)),
        F::Plus(a, b) | F::With(a, b) => obs_space_size(a, k).saturating_add(obs_space_size(b, k)),
        F::OfCourse(a) | F::WhyNot(a) => {
            let n = obs_space_size(a, k);
            // sum_{j<=k} C(n+j-1, j)
            let mut total: usize = 0;
            let mut c: usize = 1;
            for j in 0..=k {
                if j > 0 {
                    c = c.saturating_mul(n + j - 1) / j;
                }
                total = total.saturating_add(c);
            }
            total
        }
    }
}

/// All multisets of size at most `k` over `xs` (as sorted vectors).
pub fn multisets<T: Clone>(xs: &[T], k: usize) -> Vec<Vec<T>> {
    let mut out = vec![vec![]];
    fn go<T: Clone>(xs: &[T], start: usize, left: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if left == 0 {
            return;
        }
        for i in start..xs.len() {
            cur.push(xs[i].clone());
            out.push(cur.clone());
            go(xs, i, left - 1, cur, out);
            cur.pop();
        }
    }
    go(xs, 0, k, &mut Vec::new(), &mut out);
    out
}

fn within(t: &ObsTuple, k: usize) -> bool {
    t.values().all(|o| o.max_bag() <= k)
}

/// `⟦d⟧` at replication bound `k`.
pub fn denote(d: &Derivation, k: usize) -> DenotationSet {
    DenotationSet { ctx: d.ctx.clone(), k, tuples: denote_set(d, k) }
}

pub fn denote_set(d: &Derivation, k: usize) -> BTreeSet<ObsTuple> {
    use Rule::*;
    let prem = |i: usize| denote_set(&d.premises[i], k);
    match &d.rule {
        Id(x, y) => {
            let a = &d.ctx[x];
            obs_space(a, k)
                .into_iter()
                .map(|o| {
                    let mut t = ObsTuple::new();
                    t.insert(x.clone(), o.clone());
                    t.insert(y.clone(), o);
                    t
                })
                .collect()
        }
        One(x) => {
            let mut t = ObsTuple::new();
            t.insert(x.clone(), Observation::Star);
            [t].into_iter().collect()
        }
        Mix0 => [ObsTuple::new()].into_iter().collect(),
        Bot(x) => prem(0)
            .into_iter()
            .map(|mut t| {
                t.insert(x.clone(), Observation::Star);
                t
            })
            .collect(),
        Tensor { x, y } => {
            let left = prem(0);
            let right = prem(1);
            let mut out = BTreeSet::new();
            for l in &left {
                let a = &l[y];
                for r in &right {
                    let b = &r[x];
                    let mut t = r.clone();
                    for (n, o) in l {
                        if n != y {
                            t.insert(n.clone(), o.clone());
                        }
                    }
                    t.insert(x.clone(), Observation::pair(a.clone(), b.clone()));
                    out.insert(t);
                }
            }
            out
        }
        Par { x, y } => prem(0)
            .into_iter()
            .map(|mut t| {
                let a = t.remove(y).expect("bound name observed");
                let b = t.remove(x).expect("subject observed");
                t.insert(x.clone(), Observation::pair(a, b));
                t
            })
            .collect(),
        Plus { x, i } => prem(0)
            .into_iter()
            .map(|mut t| {
                let a = t.remove(x).expect("subject observed");
                t.insert(x.clone(), Observation::tag(*i, a));
                t
            })
            .collect(),
        With(x) => {
            let mut out = BTreeSet::new();
            for (i, s) in [(1u8, prem(0)), (2u8, prem(1))] {
                for mut t in s {
                    let a = t.remove(x).expect("subject observed");
                    t.insert(x.clone(), Observation::tag(i, a));
                    out.insert(t);
                }
            }
            out
        }
        OfCourse { x, y } => {
            let body: Vec<ObsTuple> = prem(0).into_iter().collect();
            let others: Vec<Name> = d.ctx.keys().filter(|n| *n != x).cloned().collect();
            let mut out = BTreeSet::new();
            for pick in multisets(&body, k) {
                let mut t = ObsTuple::new();
                for n in &others {
                    let items: Vec<Observation> = pick
                        .iter()
                        .flat_map(|b| match &b[n] {
                            Observation::Bag(xs) => xs.clone(),
                            o => panic!("non-bag {} on ?-typed name", o),
                        })
                        .collect();
                    t.insert(n.clone(), Observation::bag(items));
                }
                t.insert(x.clone(), Observation::bag(pick.iter().map(|b| b[y].clone()).collect()));
                if within(&t, k) {
                    out.insert(t);
                }
            }
            out
        }
        WhyNot { x, y } => prem(0)
            .into_iter()
            .map(|mut t| {
                let a = t.remove(y).expect("bound name observed");
                t.insert(x.clone(), Observation::bag(vec![a]));
                t
            })
            .filter(|t| within(t, k))
            .collect(),
        Weaken(x, _) => prem(0)
            .into_iter()
            .map(|mut t| {
                t.insert(x.clone(), Observation::Bag(vec![]));
                t
            })
            .collect(),
        Contract { x, x1, x2 } => prem(0)
            .into_iter()
            .map(|mut t| {
                let a = t.remove(x1).expect("contracted name observed");
                let b = t.remove(x2).expect("contracted name observed");
                t.insert(x.clone(), bag_union(&a, &b));
                t
            })
            .filter(|t| within(t, k))
            .collect(),
        Cut { x, .. } => join(&prem(0), &prem(1), x, false),
        Mix2 => product(&prem(0), &prem(1)),
    }
}

/// Join two relations on the shared coordinate `x`, keeping it when `keep` is set.
pub fn join(l: &BTreeSet<ObsTuple>, r: &BTreeSet<ObsTuple>, x: &Name, keep: bool) -> BTreeSet<ObsTuple> {
    let mut index: BTreeMap<&Observation, Vec<&ObsTuple>> = BTreeMap::new();
    for t in r {
        index.entry(&t[x]).or_default().push(t);
    }
    let mut out = BTreeSet::new();
    for a in l {
        if let Some(bs) = index.get(&a[x]) {
            for b in bs {
                let mut t = a.clone();
                if !keep {
                    t.remove(x);
                }
                for (n, o) in b.iter() {
                    if n != x {
                        t.insert(n.clone(), o.clone());
                    }
                }
                out.insert(t);
            }
        }
    }
    out
}

pub fn product(l: &BTreeSet<ObsTuple>, r: &BTreeSet<ObsTuple>) -> BTreeSet<ObsTuple> {
    let mut out = BTreeSet::new();
    for a in l {
        for b in r {
            let mut t = a.clone();
            t.extend(b.iter().map(|(n, o)| (n.clone(), o.clone())));
            out.insert(t);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EquivError {
    #[error("typing mismatch: {0}")]
    TypingMismatch(String),
}

/// Type-check and denote in one step.
pub fn denote_process(p: &Process, ctx: &Context, sys: System, k: usize) -> Result<DenotationSet, TypeError> {
    let d = check(p, ctx, sys)?;
    Ok(denote(&d, k))
}

/// Decide equivalence by comparing bounded denotations. Both processes must check at `ctx`.
pub fn equivalent(
    p: &Process,
    q: &Process,
    ctx: &Context,
    sys: System,
    k: usize,
) -> Result<bool, EquivError> {
    let dp = check(p, ctx, sys)
        .map_err(|e| EquivError::TypingMismatch(format!("left process at {}: {}", show_ctx(ctx), e)))?;
    let dq = check(q, ctx, sys)
        .map_err(|e| EquivError::TypingMismatch(format!("right process at {}: {}", show_ctx(ctx), e)))?;
    Ok(denote_set(&dp, k) == denote_set(&dq, k))
}

/// Equivalence where each process carries its own typing; differing typings are an error.
pub fn equivalent_typed(
    p: &Process,
    pc: &Context,
    q: &Process,
    qc: &Context,
    sys: System,
    k: usize,
) -> Result<bool, EquivError> {
    if pc != qc {
        return Err(EquivError::TypingMismatch(format!(
            "{} versus {}",
            show_ctx(pc),
            show_ctx(qc)
        )));
    }
    equivalent(p, q, pc, sys, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::build::*;
    use crate::typing::ctx_of;

    fn star() -> Observation {
        Observation::Star
    }

    fn single(pairs: &[(&str, Observation)]) -> BTreeSet<ObsTuple> {
        let t: ObsTuple = pairs.iter().map(|(n, o)| (Name::new(n), o.clone())).collect();
        [t].into_iter().collect()
    }

    #[test]
    fn spaces() {
        assert_eq!(obs_space(&Formula::One, 2), vec![star()]);
        assert_eq!(
            obs_space(&Formula::plus(Formula::One, Formula::One), 2),
            vec![Observation::tag(1, star()), Observation::tag(2, star())]
        );
        assert_eq!(
            obs_space(&Formula::of_course(Formula::One), 2),
            vec![Observation::bag(vec![]), Observation::bag(vec![star()]), Observation::bag(vec![star(), star()])]
        );
        for a in [
            Formula::of_course(Formula::plus(Formula::One, Formula::Bot)),
            Formula::tensor(Formula::why_not(Formula::One), Formula::with(Formula::One, Formula::One)),
        ] {
            for k in 0..3 {
                assert_eq!(obs_space(&a, k).len(), obs_space_size(&a, k));
            }
        }
    }

    #[test]
    fn basic_denotations() {
        let d = denote_process(&close("x"), &ctx_of([("x", Formula::One)]), System::Cp, 2).unwrap();
        assert_eq!(d.tuples, single(&[("x", star())]));
        let d = denote_process(&fwd("x", "y"), &ctx_of([("x", Formula::One), ("y", Formula::Bot)]), System::Cp, 2)
            .unwrap();
        assert_eq!(d.tuples, single(&[("x", star()), ("y", star())]));
        let c = ctx_of([("x", Formula::plus(Formula::One, Formula::One))]);
        let d = denote_process(&select("x", 1, close("x")), &c, System::Cp, 2).unwrap();
        assert_eq!(d.tuples, single(&[("x", Observation::tag(1, star()))]));
    }

    #[test]
    fn cut_against_wait() {
        let p = cut("x", Formula::One, close("x"), wait("x", close("y")));
        let c = ctx_of([("y", Formula::One)]);
        assert_eq!(equivalent(&p, &close("y"), &c, System::Cp, 2), Ok(true));
        assert_eq!(equivalent(&p, &p, &c, System::Cp, 2), Ok(true));
    }

    #[test]
    fn differently_typed_select_and_case() {
        let p = select("x", 1, close("x"));
        let q = case("x", close("x"), close("x"));
        let pc = ctx_of([("x", Formula::plus(Formula::One, Formula::One))]);
        let qc = ctx_of([("x", Formula::with(Formula::One, Formula::One))]);
        assert!(matches!(equivalent_typed(&p, &pc, &q, &qc, System::Cp, 2), Err(EquivError::TypingMismatch(_))));
        assert!(matches!(equivalent(&p, &q, &pc, System::Cp, 2), Err(EquivError::TypingMismatch(_))));
    }

    #[test]
    fn server_bags_are_bounded() {
        // !x(y).?z[w].fwd w y  at  z:?bot, x:!1
        let p = server("x", "y", client("z", "w", fwd("w", "y")));
        let c = ctx_of([("x", Formula::of_course(Formula::One)), ("z", Formula::why_not(Formula::Bot))]);
        for k in 0..4 {
            let d = denote_process(&p, &c, System::Cp, k).unwrap();
            assert_eq!(d.len(), k + 1);
            assert!(d.well_sorted());
        }
    }

    #[test]
    fn json_encoding() {
        let o = Observation::pair(Observation::tag(2, star()), Observation::bag(vec![star()]));
        assert_eq!(o.to_json().to_string(), r#"["pair",["tag",2,"*"],["bag",["*"]]]"#);
    }
}
