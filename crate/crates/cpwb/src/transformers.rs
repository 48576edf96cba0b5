//! Transformer processes, which adapt an endpoint of type `A⊥` into one of type `L̄(A)`,
//! and the contexts that apply them to every free name of a process.

use std::collections::BTreeSet;

use crate::denotations::{denote_set, join, obs_space, product, ObsTuple, Observation};
use crate::obs_transform::{checked_pair, l_obs, l_set, CheckError, FaVerdict, SetVerdict};
use crate::syntax::{dual, Formula, Fresh, Name, Process};
use crate::translation::{translate_context, translate_formula_dual, translate_process};
use crate::typing::{check, check_context, fill, Context, ContextDerivation, System, TypeError, TypedContext};

fn b(p: Process) -> Box<Process> {
    Box::new(p)
}

fn out(x: &Name, y: &Name, p: Process, q: Process) -> Process {
    Process::Out(y.clone(), x.clone(), b(p), b(q))
}

fn inp(x: &Name, y: &Name, p: Process) -> Process {
    Process::In(x.clone(), y.clone(), b(p))
}

fn close(x: &Name) -> Process {
    Process::EmptyOut(x.clone())
}

fn halt(x: &Name) -> Process {
    Process::EmptyIn(x.clone(), b(Process::Inact))
}

fn mix(p: Process, q: Process) -> Process {
    Process::Par(b(p), b(q))
}

/// `T(A) ⊢ x: A⊥, x2: L̄(A)` in CP with both mix rules.
pub fn transformer(a: &Formula, x: &Name, x2: &Name) -> Process {
    let mut fresh = Fresh::avoiding("u", [x.clone(), x2.clone()]);
    tf(a, x, x2, &mut fresh)
}

fn tf(a: &Formula, x: &Name, x2: &Name, fresh: &mut Fresh) -> Process {
    match a {
        Formula::Bot => Process::Fwd(x.clone(), x2.clone()),
        Formula::One => {
            let y = fresh.name();
            out(x2, &y, Process::Fwd(y.clone(), x.clone()), halt(x2))
        }
        Formula::Par(l, r) => {
            let y2 = fresh.name();
            let y = fresh.name();
            let left = tf(l, &y, &y2, fresh);
            let right = tf(r, x, x2, fresh);
            inp(x2, &y2, out(x, &y, left, right))
        }
        Formula::Tensor(l, r) => {
            let y = fresh.name();
            let z2 = fresh.name();
            let z1 = fresh.name();
            let y2 = fresh.name();
            let xr = fresh.name();
            let left = inp(&z1, &y2, mix(tf(l, &y, &y2, fresh), close(&z1)));
            let right = inp(&z2, &xr, mix(tf(r, x, &xr, fresh), close(&z2)));
            inp(x, &y, out(x2, &z2, out(&z2, &z1, left, right), halt(x2)))
        }
        Formula::Plus(l, r) => {
            let branch = |i: u8, side: &Formula, fresh: &mut Fresh| {
                let z = fresh.name();
                let y2 = fresh.name();
                let body = inp(&z, &y2, mix(tf(side, x, &y2, fresh), close(&z)));
                out(x2, &z, Process::Select(z.clone(), i, b(body)), halt(x2))
            };
            let p1 = branch(1, l, fresh);
            let p2 = branch(2, r, fresh);
            Process::Case(x.clone(), b(p1), b(p2))
        }
        Formula::With(l, r) => {
            let p1 = Process::Select(x.clone(), 1, b(tf(l, x, x2, fresh)));
            let p2 = Process::Select(x.clone(), 2, b(tf(r, x, x2, fresh)));
            Process::Case(x2.clone(), b(p1), b(p2))
        }
        Formula::OfCourse(c) => {
            let u = fresh.name();
            let v = fresh.name();
            let y = fresh.name();
            let y2 = fresh.name();
            let body = Process::Client(x.clone(), y.clone(), b(inp(&v, &y2, mix(tf(c, &y, &y2, fresh), close(&v)))));
            out(x2, &u, Process::Server(u.clone(), v, b(body)), halt(x2))
        }
        Formula::WhyNot(c) => {
            let y = fresh.name();
            let m = fresh.name();
            let v = fresh.name();
            let y2 = fresh.name();
            let inner = inp(&v, &y2, mix(tf(c, &y, &y2, fresh), close(&v)));
            let body = Process::Client(x2.clone(), m.clone(), b(out(&m, &v, inner, halt(&m))));
            Process::Server(x.clone(), y, b(body))
        }
    }
}

/// The hole cut against a transformer on each name of `Δ`, in parallel with `z[]`.
/// Hole type `Δ`, result `L̄(Δ)` on primed names plus `z: 1`.
pub fn transformer_context(ctx: &Context, z: &Name) -> TypedContext {
    let mut k = TypedContext::Hole;
    for (x, a) in ctx {
        k = TypedContext::Cut(x.clone(), a.clone(), Box::new(k), transformer(a, x, &x.primed()));
    }
    TypedContext::Mix(Box::new(k), close(z))
}

pub fn check_transformer_context(ctx: &Context, z: &Name) -> Result<(TypedContext, ContextDerivation), TypeError> {
    let k = transformer_context(ctx, z);
    let cd = check_context(&k, ctx, &translate_context(ctx, z), System::Cp02)?;
    Ok((k, cd))
}

/// `⟦K⟧(X)`: relational composition through each cut, product through each parallel.
pub fn context_denotation(cd: &ContextDerivation, xs: &BTreeSet<ObsTuple>, k: usize) -> BTreeSet<ObsTuple> {
    match cd {
        ContextDerivation::Hole(_) => xs.clone(),
        ContextDerivation::Cut { x, inner, right, .. } => {
            join(&context_denotation(inner, xs, k), &denote_set(right, k), x, false)
        }
        ContextDerivation::Mix { inner, right, .. } => product(&context_denotation(inner, xs, k), &denote_set(right, k)),
    }
}

/// The graph `{(x ↦ a, x2 ↦ L_A(a))}` that a transformer must denote.
pub fn transformer_graph(a: &Formula, x: &Name, x2: &Name, k: usize) -> BTreeSet<ObsTuple> {
    obs_space(a, k)
        .into_iter()
        .map(|o| {
            let mut t = ObsTuple::new();
            t.insert(x2.clone(), l_obs(a, &o).expect("space elements are well sorted"));
            t.insert(x.clone(), o);
            t
        })
        .collect()
}

pub fn check_transformer_graph(a: &Formula, k: usize) -> Result<SetVerdict, TypeError> {
    let x = Name::new("x");
    let x2 = x.primed();
    let p = transformer(a, &x, &x2);
    let mut ctx = Context::new();
    ctx.insert(x.clone(), dual(a));
    ctx.insert(x2.clone(), translate_formula_dual(a));
    let d = check(&p, &ctx, System::Cp02)?;
    Ok(SetVerdict::compare(&transformer_graph(a, &x, &x2, k), &denote_set(&d, k)))
}

/// `⟦T⟨−⟩_Δ⟧(X) = L_Δ(X)`.
pub fn check_transformer_theorem(ctx: &Context, xs: &BTreeSet<ObsTuple>, k: usize) -> Result<SetVerdict, CheckError> {
    let z = Name::new("z");
    let (_, cd) = check_transformer_context(ctx, &z)?;
    let expected = l_set(ctx, xs, &z)?;
    Ok(SetVerdict::compare(&expected, &context_denotation(&cd, xs, k)))
}

/// `⟦L(P)⟧ = ⟦T⟨P⟩_Δ⟧`, after renaming the closing name of the transformer context to `w`.
pub fn check_transformer_correct(p: &Process, ctx: &Context, sys: System, k: usize) -> Result<SetVerdict, CheckError> {
    let d = check(p, ctx, sys)?;
    let w = Name::new("w");
    let z = Name::new("z");
    let lp = check(&translate_process(&d), &translate_context(ctx, &w), System::Cp02)?;
    let (kctx, _) = check_transformer_context(ctx, &z)?;
    let filled = fill(&kctx, p);
    let fd = check(&filled, &translate_context(ctx, &z), System::Cp02)?;
    let renamed: BTreeSet<ObsTuple> = denote_set(&fd, k)
        .into_iter()
        .map(|mut t| {
            let v = t.remove(&z).unwrap_or(Observation::Star);
            t.insert(w.clone(), v);
            t
        })
        .collect();
    Ok(SetVerdict::compare(&denote_set(&lp, k), &renamed))
}

/// `P ≃ Q` iff `T⟨P⟩ ≃ T⟨Q⟩`.
pub fn full_abstraction_ii(p: &Process, q: &Process, ctx: &Context, k: usize) -> Result<FaVerdict, CheckError> {
    let (dp, dq) = checked_pair(p, q, ctx, System::Cp02)?;
    let source_equivalent = denote_set(&dp, k) == denote_set(&dq, k);
    let z = Name::new("z");
    let (kctx, _) = check_transformer_context(ctx, &z)?;
    let tctx = translate_context(ctx, &z);
    let fp = check(&fill(&kctx, p), &tctx, System::Cp02)?;
    let fq = check(&fill(&kctx, q), &tctx, System::Cp02)?;
    let target_equivalent = denote_set(&fp, k) == denote_set(&fq, k);
    Ok(FaVerdict { source_equivalent, target_equivalent })
}

/// `⟦K⟧(⟦P⟧) = ⟦K[P]⟧`.
pub fn check_fill_lemma(
    kctx: &TypedContext,
    cd: &ContextDerivation,
    p: &Process,
    hole: &Context,
    sys: System,
    k: usize,
) -> Result<SetVerdict, TypeError> {
    let d = check(p, hole, sys)?;
    let lhs = context_denotation(cd, &denote_set(&d, k), k);
    let fd = check(&fill(kctx, p), cd.result(), sys)?;
    Ok(SetVerdict::compare(&lhs, &denote_set(&fd, k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::build;
    use crate::typing::ctx_of;

    fn star() -> Observation {
        Observation::Star
    }

    #[test]
    fn graph_examples() {
        for a in [
            Formula::Bot,
            Formula::One,
            Formula::plus(Formula::One, Formula::One),
            Formula::tensor(Formula::One, Formula::Bot),
            Formula::par(Formula::One, Formula::Bot),
            Formula::with(Formula::Bot, Formula::One),
            Formula::of_course(Formula::One),
            Formula::why_not(Formula::Bot),
        ] {
            let v = check_transformer_graph(&a, 2).unwrap();
            assert!(v.holds, "{}: {}", a, v.describe());
        }
        assert_eq!(transformer(&Formula::Bot, &Name::new("x"), &Name::new("x'")), build::fwd("x", "x'"));
        let g = transformer_graph(&Formula::plus(Formula::One, Formula::One), &Name::new("x"), &Name::new("x'"), 2);
        let want = Observation::pair(
            Observation::tag(1, Observation::pair(Observation::pair(star(), star()), star())),
            star(),
        );
        assert!(g.iter().any(|t| t[&Name::new("x'")] == want));
    }

    #[test]
    fn contexts() {
        let z = Name::new("z");
        let (k, cd) = check_transformer_context(&Context::new(), &z).unwrap();
        assert_eq!(k, TypedContext::Mix(Box::new(TypedContext::Hole), build::close("z")));
        let one: BTreeSet<ObsTuple> = [ObsTuple::new()].into_iter().collect();
        let r = context_denotation(&cd, &one, 2);
        assert_eq!(r.len(), 1);
        assert_eq!(r.iter().next().unwrap()[&z], star());

        let c = ctx_of([("x", Formula::One)]);
        let (k, _) = check_transformer_context(&c, &z).unwrap();
        match k {
            TypedContext::Mix(inner, _) => assert!(matches!(*inner, TypedContext::Cut(..))),
            other => panic!("{:?}", other),
        }
        let mut t = ObsTuple::new();
        t.insert(Name::new("x"), star());
        let v = check_transformer_theorem(&c, &[t].into_iter().collect(), 2).unwrap();
        assert!(v.holds);
        let v = check_transformer_theorem(&Context::new(), &one, 2).unwrap();
        assert!(v.holds);
    }

    #[test]
    fn hole_and_mix_clauses() {
        let cd = ContextDerivation::Hole(Context::new());
        let one: BTreeSet<ObsTuple> = [ObsTuple::new()].into_iter().collect();
        assert_eq!(context_denotation(&cd, &one, 2), one);
        let k = TypedContext::Mix(Box::new(TypedContext::Hole), build::close("y"));
        let cd = check_context(&k, &Context::new(), &ctx_of([("y", Formula::One)]), System::Cp02).unwrap();
        let r = context_denotation(&cd, &one, 2);
        let mut t = ObsTuple::new();
        t.insert(Name::new("y"), star());
        assert_eq!(r, [t].into_iter().collect());
    }

    #[test]
    fn correctness_examples() {
        let v = check_transformer_correct(&build::close("x"), &ctx_of([("x", Formula::One)]), System::Cp, 2).unwrap();
        assert!(v.holds, "{}", v.describe());
        let v = check_transformer_correct(&build::inact(), &Context::new(), System::Cp0, 2).unwrap();
        assert!(v.holds);
        let p = build::inp("x", "y", build::wait("y", build::close("x")));
        let c = ctx_of([("x", Formula::par(Formula::Bot, Formula::One))]);
        let v = check_transformer_correct(&p, &c, System::Cp, 2).unwrap();
        assert!(v.holds, "{}", v.describe());
    }

    #[test]
    fn full_abstraction_examples() {
        let c = ctx_of([("y", Formula::One)]);
        let v = full_abstraction_ii(&build::close("y"), &build::close("y"), &c, 2).unwrap();
        assert!(v.source_equivalent && v.target_equivalent);
        let p = build::cut("x", Formula::One, build::close("x"), build::wait("x", build::close("y")));
        let v = full_abstraction_ii(&p, &build::close("y"), &c, 2).unwrap();
        assert!(v.source_equivalent && v.target_equivalent);
        let c = ctx_of([("x", Formula::plus(Formula::One, Formula::One))]);
        let v = full_abstraction_ii(&build::select("x", 1, build::close("x")), &build::select("x", 2, build::close("x")), &c, 2)
            .unwrap();
        assert!(!v.source_equivalent && !v.target_equivalent);
    }

    #[test]
    fn forwarder_lemma() {
        let c = ctx_of([("x", Formula::One), ("y", Formula::Bot)]);
        let a = check(&build::fwd("x", "y"), &c, System::Cp02).unwrap();
        let b = check(&build::mix(build::close("x"), build::wait("y", build::inact())), &c, System::Cp02).unwrap();
        assert_eq!(denote_set(&a, 2), denote_set(&b, 2));
    }
}
