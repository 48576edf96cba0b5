//! The map from observations at `A` to observations at `L̄(A)`, and the checks built on it.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::denotations::{denote_set, show_tuple, EquivError, ObsTuple, Observation};
use crate::syntax::{Formula, Name, Process};
use crate::translation::{translate_context, translate_process};
use crate::typing::{check, show_ctx, Context, System, TypeError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("observation {obs} is not of sort {sort}")]
    SortMismatch { sort: Formula, obs: Observation },
    #[error("tuple {0} does not cover the context")]
    ContextMismatch(String),
}

fn wrap(o: Observation) -> Observation {
    Observation::pair(o, Observation::Star)
}

/// `L_A(a)`.
pub fn l_obs(a: &Formula, o: &Observation) -> Result<Observation, TransformError> {
    use Formula as F;
    use Observation as O;
    let bad = || TransformError::SortMismatch { sort: a.clone(), obs: o.clone() };
    Ok(match (a, o) {
        (F::Bot, O::Star) => O::Star,
        (F::One, O::Star) => O::pair(O::Star, O::Star),
        (F::Par(x, y), O::Pair(p, q)) => O::pair(l_obs(x, p)?, l_obs(y, q)?),
        (F::Tensor(x, y), O::Pair(p, q)) => wrap(O::pair(wrap(l_obs(x, p)?), wrap(l_obs(y, q)?))),
        (F::With(x, y), O::Tag(i, p)) => {
            let side = match i {
                1 => x,
                2 => y,
                _ => return Err(bad()),
            };
            O::tag(*i, l_obs(side, p)?)
        }
        (F::Plus(x, y), O::Tag(i, p)) => {
            let side = match i {
                1 => x,
                2 => y,
                _ => return Err(bad()),
            };
            wrap(O::tag(*i, wrap(l_obs(side, p)?)))
        }
        (F::OfCourse(x), O::Bag(items)) => {
            let mapped = items.iter().map(|i| l_obs(x, i).map(wrap)).collect::<Result<Vec<_>, _>>()?;
            wrap(O::bag(mapped))
        }
        (F::WhyNot(x), O::Bag(items)) => {
            let mapped = items.iter().map(|i| l_obs(x, i).map(|v| wrap(wrap(v)))).collect::<Result<Vec<_>, _>>()?;
            O::bag(mapped)
        }
        _ => return Err(bad()),
    })
}

/// Signature of an observation transform; [`l_obs`] is the intended one.
pub type ObsMap = dyn Fn(&Formula, &Observation) -> Result<Observation, TransformError> + Sync;

/// `L_Δ(θ)` on primed names, with `out ↦ *`.
pub fn l_ctx(ctx: &Context, theta: &ObsTuple, out: &Name) -> Result<ObsTuple, TransformError> {
    l_ctx_with(ctx, theta, out, &l_obs)
}

pub fn l_ctx_with(ctx: &Context, theta: &ObsTuple, out: &Name, f: &ObsMap) -> Result<ObsTuple, TransformError> {
    if theta.len() != ctx.len() || !ctx.keys().all(|x| theta.contains_key(x)) {
        return Err(TransformError::ContextMismatch(show_tuple(theta)));
    }
    let mut t = ObsTuple::new();
    for (x, a) in ctx {
        t.insert(x.primed(), f(a, &theta[x])?);
    }
    t.insert(out.clone(), Observation::Star);
    Ok(t)
}

pub fn l_set(ctx: &Context, xs: &BTreeSet<ObsTuple>, out: &Name) -> Result<BTreeSet<ObsTuple>, TransformError> {
    xs.iter().map(|t| l_ctx(ctx, t, out)).collect()
}

/// Outcome of comparing two denotation sets that a theorem says are equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetVerdict {
    pub holds: bool,
    /// Expected but missing.
    pub missing: BTreeSet<ObsTuple>,
    /// Present but not expected.
    pub extra: BTreeSet<ObsTuple>,
}

impl SetVerdict {
    pub fn compare(expected: &BTreeSet<ObsTuple>, actual: &BTreeSet<ObsTuple>) -> SetVerdict {
        let missing: BTreeSet<ObsTuple> = expected.difference(actual).cloned().collect();
        let extra: BTreeSet<ObsTuple> = actual.difference(expected).cloned().collect();
        SetVerdict { holds: missing.is_empty() && extra.is_empty(), missing, extra }
    }

    pub fn describe(&self) -> String {
        let show = |s: &BTreeSet<ObsTuple>| s.iter().map(show_tuple).collect::<Vec<_>>().join(", ");
        format!("missing [{}] extra [{}]", show(&self.missing), show(&self.extra))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Equiv(#[from] EquivError),
}

/// `L_Δ(⟦P⟧) = ⟦L(P)⟧`.
pub fn check_translation_theorem(p: &Process, ctx: &Context, sys: System, k: usize) -> Result<SetVerdict, CheckError> {
    check_translation_theorem_with(p, ctx, sys, k, &l_obs)
}

/// As [`check_translation_theorem`], with the observation transform supplied by the caller.
pub fn check_translation_theorem_with(
    p: &Process,
    ctx: &Context,
    sys: System,
    k: usize,
    f: &ObsMap,
) -> Result<SetVerdict, CheckError> {
    let d = check(p, ctx, sys)?;
    let w = Name::new("w");
    let expected = denote_set(&d, k)
        .iter()
        .map(|t| l_ctx_with(ctx, t, &w, f))
        .collect::<Result<BTreeSet<_>, _>>()?;
    let lp = translate_process(&d);
    let ld = check(&lp, &translate_context(ctx, &w), System::Cp02)?;
    Ok(SetVerdict::compare(&expected, &denote_set(&ld, k)))
}

/// Both sides of a full-abstraction instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaVerdict {
    pub source_equivalent: bool,
    pub target_equivalent: bool,
}

impl FaVerdict {
    pub fn holds(&self) -> bool {
        self.source_equivalent == self.target_equivalent
    }
}

pub(crate) fn checked_pair(
    p: &Process,
    q: &Process,
    ctx: &Context,
    sys: System,
) -> Result<(crate::typing::Derivation, crate::typing::Derivation), CheckError> {
    let mism = |side: &str, e: TypeError| EquivError::TypingMismatch(format!("{} process at {}: {}", side, show_ctx(ctx), e));
    let dp = check(p, ctx, sys).map_err(|e| mism("left", e))?;
    let dq = check(q, ctx, sys).map_err(|e| mism("right", e))?;
    Ok((dp, dq))
}

/// `P ≃ Q` iff `L(P) ≃ L(Q)`.
pub fn full_abstraction_i(p: &Process, q: &Process, ctx: &Context, sys: System, k: usize) -> Result<FaVerdict, CheckError> {
    let (dp, dq) = checked_pair(p, q, ctx, sys)?;
    let source_equivalent = denote_set(&dp, k) == denote_set(&dq, k);
    let tctx = translate_context(ctx, &Name::new("w"));
    let lp = check(&translate_process(&dp), &tctx, System::Cp02)?;
    let lq = check(&translate_process(&dq), &tctx, System::Cp02)?;
    let target_equivalent = denote_set(&lp, k) == denote_set(&lq, k);
    Ok(FaVerdict { source_equivalent, target_equivalent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denotations::{bag_union, obs_space};
    use crate::syntax::build::*;
    use crate::translation::translate_formula_dual;
    use crate::typing::ctx_of;

    fn star() -> Observation {
        Observation::Star
    }

    #[test]
    fn l_obs_examples() {
        assert_eq!(l_obs(&Formula::One, &star()).unwrap(), Observation::pair(star(), star()));
        assert_eq!(l_obs(&Formula::Bot, &star()).unwrap(), star());
        let one1 = l_obs(&Formula::One, &star()).unwrap();
        let got = l_obs(&Formula::tensor(Formula::One, Formula::One), &Observation::pair(star(), star())).unwrap();
        let want = Observation::pair(
            Observation::pair(Observation::pair(one1.clone(), star()), Observation::pair(one1, star())),
            star(),
        );
        assert_eq!(got, want);
        assert!(matches!(
            l_obs(&Formula::One, &Observation::tag(1, star())),
            Err(TransformError::SortMismatch { .. })
        ));
    }

    #[test]
    fn l_ctx_examples() {
        let w = Name::new("w");
        let mut th = ObsTuple::new();
        th.insert(Name::new("x"), star());
        let r = l_ctx(&ctx_of([("x", Formula::One)]), &th, &w).unwrap();
        assert_eq!(r[&Name::new("x'")], Observation::pair(star(), star()));
        assert_eq!(r[&w], star());
        let r = l_ctx(&Context::new(), &ObsTuple::new(), &w).unwrap();
        assert_eq!(r.len(), 1);
        th.insert(Name::new("y"), star());
        let r = l_ctx(&ctx_of([("x", Formula::Bot), ("y", Formula::One)]), &th, &w).unwrap();
        assert_eq!(r[&Name::new("x'")], star());
        assert_eq!(r[&Name::new("y'")], Observation::pair(star(), star()));
    }

    #[test]
    fn sort_correct_and_injective() {
        let a = Formula::plus(Formula::with(Formula::One, Formula::Bot), Formula::of_course(Formula::One));
        let space = obs_space(&a, 2);
        let image: BTreeSet<Observation> = space.iter().map(|o| l_obs(&a, o).unwrap()).collect();
        assert_eq!(image.len(), space.len());
        let target = translate_formula_dual(&a);
        assert!(image.iter().all(|o| o.sorted_at(&target)));
    }

    #[test]
    fn bag_homomorphism() {
        let a = Formula::why_not(Formula::One);
        let x = Observation::bag(vec![star()]);
        let y = Observation::bag(vec![star(), star()]);
        assert_eq!(
            l_obs(&a, &bag_union(&x, &y)).unwrap(),
            bag_union(&l_obs(&a, &x).unwrap(), &l_obs(&a, &y).unwrap())
        );
    }

    #[test]
    fn theorem_instances() {
        let v = check_translation_theorem(&close("x"), &ctx_of([("x", Formula::One)]), System::Cp, 2).unwrap();
        assert!(v.holds, "{}", v.describe());
        let v = check_translation_theorem(&inact(), &Context::new(), System::Cp0, 2).unwrap();
        assert!(v.holds);
        let v = check_translation_theorem(&fwd("x", "y"), &ctx_of([("x", Formula::One), ("y", Formula::Bot)]), System::Cp, 2)
            .unwrap();
        assert!(v.holds);
    }

    #[test]
    fn full_abstraction_examples() {
        let c = ctx_of([("y", Formula::One)]);
        let v = full_abstraction_i(&close("y"), &close("y"), &c, System::Cp, 2).unwrap();
        assert!(v.source_equivalent && v.target_equivalent);
        let p = cut("x", Formula::One, close("x"), wait("x", close("y")));
        let v = full_abstraction_i(&p, &close("y"), &c, System::Cp, 2).unwrap();
        assert!(v.source_equivalent && v.target_equivalent);
        let c = ctx_of([("x", Formula::plus(Formula::One, Formula::One))]);
        let v = full_abstraction_i(&select("x", 1, close("x")), &select("x", 2, close("x")), &c, System::Cp, 2).unwrap();
        assert!(!v.source_equivalent && !v.target_equivalent);
    }
}
