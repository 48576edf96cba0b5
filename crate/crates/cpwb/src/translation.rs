//! The negative translation into intuitionistic formulas, its image back inside CLL,
//! and the translation of processes.
//!
//! Every free or bound name `x` of a source process becomes `x'` in its translation.
//! Auxiliary names come from an unprimed stream `t0, t1, ...`, and the extra output
//! channel (default `w`) is unprimed too, so the three never meet.

use crate::syntax::{dual, Formula, Fresh, IllFormula, Name, Process};
use crate::typing::{Context, Derivation, Rule};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranslationConfig {
    pub residual: IllFormula,
}

impl Default for TranslationConfig {
    fn default() -> Self {
        TranslationConfig { residual: IllFormula::One }
    }
}

pub fn translate_formula_ill(f: &Formula, cfg: &TranslationConfig) -> IllFormula {
    let r = &cfg.residual;
    let neg = |a: IllFormula| IllFormula::lolli(a, r.clone());
    let go = |a: &Formula| translate_formula_ill(a, cfg);
    match f {
        Formula::Bot => IllFormula::One,
        Formula::One => neg(IllFormula::One),
        Formula::Tensor(a, b) => neg(IllFormula::tensor(neg(go(a)), neg(go(b)))),
        Formula::Par(a, b) => IllFormula::tensor(go(a), go(b)),
        Formula::Plus(a, b) => neg(IllFormula::plus(neg(go(a)), neg(go(b)))),
        Formula::With(a, b) => IllFormula::plus(go(a), go(b)),
        Formula::OfCourse(a) => neg(IllFormula::of_course(neg(go(a)))),
        Formula::WhyNot(a) => IllFormula::of_course(neg(neg(go(a)))),
    }
}

pub fn embed_ill(i: &IllFormula) -> Formula {
    match i {
        IllFormula::One => Formula::One,
        IllFormula::Tensor(a, b) => Formula::tensor(embed_ill(a), embed_ill(b)),
        IllFormula::Lollipop(a, b) => Formula::par(dual(&embed_ill(a)), embed_ill(b)),
        IllFormula::Plus(a, b) => Formula::plus(embed_ill(a), embed_ill(b)),
        IllFormula::With(a, b) => Formula::with(embed_ill(a), embed_ill(b)),
        IllFormula::OfCourse(a) => Formula::of_course(embed_ill(a)),
    }
}

/// `L̄(F)`, the dual of the embedded translation at `R = 1`.
pub fn translate_formula_dual(f: &Formula) -> Formula {
    use Formula as F;
    let go = translate_formula_dual;
    let wrap = |a: &Formula| F::par(go(a), F::One);
    match f {
        F::Bot => F::Bot,
        F::One => F::tensor(F::One, F::Bot),
        F::Tensor(a, b) => F::tensor(F::tensor(wrap(a), wrap(b)), F::Bot),
        F::Par(a, b) => F::par(go(a), go(b)),
        F::Plus(a, b) => F::tensor(F::plus(wrap(a), wrap(b)), F::Bot),
        F::With(a, b) => F::with(go(a), go(b)),
        F::OfCourse(a) => F::tensor(F::of_course(wrap(a)), F::Bot),
        F::WhyNot(a) => F::why_not(F::tensor(wrap(a), F::Bot)),
    }
}

/// The embedded translation `L(F)` at `R = 1`, i.e. `dual(L̄(F))`.
pub fn translate_formula(f: &Formula) -> Formula {
    dual(&translate_formula_dual(f))
}

/// `L̄(Δ)` on primed names, plus `out: 1`.
pub fn translate_context(ctx: &Context, out: &Name) -> Context {
    let mut c: Context = ctx.iter().map(|(x, a)| (x.primed(), translate_formula_dual(a))).collect();
    c.insert(out.clone(), Formula::One);
    c
}

fn b(p: Process) -> Box<Process> {
    Box::new(p)
}

fn fwd(x: &Name, y: &Name) -> Process {
    Process::Fwd(x.clone(), y.clone())
}

/// `x[y].(p | q)`
fn out(x: &Name, y: &Name, p: Process, q: Process) -> Process {
    Process::Out(y.clone(), x.clone(), b(p), b(q))
}

fn inp(x: &Name, y: &Name, p: Process) -> Process {
    Process::In(x.clone(), y.clone(), b(p))
}

fn close(x: &Name) -> Process {
    Process::EmptyOut(x.clone())
}

fn wait(x: &Name, p: Process) -> Process {
    Process::EmptyIn(x.clone(), b(p))
}

fn mix(p: Process, q: Process) -> Process {
    Process::Par(b(p), b(q))
}

/// Forwarder-free process equivalent to `[x↔y]` where `x: A`, `y: A⊥`.
pub fn eta(x: &Name, y: &Name, a: &Formula, fresh: &mut Fresh) -> Process {
    match a {
        Formula::One => wait(y, close(x)),
        Formula::Bot => wait(x, close(y)),
        Formula::Tensor(l, r) => {
            let u = fresh.name();
            let v = fresh.name();
            let left = eta(&u, &v, l, fresh);
            let right = eta(x, y, r, fresh);
            inp(y, &v, out(x, &u, left, right))
        }
        Formula::Par(l, r) => {
            let u = fresh.name();
            let v = fresh.name();
            let left = eta(&u, &v, l, fresh);
            let right = eta(x, y, r, fresh);
            inp(x, &u, out(y, &v, left, right))
        }
        Formula::Plus(l, r) => {
            let p1 = Process::Select(x.clone(), 1, b(eta(x, y, l, fresh)));
            let p2 = Process::Select(x.clone(), 2, b(eta(x, y, r, fresh)));
            Process::Case(y.clone(), b(p1), b(p2))
        }
        Formula::With(l, r) => {
            let p1 = Process::Select(y.clone(), 1, b(eta(x, y, l, fresh)));
            let p2 = Process::Select(y.clone(), 2, b(eta(x, y, r, fresh)));
            Process::Case(x.clone(), b(p1), b(p2))
        }
        Formula::OfCourse(c) => {
            let u = fresh.name();
            let v = fresh.name();
            let body = eta(&u, &v, c, fresh);
            Process::Server(x.clone(), u, b(Process::Client(y.clone(), v, b(body))))
        }
        Formula::WhyNot(c) => {
            let u = fresh.name();
            let v = fresh.name();
            let body = eta(&u, &v, c, fresh);
            Process::Server(y.clone(), v, b(Process::Client(x.clone(), u, b(body))))
        }
    }
}

fn negative_top(a: &Formula) -> bool {
    matches!(a, Formula::One | Formula::Bot | Formula::Par(..) | Formula::With(..) | Formula::WhyNot(..))
}

/// `⊢ z: L(A)⊗⊥, w: L(A⊥)⊗⊥, s: 1`; relates `L_A(a)` on `z` with `L_{A⊥}(a)` on `w`.
pub fn synchronizer(a: &Formula, z: &Name, w: &Name, s: &Name) -> Process {
    let mut fresh = Fresh::avoiding("t", [z.clone(), w.clone(), s.clone()]);
    sync(a, z, w, s, &mut fresh)
}

fn sync(a: &Formula, z: &Name, w: &Name, s: &Name, fresh: &mut Fresh) -> Process {
    if negative_top(a) {
        let r = fresh.name();
        let body = sync_half(a, z, &r, fresh);
        out(w, &r, body, fwd(w, s))
    } else {
        sync(&dual(a), w, z, s, fresh)
    }
}

/// `⊢ q: L(A)⊗⊥, r: L(A⊥)`. The cases for positive `A` use both mix rules.
fn sync_half(a: &Formula, q: &Name, r: &Name, fresh: &mut Fresh) -> Process {
    match a {
        Formula::One => {
            let m = fresh.name();
            let t = fresh.name();
            out(q, &m, inp(&m, &t, fwd(&t, &m)), fwd(q, r))
        }
        Formula::Bot => {
            let t = fresh.name();
            let m = fresh.name();
            inp(r, &t, out(q, &m, fwd(&m, &t), fwd(q, r)))
        }
        Formula::Par(bb, c) => {
            let p = fresh.name();
            let q1 = fresh.name();
            let u = fresh.name();
            let u1 = fresh.name();
            let left = sync_half(&dual(bb), &q1, &u1, fresh);
            let right = sync_half(&dual(c), &p, &u, fresh);
            inp(r, &p, inp(&p, &q1, out(q, &u, out(&u, &u1, left, right), fwd(q, r))))
        }
        Formula::With(bb, c) => {
            let p = fresh.name();
            let u = fresh.name();
            let branch = |i: u8, x: &Formula, fresh: &mut Fresh| {
                let inner = Process::Select(u.clone(), i, b(sync_half(&dual(x), &p, &u, fresh)));
                out(q, &u, inner, fwd(q, r))
            };
            let p1 = branch(1, bb, fresh);
            let p2 = branch(2, c, fresh);
            inp(r, &p, Process::Case(p.clone(), b(p1), b(p2)))
        }
        Formula::WhyNot(bb) => {
            let p = fresh.name();
            let u = fresh.name();
            let v = fresh.name();
            let t = fresh.name();
            let p1 = fresh.name();
            let body = sync(bb, &t, &p1, &v, fresh);
            let srv = Process::Server(u.clone(), v.clone(), b(inp(&v, &t, Process::Client(p.clone(), p1, b(body)))));
            inp(r, &p, out(q, &u, srv, fwd(q, r)))
        }
        Formula::Tensor(bb, c) => {
            let m = fresh.name();
            let p = fresh.name();
            let q1 = fresh.name();
            let r1 = fresh.name();
            let left = sync_half(bb, &q1, &r1, fresh);
            let right = mix(sync_half(c, &p, r, fresh), close(&m));
            let body = inp(&m, &p, inp(&p, &q1, out(r, &r1, left, right)));
            out(q, &m, body, wait(q, Process::Inact))
        }
        Formula::Plus(bb, c) => {
            let m = fresh.name();
            let p = fresh.name();
            let s1 = Process::Select(r.clone(), 1, b(mix(sync_half(bb, &p, r, fresh), close(&m))));
            let s2 = Process::Select(r.clone(), 2, b(mix(sync_half(c, &p, r, fresh), close(&m))));
            let body = inp(&m, &p, Process::Case(p.clone(), b(s1), b(s2)));
            out(q, &m, body, wait(q, Process::Inact))
        }
        Formula::OfCourse(bb) => {
            let m = fresh.name();
            let p = fresh.name();
            let v = fresh.name();
            let t = fresh.name();
            let p1 = fresh.name();
            let inner = sync(bb, &p1, &t, &v, fresh);
            let srv = Process::Server(r.clone(), v.clone(), b(inp(&v, &t, Process::Client(p.clone(), p1, b(inner)))));
            let body = inp(&m, &p, mix(srv, close(&m)));
            out(q, &m, body, wait(q, Process::Inact))
        }
    }
}

/// `L(P)` with output channel `w`.
pub fn translate_process(d: &Derivation) -> Process {
    translate_with_out(d, &Name::new("w"))
}

pub fn translate_with_out(d: &Derivation, o: &Name) -> Process {
    let mut fresh = Fresh::avoiding("t", [o.clone()]);
    tr(d, o, &mut fresh)
}

fn tr(d: &Derivation, o: &Name, fresh: &mut Fresh) -> Process {
    let sub = |i: usize, o: &Name, fresh: &mut Fresh| tr(&d.premises[i], o, fresh);
    match &d.rule {
        Rule::Mix0 => close(o),
        Rule::One(x) => {
            let u = fresh.name();
            out(&x.primed(), &u, close(&u), fwd(&x.primed(), o))
        }
        Rule::Bot(x) => wait(&x.primed(), sub(0, o, fresh)),
        Rule::Par { x, y } => inp(&x.primed(), &y.primed(), sub(0, o, fresh)),
        Rule::Tensor { x, y } => {
            let z2 = fresh.name();
            let z1 = fresh.name();
            let p = inp(&z1, &y.primed(), sub(0, &z1, fresh));
            let q = inp(&z2, &x.primed(), sub(1, &z2, fresh));
            out(&x.primed(), &z2, out(&z2, &z1, p, q), fwd(&x.primed(), o))
        }
        Rule::Plus { x, i } => {
            let z = fresh.name();
            let body = Process::Select(z.clone(), *i, b(inp(&z, &x.primed(), sub(0, &z, fresh))));
            out(&x.primed(), &z, body, fwd(&x.primed(), o))
        }
        Rule::With(x) => {
            let p = sub(0, o, fresh);
            let q = sub(1, o, fresh);
            Process::Case(x.primed(), b(p), b(q))
        }
        Rule::OfCourse { x, y } => {
            let u = fresh.name();
            let v = fresh.name();
            let body = inp(&v, &y.primed(), sub(0, &v, fresh));
            out(&x.primed(), &u, Process::Server(u.clone(), v, b(body)), fwd(&x.primed(), o))
        }
        Rule::WhyNot { x, y } => {
            let m = fresh.name();
            let v = fresh.name();
            let body = inp(&v, &y.primed(), sub(0, &v, fresh));
            Process::Client(x.primed(), m.clone(), b(out(&m, &v, body, fwd(&m, o))))
        }
        Rule::Weaken(x, a) => Process::Weak(x.primed(), translate_formula_dual(a), b(sub(0, o, fresh))),
        Rule::Contract { x, x1, x2 } => Process::Contract(x.primed(), x1.primed(), x2.primed(), b(sub(0, o, fresh))),
        Rule::Mix2 => {
            let a = fresh.name();
            let bb = fresh.name();
            let p = sub(0, &bb, fresh);
            let q = sub(1, &a, fresh);
            let left = out(&a, &bb, p, q);
            let right = inp(&a, &bb, wait(&bb, fwd(&a, o)));
            Process::Cut(a, Formula::tensor(Formula::One, Formula::One), b(left), b(right))
        }
        Rule::Cut { x, annot } => {
            let a = fresh.name();
            let bn = fresh.name();
            let p = inp(&a, &x.primed(), sub(0, &a, fresh));
            let q = inp(&bn, &x.primed(), sub(1, &bn, fresh));
            let s = sync(annot, &a, &bn, o, fresh);
            let la = Formula::par(translate_formula_dual(annot), Formula::One);
            let lb = Formula::par(translate_formula_dual(&dual(annot)), Formula::One);
            Process::Cut(a, la, b(p), b(Process::Cut(bn, lb, b(q), b(s))))
        }
        Rule::Id(x, y) => {
            let a = d.ctx[x].clone();
            // translate the expansion; its names are already unprimed source names
            let mut inner = Fresh::avoiding("e", d.ctx.keys().cloned());
            let expanded = eta(x, y, &a, &mut inner);
            let ed = crate::typing::check(&expanded, &d.ctx, crate::typing::System::Cp)
                .expect("eta expansion of a typed forwarder is typed");
            tr(&ed, o, fresh)
        }
    }
}
