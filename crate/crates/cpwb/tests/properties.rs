use std::collections::BTreeSet;

use proptest::prelude::*;

use cpwb::harness::{enumerate_formulas, enumerate_processes, Connective};
use cpwb::syntax::{alpha_eq, dual, substitute, Formula, Name, Process};
use cpwb::text::{parse_process, parse_type, print_process};
use cpwb::typing::{ctx_of, System};

const NAMES: [&str; 5] = ["a", "b", "c", "x", "y"];

fn name() -> impl Strategy<Value = Name> {
    prop::sample::select(&NAMES[..]).prop_map(Name::new)
}

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![Just(Formula::One), Just(Formula::Bot)];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::tensor(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::par(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::plus(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::with(a, b)),
            inner.clone().prop_map(Formula::of_course),
            inner.prop_map(Formula::why_not),
        ]
    })
}

/// Untyped terms; scoping is irrelevant for the syntactic properties.
fn process() -> impl Strategy<Value = Process> {
    let leaf = prop_oneof![
        Just(Process::Inact),
        name().prop_map(Process::EmptyOut),
        (name(), name()).prop_map(|(x, y)| Process::Fwd(x, y)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let b = || inner.clone().prop_map(Box::new);
        prop_oneof![
            (name(), formula(), b(), b()).prop_map(|(x, a, p, q)| Process::Cut(x, a, p, q)),
            (b(), b()).prop_map(|(p, q)| Process::Par(p, q)),
            (name(), name(), b(), b()).prop_map(|(y, x, p, q)| Process::Out(y, x, p, q)),
            (name(), name(), b()).prop_map(|(x, y, p)| Process::In(x, y, p)),
            (name(), name(), b()).prop_map(|(x, y, p)| Process::Server(x, y, p)),
            (name(), name(), b()).prop_map(|(x, y, p)| Process::Client(x, y, p)),
            (name(), 1u8..=2, b()).prop_map(|(x, i, p)| Process::Select(x, i, p)),
            (name(), b(), b()).prop_map(|(x, p, q)| Process::Case(x, p, q)),
            (name(), b()).prop_map(|(x, p)| Process::EmptyIn(x, p)),
            (name(), formula(), b()).prop_map(|(x, a, p)| Process::Weak(x, Formula::why_not(a), p)),
            (name(), name(), name(), b()).prop_map(|(x, x1, x2, p)| Process::Contract(x, x1, x2, p)),
        ]
    })
}

/// Rename every binder to a new name, independently of the library's own renaming.
struct Freshen {
    avoid: BTreeSet<Name>,
    next: usize,
}

impl Freshen {
    fn name(&mut self) -> Name {
        loop {
            let n = Name::new(&format!("v{}", self.next));
            self.next += 1;
            if !self.avoid.contains(&n) {
                return n;
            }
        }
    }

    fn bind(&mut self, x: &Name, p: &Process) -> (Name, Box<Process>) {
        let v = self.name();
        let body = self.go(p);
        (v.clone(), Box::new(substitute(&body, &v, x)))
    }

    fn go(&mut self, p: &Process) -> Process {
        use Process as P;
        match p {
            P::Inact | P::EmptyOut(_) | P::Fwd(..) => p.clone(),
            P::Cut(x, a, l, r) => {
                let v = self.name();
                let (l, r) = (self.go(l), self.go(r));
                P::Cut(v.clone(), a.clone(), Box::new(substitute(&l, &v, x)), Box::new(substitute(&r, &v, x)))
            }
            P::Par(l, r) => P::Par(Box::new(self.go(l)), Box::new(self.go(r))),
            P::Out(y, x, l, r) => {
                let (v, l) = self.bind(y, l);
                P::Out(v, x.clone(), l, Box::new(self.go(r)))
            }
            P::In(x, y, q) => {
                let (v, q) = self.bind(y, q);
                P::In(x.clone(), v, q)
            }
            P::Server(x, y, q) => {
                let (v, q) = self.bind(y, q);
                P::Server(x.clone(), v, q)
            }
            P::Client(x, y, q) => {
                let (v, q) = self.bind(y, q);
                P::Client(x.clone(), v, q)
            }
            P::Select(x, i, q) => P::Select(x.clone(), *i, Box::new(self.go(q))),
            P::Case(x, l, r) => P::Case(x.clone(), Box::new(self.go(l)), Box::new(self.go(r))),
            P::EmptyIn(x, q) => P::EmptyIn(x.clone(), Box::new(self.go(q))),
            P::Weak(x, a, q) => P::Weak(x.clone(), a.clone(), Box::new(self.go(q))),
            P::Contract(x, x1, x2, q) => {
                if x1 == x2 {
                    return p.clone();
                }
                let (v1, v2) = (self.name(), self.name());
                let q = self.go(q);
                let q = substitute(&substitute(&q, &v1, x1), &v2, x2);
                P::Contract(x.clone(), v1, v2, Box::new(q))
            }
        }
    }
}

fn freshen(p: &Process) -> Process {
    Freshen { avoid: p.all_names(), next: 0 }.go(p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn parse_inverts_print(p in process()) {
        let text = print_process(&p);
        let back = parse_process(&text).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(print_process(&back), text);
    }

    #[test]
    fn type_text_round_trips(a in formula()) {
        prop_assert_eq!(parse_type(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn substitution_round_trip(p in process(), x in name()) {
        let z = Name::new("fresh");
        let back = substitute(&substitute(&p, &z, &x), &x, &z);
        prop_assert!(alpha_eq(&back, &p), "{} became {}", print_process(&p), print_process(&back));
    }

    #[test]
    fn freshened_terms_are_alpha_equal(p in process()) {
        let q = freshen(&p);
        prop_assert!(alpha_eq(&p, &q), "{} vs {}", print_process(&p), print_process(&q));
        prop_assert!(alpha_eq(&q, &p));
        prop_assert_eq!(p.free_names(), q.free_names());
    }

    #[test]
    fn alpha_is_a_congruence(p in process(), r in process(), x in name(), y in name(), a in formula()) {
        let q = freshen(&p);
        let b = Box::new;
        let pairs = [
            (Process::Par(b(p.clone()), b(r.clone())), Process::Par(b(q.clone()), b(r.clone()))),
            (Process::Par(b(r.clone()), b(p.clone())), Process::Par(b(r.clone()), b(q.clone()))),
            (Process::Cut(x.clone(), a.clone(), b(p.clone()), b(r.clone())), Process::Cut(x.clone(), a.clone(), b(q.clone()), b(r.clone()))),
            (Process::Out(y.clone(), x.clone(), b(p.clone()), b(r.clone())), Process::Out(y.clone(), x.clone(), b(q.clone()), b(r.clone()))),
            (Process::Out(y.clone(), x.clone(), b(r.clone()), b(p.clone())), Process::Out(y.clone(), x.clone(), b(r.clone()), b(q.clone()))),
            (Process::In(x.clone(), y.clone(), b(p.clone())), Process::In(x.clone(), y.clone(), b(q.clone()))),
            (Process::Server(x.clone(), y.clone(), b(p.clone())), Process::Server(x.clone(), y.clone(), b(q.clone()))),
            (Process::Client(x.clone(), y.clone(), b(p.clone())), Process::Client(x.clone(), y.clone(), b(q.clone()))),
            (Process::Select(x.clone(), 2, b(p.clone())), Process::Select(x.clone(), 2, b(q.clone()))),
            (Process::Case(x.clone(), b(r.clone()), b(p.clone())), Process::Case(x.clone(), b(r.clone()), b(q.clone()))),
            (Process::EmptyIn(x.clone(), b(p.clone())), Process::EmptyIn(x.clone(), b(q.clone()))),
            (Process::Weak(x.clone(), Formula::why_not(a.clone()), b(p.clone())), Process::Weak(x.clone(), Formula::why_not(a), b(q.clone()))),
            (Process::Contract(x.clone(), y.clone(), Name::new("c2"), b(p.clone())), Process::Contract(x, y, Name::new("c2"), b(q))),
        ];
        for (l, r) in pairs {
            prop_assert!(alpha_eq(&l, &r), "{} vs {}", print_process(&l), print_process(&r));
        }
    }

    #[test]
    fn alpha_is_transitive(p in process()) {
        let q = freshen(&p);
        let r = freshen(&q);
        prop_assert!(alpha_eq(&p, &r));
    }

    #[test]
    fn changing_a_free_name_breaks_alpha(p in process(), x in name()) {
        prop_assume!(p.is_free(&x));
        let q = substitute(&p, &Name::new("other"), &x);
        prop_assert!(!alpha_eq(&p, &q));
    }
}

#[test]
fn duality_is_an_involution_to_depth_two() {
    for a in enumerate_formulas(2, &Connective::ALL) {
        assert_eq!(dual(&dual(&a)), a);
    }
}

#[test]
fn enumerated_processes_round_trip() {
    let ctxs = [
        ctx_of([("x", Formula::One)]),
        ctx_of([("x", Formula::tensor(Formula::One, Formula::Bot))]),
        ctx_of([("x", Formula::with(Formula::Bot, Formula::One)), ("y", Formula::One)]),
        ctx_of([("x", Formula::of_course(Formula::One)), ("y", Formula::why_not(Formula::Bot))]),
    ];
    let mut n = 0;
    for c in &ctxs {
        for p in enumerate_processes(c, 5, System::Cp02) {
            let back = parse_process(&print_process(&p)).unwrap();
            assert!(alpha_eq(&back, &p), "{}", print_process(&p));
            n += 1;
        }
    }
    assert!(n > 0);
}
