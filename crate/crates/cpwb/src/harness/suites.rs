//! The property suites and their report.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use super::enumerate::{enumerate_formulas, Connective, Enumerator};
use crate::denotations::{bag_union, denote_set, obs_space, obs_space_size, show_tuple, ObsTuple, Observation};
use crate::obs_transform::{check_translation_theorem_with, l_obs, ObsMap, SetVerdict};
use crate::oracle::{adequacy_check, Configuration};
use crate::syntax::{dual, substitute, Formula, Name, Process};
use crate::transformers::{
    check_fill_lemma, check_transformer_context, check_transformer_correct, check_transformer_graph,
    context_denotation, transformer_context,
};
use crate::translation::{
    embed_ill, synchronizer, translate_context, translate_formula, translate_formula_dual, translate_formula_ill,
    translate_process, translate_with_out, TranslationConfig,
};
use crate::typing::{check, ctx_of, fill, show_ctx, Context, System, TypedContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Duality,
    Coherence,
    Adequacy,
    Synchronizer,
    Translation,
    FullAbstractionI,
    TransformerGraph,
    ContextTheorem,
    TransformerCorrect,
    FullAbstractionII,
    TransformerLemmas,
    Mix,
    Injectivity,
    WorkedExample,
}

impl Suite {
    pub const ALL: [Suite; 14] = [
        Suite::Duality,
        Suite::Coherence,
        Suite::Adequacy,
        Suite::Synchronizer,
        Suite::Translation,
        Suite::FullAbstractionI,
        Suite::TransformerGraph,
        Suite::ContextTheorem,
        Suite::TransformerCorrect,
        Suite::FullAbstractionII,
        Suite::TransformerLemmas,
        Suite::Mix,
        Suite::Injectivity,
        Suite::WorkedExample,
    ];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    /// Type depth for adequacy cut formulas and for the formula-indexed suites.
    pub formula_depth: usize,
    /// Type depth of the contexts whose processes form the pair families.
    pub family_depth: usize,
    pub process_size: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub connectives: Vec<Connective>,
    pub system: System,
    pub suites: Vec<Suite>,
    pub seed: u64,
    pub duality_depth: usize,
    pub duality_samples: usize,
    pub exponential_samples: usize,
    pub random_sets: usize,
    pub random_contexts: usize,
    pub obs_space_limit: usize,
    pub bag_limit: usize,
    pub observe_depth: usize,
    pub mix_size: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            formula_depth: 2,
            family_depth: 1,
            process_size: 5,
            k: 2,
            connectives: Connective::ADDITIVE_MULTIPLICATIVE.to_vec(),
            system: System::Cp02,
            suites: Suite::ALL.to_vec(),
            seed: 0x5eed,
            duality_depth: 4,
            duality_samples: 10_000,
            exponential_samples: 60,
            random_sets: 100,
            random_contexts: 10,
            obs_space_limit: 64,
            bag_limit: 3,
            observe_depth: 10_000,
            mix_size: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("inconsistent suite configuration: {0}")]
    Config(String),
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let exps = self.connectives.iter().any(|c| matches!(c, Connective::OfCourse | Connective::WhyNot));
        if exps && self.k > 2 {
            return Err(HarnessError::Config("exhaustive suites over exponential connectives need K <= 2".into()));
        }
        if self.k == 0 {
            return Err(HarnessError::Config("K must be at least 1".into()));
        }
        if self.process_size == 0 {
            return Err(HarnessError::Config("process size must be at least 1".into()));
        }
        if !self.connectives.contains(&Connective::One) || !self.connectives.contains(&Connective::Bot) {
            return Err(HarnessError::Config("the connective set must contain both units".into()));
        }
        Ok(())
    }

    fn units_only(&self) -> Vec<Formula> {
        vec![Formula::One, Formula::Bot]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub instances: usize,
    pub failures: Vec<String>,
    pub millis: u128,
    /// Checked only up to the replication bound.
    pub bounded: bool,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub suites: BTreeMap<String, SuiteReport>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.suites.values().all(|s| s.passed())
    }

    pub fn to_json(&self) -> Value {
        let mut m = serde_json::Map::new();
        for (name, s) in &self.suites {
            m.insert(
                name.clone(),
                json!({"instances": s.instances, "failures": s.failures, "millis": s.millis as u64, "bounded": s.bounded}),
            );
        }
        Value::Object(m)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, s) in &self.suites {
            writeln!(
                f,
                "{:<28} {:>7} instances  {:>4} failures  {:>7} ms{}",
                name,
                s.instances,
                s.failures.len(),
                s.millis,
                if s.bounded { "  (bounded)" } else { "" }
            )?;
            for fl in s.failures.iter().take(5) {
                writeln!(f, "    {}", fl)?;
            }
            if s.failures.len() > 5 {
                writeln!(f, "    ... {} more", s.failures.len() - 5)?;
            }
        }
        Ok(())
    }
}

type Entries = Vec<(String, SuiteReport)>;

/// Run a batch of checks in parallel; each returns a failure description or `None`.
fn tally<T: Sync, F>(items: &[T], f: F) -> (usize, Vec<String>)
where
    F: Fn(&T) -> Option<String> + Sync + Send,
{
    let fails: Vec<String> = items.par_iter().filter_map(f).collect();
    (items.len(), fails)
}

fn timed<F: FnOnce() -> (usize, Vec<String>)>(name: &str, bounded: bool, f: F) -> (String, SuiteReport) {
    let t = Instant::now();
    let (instances, failures) = f();
    (name.to_string(), SuiteReport { instances, failures, millis: t.elapsed().as_millis(), bounded })
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<Report, HarnessError> {
    run_suite_with(cfg, &l_obs)
}

/// As [`run_suite`], with the observation transform replaced; used to check that the
/// suites notice a wrong transform.
pub fn run_suite_with(cfg: &SuiteConfig, lobs: &ObsMap) -> Result<Report, HarnessError> {
    cfg.validate()?;
    let mut report = Report::default();
    let mut selected: Vec<Suite> = cfg.suites.clone();
    selected.sort();
    selected.dedup();
    for s in selected {
        let entries: Entries = match s {
            Suite::Duality => vec![duality(cfg)],
            Suite::Coherence => vec![coherence(cfg)],
            Suite::Adequacy => vec![adequacy(cfg)],
            Suite::Synchronizer => synchronizers(cfg),
            Suite::Translation => translation(cfg, lobs),
            Suite::FullAbstractionI => vec![full_abstraction(cfg, false)],
            Suite::TransformerGraph => vec![transformer_graph(cfg)],
            Suite::ContextTheorem => vec![context_theorem(cfg, lobs)],
            Suite::TransformerCorrect => transformer_correct(cfg),
            Suite::FullAbstractionII => vec![full_abstraction(cfg, true)],
            Suite::TransformerLemmas => transformer_lemmas(cfg),
            Suite::Mix => vec![mix_permutation(cfg)],
            Suite::Injectivity => injectivity(cfg, lobs),
            Suite::WorkedExample => vec![worked_example(cfg)],
        };
        report.suites.extend(entries);
    }
    Ok(report)
}

fn random_formula(rng: &mut ChaCha8Rng, depth: usize) -> Formula {
    if depth == 0 || rng.gen_range(0..4) == 0 {
        return if rng.gen_bool(0.5) { Formula::One } else { Formula::Bot };
    }
    let d = depth - 1;
    match rng.gen_range(0..6) {
        0 => Formula::tensor(random_formula(rng, d), random_formula(rng, d)),
        1 => Formula::par(random_formula(rng, d), random_formula(rng, d)),
        2 => Formula::plus(random_formula(rng, d), random_formula(rng, d)),
        3 => Formula::with(random_formula(rng, d), random_formula(rng, d)),
        4 => Formula::of_course(random_formula(rng, d)),
        _ => Formula::why_not(random_formula(rng, d)),
    }
}

/// Every formula to depth 2 over all connectives, then seeded samples up to the configured depth.
fn formula_corpus(cfg: &SuiteConfig) -> Vec<Formula> {
    let mut fs = enumerate_formulas(cfg.duality_depth.min(2), &Connective::ALL);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.duality_samples {
        fs.push(random_formula(&mut rng, cfg.duality_depth));
    }
    fs
}

fn duality(cfg: &SuiteConfig) -> (String, SuiteReport) {
    timed("duality", false, || {
        let fs = formula_corpus(cfg);
        tally(&fs, |a| if dual(&dual(a)) != *a { Some(format!("{}", a)) } else { None })
    })
}

fn coherence(cfg: &SuiteConfig) -> (String, SuiteReport) {
    timed("coherence", false, || {
        let fs = formula_corpus(cfg);
        let tc = TranslationConfig::default();
        tally(&fs, |a| {
            let lhs = translate_formula_dual(a);
            let rhs = dual(&embed_ill(&translate_formula_ill(a, &tc)));
            if lhs != rhs {
                Some(format!("{}: {} versus {}", a, lhs, rhs))
            } else {
                None
            }
        })
    })
}

fn proc_cfg(p: &Process, ctx: Context, sys: System) -> Result<Configuration, String> {
    check(p, &ctx, sys).map(Configuration::Proc).map_err(|e| e.to_string())
}

fn adequacy(cfg: &SuiteConfig) -> (String, SuiteReport) {
    timed("adequacy", false, || {
        let sys = cfg.system;
        let mut e = Enumerator::new(sys, cfg.units_only());
        let x = Name::new("x");
        let y = Name::new("y");
        let mut configs: Vec<(Process, Process, Option<Process>, Formula, Option<Formula>, bool)> = Vec::new();
        for a in enumerate_formulas(cfg.formula_depth, &cfg.connectives) {
            let ps = e.up_to(&ctx_of([("x", a.clone())]), cfg.process_size);
            let qs = e.up_to(&ctx_of([("x", dual(&a))]), cfg.process_size);
            for p in &ps {
                for q in &qs {
                    configs.push((p.clone(), q.clone(), None, a.clone(), None, false));
                }
            }
        }
        // one free name, closed by a further observable cut
        for a in enumerate_formulas(cfg.family_depth, &cfg.connectives) {
            for bty in [Formula::One, Formula::Bot] {
                let rs = e.up_to(&ctx_of([("y", dual(&bty))]), 3);
                let open = e.up_to(&ctx_of([("x", a.clone()), ("y", bty.clone())]), cfg.process_size);
                let closed = e.up_to(&ctx_of([("x", dual(&a))]), 3);
                if rs.is_empty() {
                    continue;
                }
                for (i, p) in open.iter().enumerate() {
                    for q in &closed {
                        // cycle through closing processes to keep the family linear in size
                        let r = &rs[i % rs.len()];
                        configs.push((p.clone(), q.clone(), Some(r.clone()), a.clone(), Some(bty.clone()), i % 2 == 1));
                    }
                }
            }
        }
        tally(&configs, |(p, q, r, a, bty, swap)| {
            let build = || -> Result<Configuration, String> {
                match (r, bty) {
                    (None, _) => Ok(Configuration::Cut(
                        x.clone(),
                        a.clone(),
                        Box::new(proc_cfg(p, ctx_of([("x", a.clone())]), sys)?),
                        Box::new(proc_cfg(q, ctx_of([("x", dual(a))]), sys)?),
                    )),
                    (Some(r), Some(bty)) => {
                        let pc = proc_cfg(p, ctx_of([("x", a.clone()), ("y", bty.clone())]), sys)?;
                        let qc = proc_cfg(q, ctx_of([("x", dual(a))]), sys)?;
                        let inner = if *swap {
                            Configuration::Cut(x.clone(), dual(a), Box::new(qc), Box::new(pc))
                        } else {
                            Configuration::Cut(x.clone(), a.clone(), Box::new(pc), Box::new(qc))
                        };
                        let rc = proc_cfg(r, ctx_of([("y", dual(bty))]), sys)?;
                        Ok(Configuration::Cut(y.clone(), bty.clone(), Box::new(inner), Box::new(rc)))
                    }
                    _ => unreachable!(),
                }
            };
            let c = match build() {
                Ok(c) => c,
                Err(e) => return Some(e),
            };
            match adequacy_check(&c, cfg.k, cfg.observe_depth) {
                Ok(v) if v.holds => None,
                Ok(v) => Some(format!(
                    "{:?}: observed {:?} denoted {:?}",
                    c,
                    v.observed.iter().map(show_tuple).collect::<Vec<_>>(),
                    v.denoted.iter().map(show_tuple).collect::<Vec<_>>()
                )),
                Err(e) => Some(format!("{:?}: {}", c, e)),
            }
        })
    })
}

fn sync_graph(a: &Formula, k: usize) -> BTreeSet<ObsTuple> {
    obs_space(a, k)
        .into_iter()
        .map(|x| {
            let mut t = ObsTuple::new();
            t.insert(Name::new("z"), Observation::pair(l_obs(a, &x).expect("sorted"), Observation::Star));
            t.insert(Name::new("w"), Observation::pair(l_obs(&dual(a), &x).expect("sorted"), Observation::Star));
            t.insert(Name::new("s"), Observation::Star);
            t
        })
        .collect()
}

fn sync_ctx(a: &Formula) -> Context {
    ctx_of([
        ("z", Formula::tensor(translate_formula(a), Formula::Bot)),
        ("w", Formula::tensor(translate_formula(&dual(a)), Formula::Bot)),
        ("s", Formula::One),
    ])
}

/// Denotational contract of one synchronizer, checked in plain CP.
pub fn check_synchronizer(a: &Formula, k: usize) -> Result<SetVerdict, String> {
    let p = synchronizer(a, &Name::new("z"), &Name::new("w"), &Name::new("s"));
    let d = check(&p, &sync_ctx(a), System::Cp).map_err(|e| format!("{}: {}", a, e))?;
    Ok(SetVerdict::compare(&sync_graph(a, k), &denote_set(&d, k)))
}

fn synchronizers(cfg: &SuiteConfig) -> Entries {
    let one = Formula::One;
    let bot = Formula::Bot;
    let exact = vec![
        one.clone(),
        bot.clone(),
        Formula::tensor(one.clone(), bot.clone()),
        Formula::par(bot.clone(), one.clone()),
        Formula::plus(one.clone(), one.clone()),
        Formula::with(one.clone(), bot.clone()),
    ];
    let bounded = vec![Formula::of_course(one.clone()), Formula::why_not(bot.clone())];
    let check_all = |fs: &[Formula], k: usize| {
        tally(fs, |a| match check_synchronizer(a, k) {
            Ok(v) if v.holds => None,
            Ok(v) => Some(format!("{}: {}", a, v.describe())),
            Err(e) => Some(e),
        })
    };
    vec![
        timed("synchronizer", false, || {
            let (n, mut fails) = check_all(&exact, cfg.k);
            // the base case value, written out
            let p = synchronizer(&one, &Name::new("z"), &Name::new("w"), &Name::new("s"));
            let s = Observation::Star;
            let mut t = ObsTuple::new();
            t.insert(Name::new("z"), Observation::pair(Observation::pair(s.clone(), s.clone()), s.clone()));
            t.insert(Name::new("w"), Observation::pair(s.clone(), s.clone()));
            t.insert(Name::new("s"), s);
            match check(&p, &sync_ctx(&one), System::Cp) {
                Ok(d) if denote_set(&d, cfg.k) == [t].into_iter().collect() => {}
                Ok(d) => fails.push(format!("base case: {:?}", denote_set(&d, cfg.k))),
                Err(e) => fails.push(format!("base case: {}", e)),
            }
            (n + 1, fails)
        }),
        timed("synchronizer-exponential", true, || check_all(&bounded, 2)),
    ]
}

/// Single-name contexts over the family depth, pairs of units, and the empty context.
fn family_contexts(cfg: &SuiteConfig) -> Vec<Context> {
    let mut v = vec![Context::new()];
    for a in enumerate_formulas(cfg.family_depth, &cfg.connectives) {
        v.push(ctx_of([("x", a)]));
    }
    for a in [Formula::One, Formula::Bot] {
        for bb in [Formula::One, Formula::Bot] {
            v.push(ctx_of([("x", a.clone()), ("y", bb)]));
        }
    }
    v
}

fn families(cfg: &SuiteConfig) -> Vec<(Context, Vec<Process>)> {
    let mut e = Enumerator::new(cfg.system, cfg.units_only());
    family_contexts(cfg)
        .into_iter()
        .map(|c| {
            let ps = e.up_to(&c, cfg.process_size);
            (c, ps)
        })
        .filter(|(_, ps)| !ps.is_empty())
        .collect()
}

/// Seeded sample of processes that use exponentials, typed in CP+Mix₀.
fn exponential_sample(cfg: &SuiteConfig) -> Vec<(Context, Process)> {
    let one = Formula::One;
    let bot = Formula::Bot;
    let oc = Formula::of_course(one.clone());
    let wn = Formula::why_not(bot.clone());
    let mut e = Enumerator::new(System::Cp0, vec![one.clone(), bot.clone(), oc.clone()]);
    let ctxs = vec![
        ctx_of([("x", oc.clone())]),
        ctx_of([("x", wn.clone())]),
        ctx_of([("x", wn.clone()), ("y", one.clone())]),
        ctx_of([("x", wn.clone()), ("y", oc.clone())]),
        ctx_of([("x", Formula::of_course(Formula::plus(one.clone(), one.clone())))]),
        ctx_of([("x", Formula::why_not(Formula::with(bot.clone(), bot.clone())))]),
        ctx_of([("x", Formula::par(wn.clone(), one.clone()))]),
    ];
    let mut pool = Vec::new();
    for c in ctxs {
        for p in e.up_to(&c, cfg.process_size + 1) {
            if p.has_exponentials() {
                pool.push((c.clone(), p));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xe4);
    pool.shuffle(&mut rng);
    pool.truncate(cfg.exponential_samples);
    pool
}

fn family_items(cfg: &SuiteConfig) -> Vec<(Context, Process)> {
    families(cfg).into_iter().flat_map(|(c, ps)| ps.into_iter().map(move |p| (c.clone(), p))).collect()
}

fn translation(cfg: &SuiteConfig, lobs: &ObsMap) -> Entries {
    let run = |items: &[(Context, Process)], sys: System, k: usize| {
        tally(items, |(c, p)| match check_translation_theorem_with(p, c, sys, k, lobs) {
            Ok(v) if v.holds => None,
            Ok(v) => Some(format!("{} at {}: {}", crate::text::print_process(p), show_ctx(c), v.describe())),
            Err(e) => Some(format!("{} at {}: {}", crate::text::print_process(p), show_ctx(c), e)),
        })
    };
    vec![
        timed("translation", false, || run(&family_items(cfg), cfg.system, cfg.k)),
        timed("translation-exponential", true, || run(&exponential_sample(cfg), System::Cp0, 2)),
    ]
}

fn transformer_correct(cfg: &SuiteConfig) -> Entries {
    let run = |items: &[(Context, Process)], sys: System, k: usize| {
        tally(items, |(c, p)| match check_transformer_correct(p, c, sys, k) {
            Ok(v) if v.holds => None,
            Ok(v) => Some(format!("{} at {}: {}", crate::text::print_process(p), show_ctx(c), v.describe())),
            Err(e) => Some(format!("{} at {}: {}", crate::text::print_process(p), show_ctx(c), e)),
        })
    };
    vec![
        timed("transformer-correct", false, || run(&family_items(cfg), cfg.system, cfg.k)),
        timed("transformer-correct-exponential", true, || run(&exponential_sample(cfg), System::Cp0, 2)),
    ]
}

/// Compare equivalence before and after the translation (or the transformer context) on
/// every unordered pair of each family.
fn full_abstraction(cfg: &SuiteConfig, transformers: bool) -> (String, SuiteReport) {
    let name = if transformers { "full-abstraction-ii" } else { "full-abstraction-i" };
    timed(name, false, || {
        let mut pairs = 0;
        let mut fails = Vec::new();
        let z = Name::new("z");
        for (c, ps) in families(cfg) {
            let kctx = if transformers { check_transformer_context(&c, &z).ok().map(|(k, _)| k) } else { None };
            let sems: Vec<Result<(BTreeSet<ObsTuple>, BTreeSet<ObsTuple>), String>> = ps
                .par_iter()
                .map(|p| {
                    let d = check(p, &c, cfg.system).map_err(|e| e.to_string())?;
                    let src = denote_set(&d, cfg.k);
                    let tgt = if let Some(kc) = &kctx {
                        let fd = check(&fill(kc, p), &translate_context(&c, &z), System::Cp02).map_err(|e| e.to_string())?;
                        denote_set(&fd, cfg.k)
                    } else {
                        let ld = check(&translate_process(&d), &translate_context(&c, &Name::new("w")), System::Cp02)
                            .map_err(|e| e.to_string())?;
                        denote_set(&ld, cfg.k)
                    };
                    Ok((src, tgt))
                })
                .collect();
            for i in 0..ps.len() {
                for j in (i + 1)..ps.len() {
                    pairs += 1;
                    match (&sems[i], &sems[j]) {
                        (Ok((s1, t1)), Ok((s2, t2))) => {
                            let se = s1 == s2;
                            let te = t1 == t2;
                            if se != te {
                                fails.push(format!(
                                    "{} / {} at {}: source {} target {}",
                                    crate::text::print_process(&ps[i]),
                                    crate::text::print_process(&ps[j]),
                                    show_ctx(&c),
                                    se,
                                    te
                                ));
                            }
                        }
                        (Err(e), _) | (_, Err(e)) => fails.push(e.clone()),
                    }
                }
            }
        }
        (pairs, fails)
    })
}

fn transformer_graph(cfg: &SuiteConfig) -> (String, SuiteReport) {
    let fs: Vec<Formula> = enumerate_formulas(cfg.formula_depth, &Connective::ALL)
        .into_iter()
        .filter(|a| obs_space_size(a, cfg.k) <= cfg.obs_space_limit)
        .collect();
    let bounded = fs.iter().any(|a| a.has_exponentials());
    timed("transformer-graph", bounded, || {
        tally(&fs, |a| match check_transformer_graph(a, cfg.k) {
            Ok(v) if v.holds => None,
            Ok(v) => Some(format!("{}: {}", a, v.describe())),
            Err(e) => Some(format!("{}: {}", a, e)),
        })
    })
}

fn product_space(ctx: &Context, k: usize) -> Vec<ObsTuple> {
    let mut out = vec![ObsTuple::new()];
    for (x, a) in ctx {
        let space = obs_space(a, k);
        out = out
            .into_iter()
            .flat_map(|t| {
                space.iter().map(move |o| {
                    let mut t2 = t.clone();
                    t2.insert(x.clone(), o.clone());
                    t2
                })
            })
            .collect();
    }
    out
}

fn context_theorem(cfg: &SuiteConfig, lobs: &ObsMap) -> (String, SuiteReport) {
    timed("context-theorem", false, || {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xc7);
        let fs = enumerate_formulas(cfg.family_depth, &cfg.connectives);
        let mut all_ctxs = Vec::new();
        for a in &fs {
            for bb in &fs {
                all_ctxs.push(ctx_of([("x", a.clone()), ("y", bb.clone())]));
            }
        }
        all_ctxs.shuffle(&mut rng);
        all_ctxs.truncate(cfg.random_contexts.max(1));
        let per = cfg.random_sets.div_ceil(all_ctxs.len());
        let mut items = Vec::new();
        for c in &all_ctxs {
            let space = product_space(c, cfg.k);
            for _ in 0..per {
                let xs: BTreeSet<ObsTuple> = space.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
                items.push((c.clone(), xs));
            }
        }
        items.truncate(cfg.random_sets);
        let z = Name::new("z");
        tally(&items, |(c, xs)| {
            let expected: Result<BTreeSet<ObsTuple>, _> =
                xs.iter().map(|t| crate::obs_transform::l_ctx_with(c, t, &z, lobs)).collect();
            let expected = match expected {
                Ok(x) => x,
                Err(e) => return Some(format!("{}: {}", show_ctx(c), e)),
            };
            match check_transformer_context(c, &z) {
                Ok((_, cd)) => {
                    let actual = context_denotation(&cd, xs, cfg.k);
                    let v = SetVerdict::compare(&expected, &actual);
                    if v.holds {
                        None
                    } else {
                        Some(format!("{} with {} tuples: {}", show_ctx(c), xs.len(), v.describe()))
                    }
                }
                Err(e) => Some(format!("{}: {}", show_ctx(c), e)),
            }
        })
    })
}

fn transformer_lemmas(cfg: &SuiteConfig) -> Entries {
    let fwd = timed("forwarder-lemma", false, || {
        let c = ctx_of([("x", Formula::One), ("y", Formula::Bot)]);
        let a = check(&Process::Fwd(Name::new("x"), Name::new("y")), &c, System::Cp02);
        let bq = Process::Par(
            Box::new(Process::EmptyOut(Name::new("x"))),
            Box::new(Process::EmptyIn(Name::new("y"), Box::new(Process::Inact))),
        );
        let b = check(&bq, &c, System::Cp02);
        let ok = matches!((&a, &b), (Ok(a), Ok(b)) if denote_set(a, cfg.k) == denote_set(b, cfg.k));
        (1, if ok { vec![] } else { vec!["forwarder and x[] | y().0 differ".into()] })
    });
    let fill_lemma = timed("fill-lemma", false, || {
        let z = Name::new("z");
        let items = family_items(cfg);
        tally(&items, |(c, p)| {
            let (k, cd) = match check_transformer_context(c, &z) {
                Ok(x) => x,
                Err(e) => return Some(e.to_string()),
            };
            match check_fill_lemma(&k, &cd, p, c, cfg.system, cfg.k) {
                Ok(v) if v.holds => None,
                Ok(v) => Some(format!("{} at {}: {}", crate::text::print_process(p), show_ctx(c), v.describe())),
                Err(e) => Some(e.to_string()),
            }
        })
    });
    let order = timed("cut-order", false, || {
        // reversing the order of the transformer cuts does not change the fill
        let z = Name::new("z");
        let items: Vec<(Context, Process)> = family_items(cfg).into_iter().filter(|(c, _)| c.len() == 2).collect();
        tally(&items, |(c, p)| {
            let fwd = transformer_context(c, &z);
            let mut rev = TypedContext::Hole;
            for (x, a) in c.iter().rev() {
                rev = TypedContext::Cut(x.clone(), a.clone(), Box::new(rev), crate::transformers::transformer(a, x, &x.primed()));
            }
            let rev = TypedContext::Mix(Box::new(rev), Process::EmptyOut(z.clone()));
            let tc = translate_context(c, &z);
            match (check(&fill(&fwd, p), &tc, System::Cp02), check(&fill(&rev, p), &tc, System::Cp02)) {
                (Ok(a), Ok(b)) if denote_set(&a, cfg.k) == denote_set(&b, cfg.k) => None,
                (Ok(_), Ok(_)) => Some(format!("{} at {}", crate::text::print_process(p), show_ctx(c))),
                (Err(e), _) | (_, Err(e)) => Some(e.to_string()),
            }
        })
    });
    vec![fwd, fill_lemma, order, transformer_equivalences(cfg), client_transformer(cfg)]
}

/// `T⟨P⟩` with closing name `z`.
fn tp(p: &Process, ctx: &Context, z: &str) -> Process {
    fill(&transformer_context(ctx, &Name::new(z)), p)
}

fn with_name(ctx: &Context, x: &str, a: &Formula) -> Context {
    let mut c = ctx.clone();
    c.insert(Name::new(x), a.clone());
    c
}

/// The transformer context commuted past each kind of prefix: `(lhs, rhs, ctx of both)`.
fn transformer_equivalences(cfg: &SuiteConfig) -> (String, SuiteReport) {
    timed("transformer-equivalences", true, || {
        let n = Name::new;
        let bx = |p: Process| Box::new(p);
        let par = |l: Process, r: Process| Process::Par(Box::new(l), Box::new(r));
        let halt = |x: &str| Process::EmptyIn(n(x), Box::new(Process::Inact));
        let units = [Formula::One, Formula::Bot];
        let deltas = [Context::new(), ctx_of([("a", Formula::One)])];
        let size = cfg.process_size.min(4);
        let take = 4;
        let mut e = Enumerator::new(System::Cp02, cfg.units_only());
        let mut cases: Vec<(Process, Process, Context)> = Vec::new();
        let target = |c: &Context, closing: &str| translate_context(c, &n(closing));
        for d in &deltas {
            for a in &units {
                for bb in &units {
                    // input
                    let src = with_name(d, "x", &Formula::par(a.clone(), bb.clone()));
                    for p in e.up_to(&with_name(&with_name(d, "y", a), "x", bb), size).iter().take(take) {
                        let inner = tp(p, &with_name(&with_name(d, "y", a), "x", bb), "z");
                        let lhs = Process::In(n("x'"), n("y'"), bx(inner));
                        let rhs = tp(&Process::In(n("x"), n("y"), bx(p.clone())), &src, "z");
                        cases.push((lhs, rhs, target(&src, "z")));
                    }
                    // select
                    let sum = Formula::plus(a.clone(), bb.clone());
                    let src = with_name(d, "y", &sum);
                    for (i, side) in [(1u8, a), (2u8, bb)] {
                        let pc = with_name(d, "y", side);
                        for p in e.up_to(&pc, size).iter().take(take) {
                            let inner = Process::In(n("m"), n("y'"), bx(tp(p, &pc, "m")));
                            let lhs = par(Process::Out(n("m"), n("y'"), bx(Process::Select(n("m"), i, bx(inner))), bx(halt("y'"))), Process::EmptyOut(n("k")));
                            let rhs = tp(&Process::Select(n("y"), i, bx(p.clone())), &src, "k");
                            cases.push((lhs, rhs, target(&src, "k")));
                        }
                    }
                    // case
                    let src = with_name(d, "y", &Formula::with(a.clone(), bb.clone()));
                    let (c1, c2) = (with_name(d, "y", a), with_name(d, "y", bb));
                    let (p1s, p2s) = (e.up_to(&c1, size), e.up_to(&c2, size));
                    for p1 in p1s.iter().take(3) {
                        for p2 in p2s.iter().take(3) {
                            let lhs = Process::Case(n("y'"), bx(tp(p1, &c1, "z")), bx(tp(p2, &c2, "z")));
                            let rhs = tp(&Process::Case(n("y"), bx(p1.clone()), bx(p2.clone())), &src, "z");
                            cases.push((lhs, rhs, target(&src, "z")));
                        }
                    }
                    // output: Δ goes with the sent name, nothing with the continuation
                    let src = with_name(d, "x", &Formula::tensor(a.clone(), bb.clone()));
                    let (c1, c2) = (with_name(d, "y", a), ctx_of([("x", bb.clone())]));
                    let (p1s, p2s) = (e.up_to(&c1, size), e.up_to(&c2, size));
                    for p1 in p1s.iter().take(3) {
                        for p2 in p2s.iter().take(3) {
                            let left = Process::In(n("k1"), n("y'"), bx(tp(p1, &c1, "k1")));
                            let right = Process::In(n("k2"), n("x'"), bx(tp(p2, &c2, "k2")));
                            let pair = Process::Out(n("k1"), n("k2"), bx(left), bx(right));
                            let lhs = par(Process::Out(n("k2"), n("x'"), bx(pair), bx(halt("x'"))), Process::EmptyOut(n("w")));
                            let rhs = tp(&Process::Out(n("y"), n("x"), bx(p1.clone()), bx(p2.clone())), &src, "w");
                            cases.push((lhs, rhs, target(&src, "w")));
                        }
                    }
                }
            }
        }
        // exponentials
        let wn_deltas = [Context::new(), ctx_of([("a", Formula::why_not(Formula::Bot))])];
        for a in &units {
            for d in &deltas {
                let src = with_name(d, "x", &Formula::why_not(a.clone()));
                let pc = with_name(d, "y", a);
                for p in e.up_to(&pc, size).iter().take(take) {
                    let inner = Process::In(n("v"), n("y'"), bx(tp(p, &pc, "v")));
                    let body = Process::Out(n("v"), n("m"), bx(inner), bx(halt("m")));
                    let lhs = par(Process::Client(n("x'"), n("m"), bx(body)), Process::EmptyOut(n("k")));
                    let rhs = tp(&Process::Client(n("x"), n("y"), bx(p.clone())), &src, "k");
                    cases.push((lhs, rhs, target(&src, "k")));
                }
            }
            for d in &wn_deltas {
                let src = with_name(d, "x", &Formula::of_course(a.clone()));
                let pc = with_name(d, "y", a);
                for p in e.up_to(&pc, size).iter().take(take) {
                    let inner = Process::In(n("u"), n("y'"), bx(tp(p, &pc, "u")));
                    let server = Process::Server(n("v"), n("u"), bx(inner));
                    let lhs = par(Process::Out(n("v"), n("x'"), bx(server), bx(halt("x'"))), Process::EmptyOut(n("k")));
                    let rhs = tp(&Process::Server(n("x"), n("y"), bx(p.clone())), &src, "k");
                    cases.push((lhs, rhs, target(&src, "k")));
                }
            }
        }
        let k = cfg.k.min(2);
        tally(&cases, |(l, r, c)| match (check(l, c, System::Cp02), check(r, c, System::Cp02)) {
            (Ok(a), Ok(b)) if denote_set(&a, k) == denote_set(&b, k) => None,
            (Ok(_), Ok(_)) => Some(format!("{} versus {}", crate::text::print_process(l), crate::text::print_process(r))),
            (Err(e), _) | (_, Err(e)) => Some(format!("{} versus {}: {}", crate::text::print_process(l), crate::text::print_process(r), e)),
        })
    })
}

/// `⟦T(?A)⟧` as bags of pairs drawn from `⟦T(A)⟧`.
fn client_transformer(cfg: &SuiteConfig) -> (String, SuiteReport) {
    let fs: Vec<Formula> = enumerate_formulas(cfg.family_depth, &Connective::ALL)
        .into_iter()
        .filter(|a| obs_space_size(&Formula::why_not(a.clone()), 2) <= cfg.obs_space_limit)
        .collect();
    timed("client-transformer", true, || {
        let k = cfg.k.min(2);
        let (x, x2, y, y2) = (Name::new("x"), Name::new("x'"), Name::new("y"), Name::new("y'"));
        tally(&fs, |a| {
            let inner_ctx: Context = [(y.clone(), dual(a)), (y2.clone(), translate_formula_dual(a))].into_iter().collect();
            let wn = Formula::why_not(a.clone());
            let outer_ctx: Context = [(x.clone(), dual(&wn)), (x2.clone(), translate_formula_dual(&wn))].into_iter().collect();
            let inner = match check(&crate::transformers::transformer(a, &y, &y2), &inner_ctx, System::Cp02) {
                Ok(d) => denote_set(&d, k),
                Err(e) => return Some(format!("{}: {}", a, e)),
            };
            let outer = match check(&crate::transformers::transformer(&wn, &x, &x2), &outer_ctx, System::Cp02) {
                Ok(d) => denote_set(&d, k),
                Err(e) => return Some(format!("{}: {}", wn, e)),
            };
            let graph: Vec<(Observation, Observation)> = inner.iter().map(|t| (t[&y].clone(), t[&y2].clone())).collect();
            let expected: BTreeSet<ObsTuple> = crate::denotations::multisets(&graph, k)
                .into_iter()
                .map(|m| {
                    let mut t = ObsTuple::new();
                    t.insert(x.clone(), Observation::bag(m.iter().map(|(l, _)| l.clone()).collect()));
                    let wrapped = m.iter().map(|(_, r)| Observation::pair(Observation::pair(r.clone(), Observation::Star), Observation::Star));
                    t.insert(x2.clone(), Observation::bag(wrapped.collect()));
                    t
                })
                .filter(|t| t.values().all(|o| o.max_bag() <= k))
                .collect();
            let v = SetVerdict::compare(&expected, &outer);
            if v.holds {
                None
            } else {
                Some(format!("{}: {}", wn, v.describe()))
            }
        })
    })
}

fn mix_permutation(cfg: &SuiteConfig) -> (String, SuiteReport) {
    timed("mix-permutation", false, || {
        let mut e = Enumerator::new(System::Cp02, cfg.units_only());
        let s = cfg.mix_size;
        let units = [Formula::One, Formula::Bot];
        let n = |x: &str| Name::new(x);
        // (lhs, rhs, context)
        let mut cases: Vec<(Process, Process, Context)> = Vec::new();
        let rs = e.up_to(&ctx_of([("r", Formula::One)]), s);
        for a1 in &units {
            for a2 in &units {
                let ps = e.up_to(&ctx_of([("x", a1.clone())]), s);
                let qs = e.up_to(&ctx_of([("x", a2.clone())]), s);
                for p in ps.iter().take(3) {
                    for q in qs.iter().take(3) {
                        for r in rs.iter().take(3) {
                            let lhs = Process::Par(Box::new(Process::Case(n("x"), Box::new(p.clone()), Box::new(q.clone()))), Box::new(r.clone()));
                            let rhs = Process::Case(
                                n("x"),
                                Box::new(Process::Par(Box::new(p.clone()), Box::new(r.clone()))),
                                Box::new(Process::Par(Box::new(q.clone()), Box::new(r.clone()))),
                            );
                            cases.push((lhs, rhs, ctx_of([("x", Formula::with(a1.clone(), a2.clone())), ("r", Formula::One)])));
                        }
                    }
                }
            }
        }
        for a in &units {
            let ps = e.up_to(&ctx_of([("x", a.clone()), ("y", Formula::One)]), s);
            let qs = e.up_to(&ctx_of([("x", dual(a))]), s);
            for p in ps.iter().take(4) {
                for q in qs.iter().take(4) {
                    for r in rs.iter().take(3) {
                        let cut = |l: Process, rr: Process| Process::Cut(n("x"), a.clone(), Box::new(l), Box::new(rr));
                        let par = |l: &Process, rr: &Process| Process::Par(Box::new(l.clone()), Box::new(rr.clone()));
                        let c = ctx_of([("y", Formula::One), ("r", Formula::One)]);
                        let base = par(&cut(p.clone(), q.clone()), r);
                        cases.push((base.clone(), cut(p.clone(), par(q, r)), c.clone()));
                        cases.push((base, cut(par(p, r), q.clone()), c));
                    }
                }
            }
        }
        for a in &units {
            for bb in &units {
                let ps = e.up_to(&ctx_of([("y", a.clone())]), s);
                let qs = e.up_to(&ctx_of([("x", bb.clone())]), s);
                for p in ps.iter().take(3) {
                    for q in qs.iter().take(3) {
                        for r in rs.iter().take(3) {
                            let lhs = Process::Out(
                                n("y"),
                                n("x"),
                                Box::new(p.clone()),
                                Box::new(Process::Par(Box::new(q.clone()), Box::new(r.clone()))),
                            );
                            let rhs = Process::Par(
                                Box::new(Process::Out(n("y"), n("x"), Box::new(p.clone()), Box::new(q.clone()))),
                                Box::new(r.clone()),
                            );
                            cases.push((lhs, rhs, ctx_of([("x", Formula::tensor(a.clone(), bb.clone())), ("r", Formula::One)])));
                        }
                    }
                }
            }
        }
        tally(&cases, |(l, r, c)| match (check(l, c, System::Cp02), check(r, c, System::Cp02)) {
            (Ok(a), Ok(b)) if denote_set(&a, cfg.k) == denote_set(&b, cfg.k) => None,
            (Ok(_), Ok(_)) => Some(format!("{} versus {}", crate::text::print_process(l), crate::text::print_process(r))),
            (Err(e), _) | (_, Err(e)) => Some(e.to_string()),
        })
    })
}

fn injectivity(cfg: &SuiteConfig, lobs: &ObsMap) -> Entries {
    let bl = cfg.bag_limit;
    let fs: Vec<Formula> = enumerate_formulas(cfg.formula_depth, &Connective::ALL)
        .into_iter()
        .filter(|a| obs_space_size(a, bl) <= cfg.obs_space_limit)
        .collect();
    let inj = timed("injectivity", true, || {
        tally(&fs, |a| {
            let space = obs_space(a, bl);
            let target = translate_formula_dual(a);
            let mut image = BTreeSet::new();
            for o in &space {
                match lobs(a, o) {
                    Ok(v) => {
                        if !v.sorted_at(&target) {
                            return Some(format!("{}: {} lands outside {}", a, o, target));
                        }
                        image.insert(v);
                    }
                    Err(e) => return Some(e.to_string()),
                }
            }
            if image.len() != space.len() {
                Some(format!("{}: {} observations, {} images", a, space.len(), image.len()))
            } else {
                None
            }
        })
    });
    let hom = timed("bag-homomorphism", true, || {
        let ws: Vec<Formula> = fs.iter().filter(|a| a.is_why_not()).cloned().collect();
        tally(&ws, |a| {
            let space = obs_space(a, bl);
            for x in &space {
                for y in &space {
                    let u = bag_union(x, y);
                    if u.max_bag() > bl {
                        continue;
                    }
                    let lhs = lobs(a, &u);
                    let rhs = lobs(a, x).and_then(|lx| lobs(a, y).map(|ly| bag_union(&lx, &ly)));
                    if lhs != rhs {
                        return Some(format!("{}: {} and {}", a, x, y));
                    }
                }
            }
            None
        })
    });
    vec![inj, hom]
}

/// `L(new x:1 (x[] | x().y[]))` against `L(y[]){s/z}`.
pub fn worked_example_holds(k: usize) -> Result<bool, String> {
    let y1 = ctx_of([("y", Formula::One)]);
    let p = Process::Cut(
        Name::new("x"),
        Formula::One,
        Box::new(Process::EmptyOut(Name::new("x"))),
        Box::new(Process::EmptyIn(Name::new("x"), Box::new(Process::EmptyOut(Name::new("y"))))),
    );
    let q = Process::EmptyOut(Name::new("y"));
    let s = Name::new("s");
    let z = Name::new("z");
    let dp = check(&p, &y1, System::Cp).map_err(|e| e.to_string())?;
    let dq = check(&q, &y1, System::Cp).map_err(|e| e.to_string())?;
    let lp = translate_with_out(&dp, &s);
    let lq = substitute(&translate_with_out(&dq, &z), &s, &z);
    let tc = translate_context(&y1, &s);
    let a = check(&lp, &tc, System::Cp).map_err(|e| e.to_string())?;
    let b = check(&lq, &tc, System::Cp).map_err(|e| e.to_string())?;
    Ok(denote_set(&a, k) == denote_set(&b, k))
}

fn worked_example(cfg: &SuiteConfig) -> (String, SuiteReport) {
    timed("worked-example", false, || match worked_example_holds(cfg.k) {
        Ok(true) => (1, vec![]),
        Ok(false) => (1, vec!["denotations differ".into()]),
        Err(e) => (1, vec![e]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let mut c = SuiteConfig::default();
        assert!(c.validate().is_ok());
        c.connectives.push(Connective::OfCourse);
        c.k = 3;
        assert!(matches!(c.validate(), Err(HarnessError::Config(_))));
    }

    #[test]
    fn config_round_trips_through_json() {
        let c = SuiteConfig::default();
        let s = serde_json::to_string(&c).unwrap();
        let back: SuiteConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        let partial: SuiteConfig = serde_json::from_str(r#"{"suites": ["duality"], "K": 1}"#).unwrap();
        assert_eq!(partial.suites, vec![Suite::Duality]);
        assert_eq!(partial.k, 1);
    }

    #[test]
    fn small_run() {
        let cfg = SuiteConfig {
            suites: vec![Suite::Duality, Suite::WorkedExample, Suite::Synchronizer],
            duality_samples: 100,
            ..SuiteConfig::default()
        };
        let r = run_suite(&cfg).unwrap();
        assert!(r.passed(), "{}", r);
        assert_eq!(r.suites["duality"].instances, 1982 + 100);
        let j = r.to_json();
        assert!(j["worked-example"]["failures"].as_array().unwrap().is_empty());
    }

    #[test]
    fn swapped_tags_are_noticed() {
        let mutant = |a: &Formula, o: &Observation| -> Result<Observation, crate::obs_transform::TransformError> {
            let v = l_obs(a, o)?;
            fn swap(o: &Observation) -> Observation {
                match o {
                    Observation::Tag(i, x) => Observation::tag(3 - i, swap(x)),
                    Observation::Pair(x, y) => Observation::pair(swap(x), swap(y)),
                    Observation::Bag(xs) => Observation::bag(xs.iter().map(swap).collect()),
                    Observation::Star => Observation::Star,
                }
            }
            Ok(swap(&v))
        };
        let cfg = SuiteConfig { suites: vec![Suite::Translation], process_size: 3, ..SuiteConfig::default() };
        let r = run_suite_with(&cfg, &mutant).unwrap();
        assert!(!r.suites["translation"].failures.is_empty());
    }
}
