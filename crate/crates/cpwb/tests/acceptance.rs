//! The twelve acceptance criteria, each run through the suite runner with the default config.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use cpwb::harness::{run_suite, Report, Suite, SuiteConfig};

struct Criterion {
    number: usize,
    title: &'static str,
    suites: &'static [Suite],
    /// Report entries with their minimum instance counts.
    entries: &'static [(&'static str, usize)],
    limit: Duration,
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

const CRITERIA: [Criterion; 12] = [
    Criterion { number: 1, title: "duality involution", suites: &[Suite::Duality], entries: &[("duality", 10_000)], limit: secs(1) },
    Criterion { number: 2, title: "adequacy", suites: &[Suite::Adequacy], entries: &[("adequacy", 500)], limit: secs(120) },
    Criterion {
        number: 3,
        title: "synchronizer characterization",
        suites: &[Suite::Synchronizer],
        entries: &[("synchronizer", 7), ("synchronizer-exponential", 2)],
        limit: secs(30),
    },
    Criterion {
        number: 4,
        title: "translation theorem",
        suites: &[Suite::Translation],
        entries: &[("translation", 1), ("translation-exponential", 50)],
        limit: secs(180),
    },
    Criterion {
        number: 5,
        title: "full abstraction I",
        suites: &[Suite::FullAbstractionI],
        entries: &[("full-abstraction-i", 1_000)],
        limit: secs(300),
    },
    Criterion {
        number: 6,
        title: "transformer graph lemma",
        suites: &[Suite::TransformerGraph],
        entries: &[("transformer-graph", 1)],
        limit: secs(30),
    },
    Criterion {
        number: 7,
        title: "context-denotation theorem",
        suites: &[Suite::ContextTheorem],
        entries: &[("context-theorem", 100)],
        limit: secs(60),
    },
    Criterion {
        number: 8,
        title: "transformer correctness",
        suites: &[Suite::TransformerCorrect],
        entries: &[("transformer-correct", 1), ("transformer-correct-exponential", 50)],
        limit: secs(180),
    },
    Criterion {
        number: 9,
        title: "full abstraction II",
        suites: &[Suite::FullAbstractionII],
        entries: &[("full-abstraction-ii", 1_000)],
        limit: secs(300),
    },
    Criterion { number: 10, title: "mix permutation", suites: &[Suite::Mix], entries: &[("mix-permutation", 100)], limit: secs(60) },
    Criterion {
        number: 11,
        title: "injectivity and bag homomorphism",
        suites: &[Suite::Injectivity],
        entries: &[("injectivity", 1), ("bag-homomorphism", 1)],
        limit: secs(10),
    },
    Criterion {
        number: 12,
        title: "worked example",
        suites: &[Suite::WorkedExample],
        entries: &[("worked-example", 1)],
        limit: secs(1),
    },
];

fn judge(c: &Criterion, report: &Report, elapsed: Duration) -> Result<String, String> {
    let mut notes = Vec::new();
    for (name, min) in c.entries {
        let Some(s) = report.suites.get(*name) else {
            return Err(format!("no report entry {}", name));
        };
        if !s.failures.is_empty() {
            return Err(format!("{}: {} failures, first: {}", name, s.failures.len(), s.failures[0]));
        }
        if s.instances < *min {
            return Err(format!("{}: {} instances, need {}", name, s.instances, min));
        }
        notes.push(format!("{} {}", name, s.instances));
    }
    if elapsed > c.limit {
        return Err(format!("took {:.2?}, limit {:.2?}", elapsed, c.limit));
    }
    Ok(format!("{} in {:.2?}", notes.join(", "), elapsed))
}

fn main() -> ExitCode {
    let mut failed = 0;
    for c in &CRITERIA {
        let cfg = SuiteConfig { suites: c.suites.to_vec(), ..SuiteConfig::default() };
        let t = Instant::now();
        let outcome = run_suite(&cfg).map_err(|e| e.to_string()).and_then(|r| judge(c, &r, t.elapsed()));
        match outcome {
            Ok(msg) => println!("PASS criterion {:2} {}: {}", c.number, c.title, msg),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {:2} {}: {}", c.number, c.title, msg);
            }
        }
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
