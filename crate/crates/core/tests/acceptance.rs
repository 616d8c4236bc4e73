mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::test_runner::{Config, TestRunner};

use common::*;
use ra_core::compiler::{compile, compile_deterministic, COMPILED_MAX_WEIGHT};
use ra_core::complexity::{nfa_accepts, profile_boundedness, to_nfa, workspace};
use ra_core::fixtures;
use ra_core::process::{accepts, enumerate_language, SearchBudget, Verdict};
use ra_core::stackmachine::MachineVerdict;
use ra_core::word::words_up_to;
use ra_core::{Multiset, ReactionAutomaton};

type Outcome = Result<String, String>;
type Language = fn(&str) -> bool;
type Criterion = (&'static str, Duration, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ms(text: &str) -> Multiset {
    text.parse().unwrap()
}

fn results(ra: &ReactionAutomaton, t: &str) -> BTreeSet<Multiset> {
    ra.results(&ms(t), 100_000).unwrap().into_iter().collect()
}

fn example1_semantics() -> Outcome {
    let ra = fixtures::example1();
    ensure!(results(&ra, "b^4 c d") == BTreeSet::from([ms("c^3 d")]), "Res(b^4 c d)");
    ensure!(results(&ra, "b c d") == BTreeSet::from([ms("b c d")]), "Res(b c d)");
    let res = results(&ra, "b^3 c^2 e");
    ensure!(res.contains(&ms("b^2 c e")) && res.contains(&ms("c^2 e^2")), "Res(b^3 c^2 e) = {res:?}");
    for t in ["b^4 c d", "b c d", "b^3 c^2 e"] {
        let t = ms(t);
        let got: BTreeSet<_> = ra.enumerate_enp(&t, 100_000).unwrap().iter().map(bag_key).collect();
        ensure!(got == brute_enp(&ra, &t), "En^p({t}) differs from the oracle");
    }
    // The bag c^2 (two copies of reaction c: b c | d | e) is also maximal on
    // b^3 c^2 e, so a third result b e^3 appears next to the two above.
    let enp: Vec<String> = ra
        .enumerate_enp(&ms("b^3 c^2 e"), 100_000)
        .unwrap()
        .iter()
        .map(ToString::to_string)
        .collect();
    ensure!(enp == ["a b", "a c", "c^2"], "En^p(b^3 c^2 e) = {enp:?}");
    ensure!(res.len() == 3 && res.contains(&ms("b e^3")), "third result");
    Ok("En^p(b^3 c^2 e) = {ab, ac, c^2}; oracle agrees on all three".into())
}

fn fixture_languages() -> Outcome {
    let budget = SearchBudget::default();
    let cases: [(&str, ReactionAutomaton, usize, Language); 4] = [
        ("fig1", fixtures::fig1(), 8, is_anbn),
        ("example2", fixtures::example2(), 10, is_pow2_a),
        ("example3", fixtures::example3(), 9, is_anbncn),
        ("example4", fixtures::example4(), 6, is_ambmcndn),
    ];
    let mut summary = Vec::new();
    for (name, ra, len, lang) in cases {
        let verdicts = enumerate_language(&ra, len, &budget).unwrap();
        let mut accepted = 0;
        for (w, v) in &verdicts {
            ensure!(!matches!(v, Verdict::Undecided(_)), "{name}: {} undecided", letters(w));
            ensure!(v.is_accepted() == lang(&letters(w)), "{name}: mismatch on {}", letters(w));
            accepted += v.is_accepted() as usize;
        }
        summary.push(format!("{name} {accepted}/{}", verdicts.len()));
    }
    Ok(summary.join(", "))
}

fn example2_witness() -> Outcome {
    let ra = fixtures::example2();
    let v = accepts(&ra, &word("aaaaaaaa"), &SearchBudget::default()).unwrap();
    let t = v.witness().ok_or("a^8 not accepted")?;
    let expected: Vec<Multiset> = [
        "d", "a d", "b d", "a b d", "b^2 d", "a b^2 d", "b^3 d", "a b^3 d", "b^4 d", "c^2 d", "b d", "e", "f",
    ]
    .iter()
    .map(|s| ms(s))
    .collect();
    let got: Vec<Multiset> = t.configs().cloned().collect();
    ensure!(got == expected, "trace {}", t.render());
    Ok(t.render())
}

fn machine_agreement(deterministic: bool) -> Outcome {
    let m = fixtures::anbn_machine();
    let out = if deterministic {
        compile_deterministic(&m).unwrap()
    } else {
        compile(&m).unwrap()
    };
    if deterministic {
        ensure!(out.automaton.is_deterministic(), "compiled automaton is not deterministic");
    }
    let budget = SearchBudget::default().with_max_weight(COMPILED_MAX_WEIGHT);
    let words = words_up_to(&m.input, 5);
    let mut accepted = 0;
    for w in &words {
        let expected = m.run(w, 10_000).unwrap();
        let got = accepts(&out.automaton, w, &budget).unwrap();
        ensure!(!matches!(got, Verdict::Undecided(_)), "{} undecided", letters(w));
        ensure!(
            got.is_accepted() == (expected == MachineVerdict::Accepted),
            "{}: automaton {got}, machine {expected}",
            letters(w)
        );
        accepted += got.is_accepted() as usize;
    }
    Ok(format!(
        "{} strings, {accepted} accepted, {} reactions",
        words.len(),
        out.automaton.reactions().len()
    ))
}

fn nfa_equivalence() -> Outcome {
    let mut summary = Vec::new();
    for (name, ra, k) in [("odd_a", fixtures::odd_a(), 2), ("ab_star", fixtures::ab_star(), 1)] {
        let nfa = to_nfa(&ra, k, &SearchBudget::default()).unwrap();
        let capped = SearchBudget::default().with_max_weight(k);
        let words = words_up_to(ra.input_alphabet(), 10);
        for w in &words {
            let bounded = accepts(&ra, w, &capped).unwrap();
            ensure!(
                nfa_accepts(&nfa, w) == bounded.is_accepted(),
                "{name}: NFA and automaton disagree on {}",
                letters(w)
            );
        }
        summary.push(format!("{name} k={k}: {} states, {} strings", nfa.states.len(), words.len()));
    }
    Ok(summary.join("; "))
}

fn workspace_bounds() -> Outcome {
    let ra = fixtures::example2();
    let a8 = word("aaaaaaaa");
    let (ws, _) = workspace(&ra, &a8, 1 << 10, &SearchBudget::default())
        .unwrap()
        .ok_or("a^8 has no workspace")?;
    let (brute, seen) = brute_workspace(&ra, &a8, 20, 10_000);
    ensure!(ws == 5 && brute == Some(5), "WS(a^8) = {ws}, brute force {brute:?}");

    let ex3 = fixtures::example3();
    let strings: Vec<_> = (1..=5)
        .map(|n| word(&format!("{}{}{}", "a".repeat(n), "b".repeat(n), "c".repeat(n))))
        .collect();
    let report = profile_boundedness(&ex3, &strings, 1 << 10, &SearchBudget::default()).unwrap();
    let ws: Vec<u64> = report.records.iter().map(|r| r.ws.unwrap()).collect();
    ensure!(ws.windows(2).all(|p| p[0] <= p[1]), "not monotone: {ws:?}");
    ensure!(report.monotone, "profiler reports non-monotone");
    let c = report.max_ratio.unwrap();
    for r in &report.records {
        let ws = r.ws.unwrap();
        let bound = c * r.length as f64;
        let within = ws as f64 <= bound;
        ensure!(within, "WS {ws} exceeds {c} * {}", r.length);
    }
    Ok(format!(
        "WS(a^8) = 5 over {seen} processes; example3 WS(a^n b^n c^n), n=1..5: {ws:?}, WS <= {c:.2} |w|"
    ))
}

fn property_suites() -> Outcome {
    let config = |cases| Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new(config(10_000));
    runner
        .run(&(multiset(), multiset(), multiset()), |(a, b, c)| lattice_laws(&a, &b, &c))
        .map_err(|e| format!("lattice laws: {e}"))?;
    let mut runner = TestRunner::new(config(1_000));
    runner
        .run(&(small_automaton(), small_config()), |(ra, t)| enp_matches_oracle(&ra, &t))
        .map_err(|e| format!("En^p oracle: {e}"))?;
    runner
        .run(&(small_automaton(), small_config()), |(ra, t)| permanency(&ra, &t))
        .map_err(|e| format!("permanency: {e}"))?;

    let mut replayed = 0;
    for (ra, len) in [
        (fixtures::fig1(), 8),
        (fixtures::example2(), 10),
        (fixtures::example3(), 6),
        (fixtures::example4(), 6),
    ] {
        for (w, v) in enumerate_language(&ra, len, &SearchBudget::default()).unwrap() {
            if let Verdict::Accepted(t) = v {
                replay(&ra, &w, &t).map_err(|e| format!("replay of {}: {e}", letters(&w)))?;
                replayed += 1;
            }
        }
    }

    let m = fixtures::anbn_machine();
    let mut explored = 0;
    for out in [compile(&m).unwrap(), compile_deterministic(&m).unwrap()] {
        for w in ["$", "ab$", "aabb$", "aab$", "abb$", "ba$"] {
            let (states, _) = compiled_invariants(&out, &word(w), 10_000)?;
            explored += states;
        }
    }
    Ok(format!(
        "10000 lattice cases, 1000 En^p and permanency cases, {replayed} traces replayed, {explored} compiled states checked"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 example 1 semantics", Duration::from_secs(1), example1_semantics),
        ("2 fixture languages", Duration::from_secs(60), fixture_languages),
        ("3 example 2 witness for a^8", Duration::from_secs(1), example2_witness),
        ("4 compiled machine agrees with run", Duration::from_secs(120), || machine_agreement(false)),
        ("5 deterministic compile agrees with run", Duration::from_secs(120), || machine_agreement(true)),
        ("6 bounded automata equal their NFAs", Duration::from_secs(60), nfa_equivalence),
        ("7 workspace", Duration::from_secs(60), workspace_bounds),
        ("8 property suites", Duration::from_secs(300), property_suites),
    ];
    let mut failed = 0;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > limit => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
            o => o,
        };
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({elapsed:.2?}): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name} ({elapsed:.2?}): {why}");
            }
        }
    }
    if failed == 0 {
        println!("acceptance: 8/8 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 8 criteria failed");
        ExitCode::FAILURE
    }
}
