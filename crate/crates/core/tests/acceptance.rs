//! Acceptance checks, one line per criterion. Run with
//! `cargo test --test acceptance`.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::{Command, ExitCode};

use num_rational::BigRational;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config as RunnerConfig, RngAlgorithm, TestRng, TestRunner};

use jumpgen::config::Config;
use jumpgen::golden::{verify_example, EXAMPLE_GOLDEN};
use jumpgen::grouplat::{Multiplicity, PairVec};
use jumpgen::jumpseq::JumpState;
use jumpgen::laurent::LaurentPoly;
use jumpgen::outputs::{
    generating_sequence, ideal_generators, redundancy_certificate, verify_certificate, Target,
};
use jumpgen::values::Value;

use common::*;

type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn values_reproduced(c: &Config, s: &JumpState) -> Check {
    let diffs = verify_example(EXAMPLE_GOLDEN).map_err(|e| e.to_string())?;
    ensure(diffs.is_empty(), || format!("{} reference mismatches", diffs.len()))?;
    ensure(s.p_chain().len() == 2, || "P-chain should end at P2".into())?;
    for (k, b) in ["1", "sqrt(2)"].iter().enumerate() {
        ensure(s.p(k + 1).unwrap().beta == val(c, b), || format!("beta{}", k + 1))?;
    }
    let gammas = [
        (1, "2*sqrt(2) - 1"),
        (2, "5*sqrt(2) - 4"),
        (3, "sqrt(51) - 2"),
        (4, "sqrt(51) + sqrt(2) - 3"),
        (5, "sqrt(51) + 3*sqrt(2) - 4"),
        (6, "9*sqrt(2) - 6"),
        (7, "10*sqrt(2) - 7"),
        (8, "2*sqrt(51) - 5"),
        (9, "4*sqrt(51) - 10"),
        (13, "13*sqrt(2) - 8"),
        (14, "14*sqrt(2) - 9"),
        (15, "15*sqrt(2) - 10"),
        (16, "6*sqrt(51) - 15"),
    ];
    for (j, g) in gammas {
        let t = s.t(j).ok_or_else(|| format!("T{j} missing"))?;
        ensure(t.gamma == val(c, g), || format!("gamma{j} = {}, expected {g}", t.gamma))?;
    }
    Ok(())
}

fn d_sets_exact(_c: &Config, s: &JumpState) -> Check {
    let flat = |v: &[&[u32]]| -> BTreeSet<PairVec> { v.iter().map(|x| PairVec::from_flat(x, 2)).collect() };
    let expected: [(usize, BTreeSet<PairVec>); 5] = [
        (1, flat(&[&[1, 0, 1]])),
        (2, flat(&[&[2, 0, 0, 1], &[1, 1, 0, 1], &[0, 3, 0, 1]])),
        (3, BTreeSet::new()),
        (
            4,
            flat(&[&[1, 0, 0, 0, 0, 1], &[0, 1, 0, 0, 0, 1], &[0, 0, 2, 0, 0, 1], &[0, 0, 1, 0, 0, 3]]),
        ),
        (
            8,
            flat(&[
                &[1, 0, 0, 0, 0, 0, 0, 0, 0, 1],
                &[0, 1, 0, 0, 0, 0, 0, 0, 0, 1],
                &[0, 0, 1, 0, 0, 0, 0, 0, 0, 1],
                &[0, 0, 0, 1, 3, 0, 0, 0, 0, 1],
            ]),
        ),
    ];
    for (i, want) in expected {
        let t = s.t(i).unwrap();
        let got: BTreeSet<PairVec> = t.d_set.clone().unwrap_or_default().into_iter().collect();
        ensure(got == want, || format!("D{i} differs"))?;
        ensure(t.d_complete, || format!("D{i} not certified complete"))?;
    }
    ensure(s.t(3).unwrap().s == Multiplicity::Infinite, || "s3 should be infinite".into())
}

fn identities(c: &Config, s: &JumpState) -> Check {
    let mut t: BTreeMap<usize, LaurentPoly> = BTreeMap::new();
    for tj in s.t_chain().iter().take(16) {
        t.insert(tj.index, tj.poly.clone());
    }
    let ring = |text: &str| LaurentPoly::parse(c.model.ring(), text, false).unwrap();
    let explicit = [
        (2, "x*z - y^2"),
        (3, "x^3*z - x^2*y^2 - y*z^2"),
        (4, "x^2*y*z - x*y^3 - z^3"),
    ];
    for (j, text) in explicit {
        ensure(t[&j] == ring(text), || format!("T{j} = {}", t[&j]))?;
    }
    let ids = [
        (3, "x^2*T2 - y*z^2"),
        (5, "z*T4 - y*T2^2"),
        (6, "-z^2*T2"),
        (7, "-x*T2^2"),
        (9, "-T8^2 - z*T2^2*T3*T4 + y^2*z^2*T2^4 + z^2*T2^5"),
        (10, "-y*T2^2"),
        (11, "0"),
        (12, "0"),
        (13, "-z^4*T2"),
        (14, "-y^2*z*T2^2 - z*T2^3"),
        (15, "-y*z^2*T2^2 - T2^2*T3"),
        (
            16,
            "T8^3 - y*z*T2^3*T3^3 - T2^2*T3*T4^3 + 3*z^3*T2^4*T3^2 + z^7*T2^5 - 2*y^2*z*T2^6*T3 \
             + z*T2^5*T4^2 + y*z^3*T2^7 - z*T2^7*T3",
        ),
    ];
    for (j, text) in ids {
        ensure(t[&j] == eval_with_t(c, text, &t), || format!("identity for T{j} fails"))?;
    }
    for j in [5, 6, 7, 9, 10, 13, 14, 15, 16] {
        let r = redundancy_certificate(s, Target::T(j), &c.caps).map_err(|e| e.to_string())?;
        let cert = r.certificate().ok_or_else(|| format!("no certificate for T{j}"))?;
        verify_certificate(s, cert).map_err(|e| format!("T{j}: {e}"))?;
    }
    Ok(())
}

fn minimal_sequence(c: &Config, s: &JumpState) -> Check {
    let gs = generating_sequence(s, true, &c.caps).map_err(|e| e.to_string())?;
    let want = [
        "x",
        "y",
        "z",
        "x*z - y^2",
        "x^3*z - x^2*y^2 - y*z^2",
        "x^2*y*z - x*y^3 - z^3",
        "-x^5*z^2 + 2*x^4*y^2*z - x^3*y^4 + 2*x^2*y*z^3 - 2*x*y^3*z^2 - z^5",
    ];
    let got: Vec<LaurentPoly> = gs.members.iter().map(|m| m.poly.clone()).collect();
    let want: Vec<LaurentPoly> = want
        .iter()
        .map(|w| LaurentPoly::parse(c.model.ring(), w, false).unwrap())
        .collect();
    ensure(got == want, || format!("sequence has {} members", got.len()))?;
    ensure(gs.certified && gs.minimal, || format!("not certified minimal: {:?}", gs.notes))
}

fn random_poly(c: &Config, rng: &mut TestRunner) -> LaurentPoly {
    let strat = proptest::collection::vec((-3i64..=3, 0u32..3, 0u32..3, 0u32..3), 1..4);
    let terms = strat.new_tree(rng).unwrap().current();
    let mut text = String::new();
    for (k, (a, e1, e2, e3)) in terms.iter().enumerate() {
        let a = if *a == 0 { 1 } else { *a };
        if k > 0 {
            text += " + ";
        }
        text += &format!("({a})*x^{e1}*y^{e2}*z^{e3}");
    }
    let p = LaurentPoly::parse(c.model.ring(), &text, false).unwrap();
    if p.is_zero() {
        c.model.ring_var(0)
    } else {
        p
    }
}

fn properties(c: &Config, s: &JumpState) -> Check {
    check_invariants(s).map_err(|e| format!("invariants: {e}"))?;
    let (c2, s2) = second_model();
    check_invariants(&s2).map_err(|e| format!("second model invariants: {e}"))?;

    let clashes = value_collisions(s, &val(c, "20"));
    ensure(clashes.is_empty(), || format!("irreducible vectors share values: {clashes:?}"))?;
    let clashes = value_collisions(&s2, &val(&c2, "12"));
    ensure(clashes.is_empty(), || format!("second model: shared values {clashes:?}"))?;

    check_d_sets(s).map_err(|e| format!("D sets: {e}"))?;
    for i in [1, 2, 4, 8] {
        let gaps = d_set_gaps(s, i, 6);
        ensure(gaps.is_empty(), || format!("D{i} misses {:?}", gaps[0].to_string()))?;
    }

    let mut runner = TestRunner::new_with_rng(
        RunnerConfig::default(),
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    let model = &c.model;
    for _ in 0..200 {
        let f = random_poly(c, &mut runner);
        let g = random_poly(c, &mut runner);
        let (nf, ng) = (model.nu(&f).unwrap(), model.nu(&g).unwrap());
        ensure(model.nu(&(&f * &g)).unwrap() == &nf + &ng, || format!("nu({f} * {g}) is not additive"))?;
        let sum = &f + &g;
        if !sum.is_zero() {
            let ns = model.nu(&sum).unwrap();
            let lo = nf.clone().min(ng.clone());
            ensure(ns >= lo, || format!("nu({sum}) below the minimum"))?;
            if nf != ng {
                ensure(ns == lo, || format!("nu({sum}) is not the minimum"))?;
            }
        }
    }

    let cap = 3.0;
    for _ in 0..10 {
        let (a, b, d) = (0i64..=6, 0i64..=4, 1i64..=4)
            .new_tree(&mut runner)
            .unwrap()
            .current();
        // σ = (a + b√2)/d, folded into [0, cap)
        let q = |n: i64| BigRational::new(n.into(), d.into());
        let mut sigma = Value::from_coeffs(model.basis(), vec![q(a), q(b), q(0)]).unwrap();
        while sigma.to_f64() >= cap {
            sigma = &sigma - &val(c, "2");
        }
        let got: BTreeSet<PairVec> = ideal_generators(s, &sigma, &c.caps)
            .map_err(|e| e.to_string())?
            .generators
            .into_iter()
            .collect();
        let want = naive_ideal(s, &sigma);
        ensure(got == want, || format!("ideal generators differ at sigma = {sigma}"))?;
    }
    Ok(())
}

fn binary() -> Command {
    Command::new(assert_cmd::cargo::cargo_bin("jumpgen"))
}

fn deterministic(_c: &Config, _s: &JumpState) -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/data/example.json");
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}.json"));
        let status = binary()
            .args(["build", "--quiet", "--config", config, "--out"])
            .arg(&out)
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.success(), || format!("build exited with {status}"))?;
        outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    ensure(outputs[0] == outputs[1], || "reports differ between runs".into())?;
    let status = binary().args(["verify-example", "--quiet"]).status().map_err(|e| e.to_string())?;
    ensure(status.success(), || format!("verify-example exited with {status}"))
}

fn second_model_chain(_c: &Config, _s: &JumpState) -> Check {
    let (c, s) = second_model();
    let text = std::fs::read_to_string(fixture("second_model_expected.json")).unwrap();
    let expected: serde_json::Value = serde_json::from_str(&text).unwrap();
    let rows = expected["p_chain"].as_array().unwrap();
    ensure(s.p_chain().len() == rows.len(), || format!("P-chain has {} members", s.p_chain().len()))?;
    for row in rows {
        let i = row["index"].as_u64().unwrap() as usize;
        let p = s.p(i).unwrap();
        let poly = LaurentPoly::parse(c.model.ring(), row["poly"].as_str().unwrap(), false).unwrap();
        ensure(p.poly == poly, || format!("P{i} = {}", p.poly))?;
        ensure(p.beta == val(&c, row["beta"].as_str().unwrap()), || format!("beta{i} = {}", p.beta))?;
        if i > 1 {
            let q: Multiplicity = serde_json::from_value(row["q"].clone()).unwrap();
            ensure(p.q == q, || format!("q{i} = {}", p.q))?;
            let lambda = row["lambda"].as_str().map(|l| jumpgen::values::parse_rational(l).unwrap());
            ensure(p.lambda == lambda, || format!("lambda{i} = {:?}", p.lambda))?;
        }
    }
    let t1 = s.t(1).unwrap();
    ensure(t1.gamma == val(&c, expected["t1"]["gamma"].as_str().unwrap()), || "gamma1".into())
}

fn main() -> ExitCode {
    let (c, s) = example();
    let criteria: [(&str, fn(&Config, &JumpState) -> Check); 7] = [
        ("values of the three-variable example", values_reproduced),
        ("D sets of the three-variable example", d_sets_exact),
        ("polynomial identities by exact expansion", identities),
        ("minimal generating sequence", minimal_sequence),
        ("property suites", properties),
        ("byte-identical reports", deterministic),
        ("second model P-chain", second_model_chain),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check(&c, &s) {
            Ok(()) => println!("criterion {}: PASS  {name}", k + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {e}", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
