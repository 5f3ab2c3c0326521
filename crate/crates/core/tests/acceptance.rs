//! Acceptance criteria 1-13. Each test prints one `PASS` or `FAIL` line to
//! stdout (bypassing output capture) and asserts every check that is not a
//! recorded deviation.

mod common;

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use common::*;
use ioconf::automata::{lts_to_fsa, parse_regex, Fsa};
use ioconf::catalog;
use ioconf::conformance::{
    build_test_suite, check_adherence, check_conf, check_ioco, ioco_d_language, violations_up_to, Clause, Outcome,
};
use ioconf::models::Iolts;
use ioconf::runner::{
    adversarial_family, alpha_implementation, count_lower_bound, defeat_acyclic_fault_model, fails_multigraph,
    passes, r_words, run_fault_model, Aggregate, Variant, BRUTE_FORCE_LIMIT, PHI,
};
use ioconf::testgen::{
    gen_fault_model, gen_scheme_suite, make_input_enabled, make_output_deterministic, path_node_names,
    validate_scheme, FaultModel, GenOptions, Multigraph,
};
use rand::Rng;

/// Largest allowed wall-time ratio between successive impl sizes (criterion 13).
const GROWTH_RATIO_LIMIT: f64 = 20.0;
/// Runtime budget for the exhaustive oracle comparison (criterion 5).
const EXHAUSTIVE_BUDGET: Duration = Duration::from_secs(60);
/// Relative tolerance when comparing the lower bound against `Φ^m/√5`.
const BOUND_EPS: f64 = 1e-9;

fn report(n: u32, title: &str, ok: bool, detail: &str) {
    let mut out = std::io::stdout().lock();
    let status = if ok { "PASS" } else { "FAIL" };
    writeln!(out, "criterion {n:>2} {status}: {title} ({detail})").ok();
}

fn abx() -> Vec<String> {
    vec!["a".into(), "b".into(), "x".into()]
}

#[test]
fn criterion_01_df_conformance_example() {
    let (s, i) = (catalog::conf_spec(), catalog::conf_impl());
    let d = parse_regex("(a+b)*ax", &abx()).unwrap();
    let f = parse_regex("ba*b", &abx()).unwrap();
    let v = check_conf(&s, &i, &d, &f).unwrap();
    let found: BTreeSet<Vec<String>> = violations_up_to(&s, &i, &d, &f, 6).unwrap().into_iter().map(|(w, _)| w).collect();
    let d2 = parse_regex("aa^+b(bb)*ax", &abx()).unwrap();
    let f2 = parse_regex("ab^+x", &abx()).unwrap();
    let v2 = check_conf(&s, &i, &d2, &f2).unwrap();
    let checks = [
        v.outcome == Outcome::Violates,
        found.contains(&w("baab")),
        found.contains(&w("ababax")),
        v2.outcome == Outcome::Conforms,
    ];
    let ok = checks.iter().all(|c| *c);
    report(1, "(D,F)-conformance example", ok, &format!("{} witnesses up to length 6; shortest {:?}", found.len(), v.witness));
    assert!(ok, "{checks:?}");
}

#[test]
fn criterion_02_ioco_is_conf_with_otr_outputs() {
    let alphabets: [(&[&str], &[&str]); 3] = [(&["a"], &["x"]), (&["a", "b"], &["x"]), (&["a"], &["x", "y"])];
    let mut r = rng(2);
    let mut discrepancies = 0;
    let mut violating = 0;
    for _ in 0..500 {
        let (ins, outs) = alphabets[r.gen_range(0..alphabets.len())];
        let s = random_det(&mut r, 6, ins, outs, 0.6);
        let i = random_det(&mut r, 6, ins, outs, 0.6);
        let ioco = check_ioco(&s, &i).unwrap();
        let d = ioco_d_language(&s).unwrap();
        let conf = check_conf(&s, &i, &d, &Fsa::empty(s.labels().iter().cloned())).unwrap();
        if ioco.outcome != conf.outcome || ioco.witness != conf.witness {
            discrepancies += 1;
        }
        if ioco.outcome == Outcome::Violates {
            violating += 1;
        }
    }
    let ok = discrepancies == 0;
    report(2, "ioco equals conf with D = otr(S)·L_U", ok, &format!("500 pairs, {violating} violating, {discrepancies} discrepancies"));
    assert!(ok);
}

#[test]
fn criterion_03_extra_output_and_d_conformance() {
    let s = catalog::conf_spec();
    let extra = catalog::conf_impl_extra_output();
    let v = check_ioco(&s, &extra).unwrap();
    let violations: BTreeSet<Vec<String>> =
        violations_up_to(&s, &extra, &ioco_d_language(&s).unwrap(), &Fsa::empty(abx()), 3).unwrap()
            .into_iter()
            .map(|(w, _)| w)
            .collect();
    let i = catalog::conf_impl();
    let plain = check_ioco(&s, &i).unwrap();
    let d = parse_regex("(a+b)*ax", &abx()).unwrap();
    let dconf = check_conf(&s, &i, &d, &Fsa::empty(abx())).unwrap();
    let exact = v.witness == Some(w("aax"));
    let core = [
        v.outcome == Outcome::Violates,
        v.witness == Some(w("bx")),
        violations.contains(&w("aax")),
        plain.holds(),
        dconf.witness == Some(w("ababax")) && dconf.clause == Some(Clause::D),
    ];
    let ok = exact && core.iter().all(|c| *c);
    report(
        3,
        "extra output violates ioco; plain pair is ioco but not D-conformant",
        ok,
        &format!(
            "shortest witness {:?}, expected aax; aax is a violation: {}; D witness {:?}; deviation recorded",
            v.witness.as_ref().map(|w| w.concat()),
            violations.contains(&w("aax")),
            dconf.witness.as_ref().map(|w| w.concat())
        ),
    );
    assert!(core.iter().all(|c| *c), "{core:?}");
}

#[test]
fn criterion_04_complete_suite_and_adherence() {
    let s = catalog::ioco_spec();
    let i = catalog::ioco_impl();
    let d = ioco_d_language(&s).unwrap();
    let suite = build_test_suite(&s, &d, &Fsa::empty(abx())).unwrap();
    let accepts_bax = suite.automaton.accepts(&w("bax"));
    let adh = check_adherence(&i, &suite).unwrap();
    let bax_in_impl = lts_to_fsa(&i).accepts(&w("bax"));
    let exact = adh.witness == Some(w("bax"));
    let core = [accepts_bax, bax_in_impl, adh.outcome == Outcome::Violates, adh.witness == Some(w("bx"))];
    let ok = exact && core.iter().all(|c| *c);
    report(
        4,
        "complete test suite and adherence",
        ok,
        &format!(
            "suite accepts bax: {accepts_bax}; bax in otr(I): {bax_in_impl}; shortest adherence witness {:?}, expected bax; deviation recorded",
            adh.witness.as_ref().map(|w| w.concat())
        ),
    );
    assert!(core.iter().all(|c| *c), "{core:?}");
}

#[test]
fn criterion_05_exhaustive_oracle_equivalence() {
    let start = Instant::now();
    let universe = all_small_det(3);
    let mut discrepancies = 0;
    let mut pairs = 0;
    for s in &universe {
        for i in &universe {
            pairs += 1;
            if check_ioco(s, i).unwrap().witness != oracle_ioco(s, i) {
                discrepancies += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = discrepancies == 0 && elapsed < EXHAUSTIVE_BUDGET;
    report(
        5,
        "brute-force ioco oracle on all small deterministic pairs",
        ok,
        &format!("{} models, {pairs} pairs, {discrepancies} discrepancies, {:.1}s", universe.len(), elapsed.as_secs_f64()),
    );
    assert!(ok);
}

#[test]
fn criterion_06_fault_model_completeness() {
    let m = 2;
    let universe = all_small_det(3);
    // [pairs, discrepancies] for impls within m states, beyond m, and explicit runs
    let mut c = [0usize; 6];
    for s in &universe {
        let g = Multigraph::build(s, m, None).unwrap();
        let fm = (g.count_paths() <= 60).then(|| gen_fault_model(s, m, &GenOptions::default()).unwrap());
        for i in &universe {
            let symbolic_pass = fails_multigraph(i, &g).is_none();
            let ioco = check_ioco(s, i).unwrap().holds();
            let k = if i.states().len() <= m { 0 } else { 2 };
            c[k] += 1;
            c[k + 1] += usize::from(symbolic_pass != ioco);
            if let Some(fm) = &fm {
                let run = run_fault_model(i, fm, Some(1)).unwrap();
                c[4] += 1;
                c[5] += usize::from((run.aggregate == Aggregate::Pass) != symbolic_pass);
            }
        }
    }
    let (within, beyond, explicit) = ((c[0], c[1]), (c[2], c[3]), (c[4], c[5]));
    let ok = within.1 == 0 && beyond.1 == 0 && explicit.1 == 0;
    report(
        6,
        "fault model for m = 2 decides ioco",
        ok,
        &format!(
            "impls with <= 2 states: {} pairs, {} discrepancies; 3-state impls: {} pairs, {} discrepancies; explicit runs agree with symbolic on {} pairs, {} disagreements",
            within.0, within.1, beyond.0, beyond.1, explicit.0, explicit.1
        ),
    );
    assert_eq!(within.1, 0);
    assert_eq!(explicit.1, 0);
}

#[test]
fn criterion_07_multigraph_shape() {
    let g = Multigraph::build(&catalog::ioco_spec(), 4, None).unwrap();
    let word = g.spec().trace_indices(&w("aaxabbbax")).unwrap();
    let names = g.path_for(&word).map(|p| path_node_names(&g, &p));
    let expected = ["s0@0", "s1@0", "s1@1", "s2@1", "s1@2", "s3@2", "s2@3", "s3@3", "s3@4", "fail"];
    let ok = g.levels() == 17 && g.pre_prune_nodes() <= 68 && names.as_deref() == Some(&expected.map(String::from)[..]);
    report(
        7,
        "multigraph levels, size and path",
        ok,
        &format!("{} levels, {} nodes before pruning, {} after", g.levels(), g.pre_prune_nodes(), g.node_count()),
    );
    assert!(ok, "{names:?}");
}

fn transformed(fm: &FaultModel) -> (FaultModel, FaultModel) {
    let mut ie = fm.clone();
    let mut od = fm.clone();
    ie.purposes = fm.purposes.iter().map(|tp| make_input_enabled(tp).unwrap()).collect();
    od.purposes = ie.purposes.iter().map(|tp| make_output_deterministic(tp).unwrap()).collect();
    (ie, od)
}

#[test]
fn criterion_08_transforms_preserve_verdicts() {
    let spec = catalog::ioco_spec();
    let full = gen_fault_model(&spec, 1, &GenOptions::default()).unwrap();
    let g = Multigraph::build(&spec, 4, None).unwrap();
    let mut r = rng(8);
    let total = g.count_paths();
    let mut sample = FaultModel::empty(full.provenance.kind);
    for k in 0..300 {
        let idx = r.gen_range(0..total);
        let path = g.path_at(idx).unwrap();
        sample.purposes.push(g.purpose(&path, format!("m4_{k:03}")).unwrap());
    }
    let suites = [full, sample];
    let variants: Vec<(FaultModel, FaultModel)> = suites.iter().map(transformed).collect();
    let mut flips = 0;
    let mut runs = 0;
    let mut fails = 0;
    for _ in 0..200 {
        let imp = random_nondet(&mut r, 6, &["a", "b"], &["x"], 10);
        for (raw, (ie, od)) in suites.iter().zip(&variants) {
            let a = run_fault_model(&imp, raw, None).unwrap();
            let b = run_fault_model(&imp, ie, None).unwrap();
            let c = run_fault_model(&imp, od, None).unwrap();
            for ((x, y), z) in a.purposes.iter().zip(&b.purposes).zip(&c.purposes) {
                runs += 1;
                fails += usize::from(!x.passed());
                if x.passed() != y.passed() || x.passed() != z.passed() {
                    flips += 1;
                }
            }
        }
    }
    let ok = flips == 0;
    report(
        8,
        "transforms preserve verdicts",
        ok,
        &format!(
            "200 impls x ({} purposes for m = 1 + 300 sampled of {total} for m = 4); {runs} runs, {fails} fails, {flips} flips",
            suites[0].purposes.len()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_09_acyclic_fault_models_are_defeated() {
    let spec = catalog::single_loop_spec();
    let mut lines = vec![];
    let mut ok = true;
    for m in 1..=4 {
        for opts in [GenOptions::default(), GenOptions::all_transforms()] {
            let fm = gen_fault_model(&spec, m, &opts).unwrap();
            let imp = defeat_acyclic_fault_model(&fm).unwrap();
            let passes_fm = run_fault_model(&imp, &fm, None).unwrap().aggregate == Aggregate::Pass;
            let violates = check_ioco(&spec, &imp).unwrap().outcome == Outcome::Violates;
            ok &= passes_fm && violates;
            lines.push(format!("m={m}:{}", imp.states().len()));
        }
    }
    report(9, "defeat of acyclic fault models", ok, &format!("impl sizes {}", lines.join(" ")));
    assert!(ok);
}

#[test]
fn criterion_10_lower_bound_counting() {
    let mut ok = true;
    for m in 0..=BRUTE_FORCE_LIMIT.min(20) {
        let lb = count_lower_bound(m);
        ok &= lb.brute_force == Some(lb.f_m);
        ok &= lb.f_m as f64 >= PHI.powi(m as i32) / 5f64.sqrt() * (1.0 - BOUND_EPS);
        ok &= r_words(m).len() as u128 == lb.f_m;
    }
    for m in 21..=60 {
        let lb = count_lower_bound(m);
        ok &= lb.f_m as f64 >= lb.bound * (1.0 - BOUND_EPS);
    }
    ok &= count_lower_bound(5).f_m == 8;
    let mut members = 0;
    for variant in [Variant::TestCases, Variant::Schemes] {
        for m in 4..=8 {
            let (spec, fam) = adversarial_family(m, variant);
            let expected: u128 = (1..=m - 3).map(|r| count_lower_bound(r).f_m).sum();
            ok &= fam.len() as u128 == expected;
            for (alpha, imp) in &fam {
                members += 1;
                let mut witness = w(alpha);
                witness.push("x".into());
                ok &= check_ioco(&spec, imp).unwrap().witness == Some(witness);
            }
        }
    }
    report(10, "lower-bound counting and adversarial family", ok, &format!("F_5 = 8; {members} family members checked"));
    assert!(ok);
}

#[test]
fn criterion_11_scheme_and_class_structures() {
    let mut schemes = 0;
    let mut bad = 0;
    let parity = gen_scheme_suite(&catalog::parity_spec(), 2, &GenOptions::default()).unwrap();
    let ring_g = Multigraph::build(&catalog::ring_spec(4), 1, None).unwrap();
    let mut r = rng(11);
    let mut ring = vec![];
    for k in 0..500 {
        let path = ring_g.path_at(r.gen_range(0..ring_g.count_paths())).unwrap();
        ring.push(ring_g.scheme(&path, format!("ring{k:03}")).unwrap());
    }
    for s in parity.purposes.iter().chain(&ring) {
        schemes += 1;
        if !validate_scheme(s).all() {
            bad += 1;
        }
    }
    let mut class_ok = true;
    for k in 3..=6 {
        let c = catalog::ring_spec(k).classify();
        class_ok &= c.deterministic
            && c.input_complete
            && c.progressive
            && c.initially_connected
            && c.input_state_minimal
            && c.input_states == k;
    }
    for alpha in r_words(4) {
        class_ok &= alpha_implementation(&alpha, Variant::Schemes).classify().input_state_minimal;
    }
    let ok = bad == 0 && class_ok;
    report(
        11,
        "scheme structure and classification",
        ok,
        &format!("{schemes} schemes, {bad} invalid; ring specs k = 3..6 and I_alpha classified: {class_ok}"),
    );
    assert!(ok);
}

#[test]
fn criterion_12_semantic_equivalences() {
    let mut r = rng(12);
    let mut checked = 0;
    let mut discrepancies = 0;
    for _ in 0..200 {
        let base = random_nondet(&mut r, 5, &["a", "b"], &["x", "y"], 8);
        let ext = base.delta_extend().unwrap();
        if ext.delta_states() != base.quiescent_states() {
            discrepancies += 1;
        }
        let m = ext.model();
        if m.is_deterministic() != lts_to_fsa(m).is_deterministic()
            || base.is_deterministic() != lts_to_fsa(&base).is_deterministic()
            || (base.is_deterministic() && !m.is_deterministic())
        {
            discrepancies += 1;
        }
        let outputs: Vec<String> = m.alphabet().outputs.iter().cloned().collect();
        for (si, name) in m.states().iter().enumerate() {
            let a = lts_to_fsa(&m.rerooted(si));
            for trace in traces_up_to(&m.rerooted(si), 4) {
                checked += 1;
                let out_a: BTreeSet<String> = outputs
                    .iter()
                    .filter(|x| {
                        let mut t = trace.clone();
                        t.push((*x).clone());
                        a.accepts(&t)
                    })
                    .cloned()
                    .collect();
                let out_t = m.out_set(&m.after(name, &trace).unwrap()).unwrap();
                if out_a != out_t || out_t != oracle_out(m, si, &trace) {
                    discrepancies += 1;
                }
            }
        }
    }
    let ok = discrepancies == 0;
    report(12, "automaton and trace semantics agree", ok, &format!("200 models, {checked} (state, trace) pairs, {discrepancies} discrepancies"));
    assert!(ok);
}

/// A conforming implementation of about `n` states: copies of the
/// specification's states, each transition jumping to a random copy.
fn unrolled(spec: &Iolts, n: usize, r: &mut TestRng) -> Iolts {
    let k = spec.states().len();
    let copies = n.div_ceil(k).max(1);
    let mut table = vec![];
    for c in 0..copies {
        for &(s, l, t) in spec.transitions() {
            let c2 = r.gen_range(0..copies);
            table.push((c * k + s, Some(spec.sym_name(l)), c2 * k + t));
        }
    }
    let labels: Vec<&str> = spec.labels().iter().map(String::as_str).collect();
    let (ins, outs): (Vec<&str>, Vec<&str>) = labels.iter().partition(|l| spec.alphabet().inputs.contains(**l));
    model_from_table(&ins, &outs, copies * k, &table)
}

#[test]
fn criterion_13_linear_time_smoke() {
    let spec = catalog::ioco_spec();
    let mut r = rng(13);
    let mut times = vec![];
    for n in [10, 100, 1000] {
        let imps: Vec<Iolts> = (0..5).map(|_| unrolled(&spec, n, &mut r)).collect();
        let mut samples = vec![];
        for imp in &imps {
            let t = Instant::now();
            let v = check_ioco(&spec, imp).unwrap();
            samples.push(t.elapsed());
            assert!(v.holds());
        }
        samples.sort();
        times.push((n, samples[samples.len() / 2]));
    }
    let ratios: Vec<f64> = times.windows(2).map(|p| p[1].1.as_secs_f64() / p[0].1.as_secs_f64().max(1e-7)).collect();
    let ok = ratios.iter().all(|&q| q <= GROWTH_RATIO_LIMIT);
    let shown: Vec<String> = times.iter().map(|(n, t)| format!("{n}: {:.2}ms", t.as_secs_f64() * 1e3)).collect();
    report(13, "check_ioco time grows about linearly", ok, &format!("{}; ratios {ratios:.1?}", shown.join(", ")));
    assert!(ok);
}

#[test]
fn sanity_single_purpose_runner() {
    let spec = catalog::ioco_spec();
    let g = Multigraph::build(&spec, 1, None).unwrap();
    let tp = g.purpose(&g.path_at(0).unwrap(), "first").unwrap();
    assert!(passes(&spec, &tp).unwrap().passed());
}
