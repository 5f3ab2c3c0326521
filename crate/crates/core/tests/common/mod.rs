//! Seeded model generators and brute-force oracles shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use ioconf::models::{Iolts, RawModel, TAU};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn w(s: &str) -> Vec<String> {
    s.chars().map(|c| c.to_string()).collect()
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// Builds a model from index triples; `None` is the internal action.
/// Unreachable states are dropped.
pub fn model_from_table(inputs: &[&str], outputs: &[&str], n: usize, table: &[(usize, Option<&str>, usize)]) -> Iolts {
    let raw = RawModel {
        inputs: strings(inputs),
        outputs: strings(outputs),
        states: (0..n).map(|i| format!("s{i}")).collect(),
        initial: "s0".into(),
        transitions: table
            .iter()
            .map(|&(s, l, t)| (format!("s{s}"), l.unwrap_or(TAU).to_string(), format!("s{t}")))
            .collect(),
    };
    Iolts::from_raw(&raw, true).expect("generated model is valid")
}

/// A random deterministic model with up to `max_states` states. Each
/// (state, label) pair gets a transition with probability `density`.
pub fn random_det(rng: &mut TestRng, max_states: usize, inputs: &[&str], outputs: &[&str], density: f64) -> Iolts {
    let n = rng.gen_range(1..=max_states);
    let labels: Vec<&str> = inputs.iter().chain(outputs).copied().collect();
    let mut table = vec![];
    for s in 0..n {
        for &l in &labels {
            if rng.gen_bool(density) {
                table.push((s, Some(l), rng.gen_range(0..n)));
            }
        }
    }
    model_from_table(inputs, outputs, n, &table)
}

/// A random model, possibly nondeterministic and with internal moves.
pub fn random_nondet(rng: &mut TestRng, max_states: usize, inputs: &[&str], outputs: &[&str], edges: usize) -> Iolts {
    let n = rng.gen_range(1..=max_states);
    let mut labels: Vec<Option<&str>> = inputs.iter().chain(outputs).map(|l| Some(*l)).collect();
    labels.push(None);
    let mut table = vec![];
    for s in 1..n {
        // spanning tree so that most states stay reachable
        let p = rng.gen_range(0..s);
        table.push((p, *labels.choose(rng).unwrap(), s));
    }
    for _ in 0..rng.gen_range(0..=edges) {
        let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let l = *labels.choose(rng).unwrap();
        if l.is_some() || s != t {
            table.push((s, l, t));
        }
    }
    model_from_table(inputs, outputs, n, &table)
}

/// Every deterministic model over one input `a` and one output `x` with at
/// most `max_states` states, one per isomorphism class: states are numbered
/// in breadth-first order of discovery and every state is reachable.
pub fn all_small_det(max_states: usize) -> Vec<Iolts> {
    let labels = ["a", "x"];
    let mut out = vec![];
    for n in 1..=max_states {
        let cells = n * labels.len();
        let choices = n + 1;
        let total = choices.pow(cells as u32);
        for code in 0..total {
            let mut c = code;
            let mut delta = vec![None; cells];
            for d in delta.iter_mut() {
                let v = c % choices;
                c /= choices;
                *d = (v < n).then_some(v);
            }
            if !is_bfs_canonical(&delta, n, labels.len()) {
                continue;
            }
            let table: Vec<(usize, Option<&str>, usize)> = delta
                .iter()
                .enumerate()
                .filter_map(|(i, t)| t.map(|t| (i / labels.len(), Some(labels[i % labels.len()]), t)))
                .collect();
            out.push(model_from_table(&["a"], &["x"], n, &table));
        }
    }
    out
}

fn is_bfs_canonical(delta: &[Option<usize>], n: usize, k: usize) -> bool {
    let mut next = 1;
    let mut order = vec![usize::MAX; n];
    order[0] = 0;
    let mut queue = VecDeque::from([0]);
    while let Some(s) = queue.pop_front() {
        for l in 0..k {
            if let Some(t) = delta[s * k + l] {
                if order[t] == usize::MAX {
                    if t != next {
                        return false;
                    }
                    order[t] = next;
                    next += 1;
                    queue.push_back(t);
                }
            }
        }
    }
    next == n
}

fn close(m: &Iolts, set: BTreeSet<usize>) -> BTreeSet<usize> {
    let mut seen = set.clone();
    let mut stack: Vec<usize> = set.into_iter().collect();
    while let Some(s) = stack.pop() {
        for &(l, t) in m.successors(s) {
            if l.is_none() && seen.insert(t) {
                stack.push(t);
            }
        }
    }
    seen
}

fn move_on(m: &Iolts, set: &BTreeSet<usize>, label: &str) -> BTreeSet<usize> {
    let mut next = BTreeSet::new();
    for &s in set {
        for &(l, t) in m.successors(s) {
            if l.is_some() && m.sym_name(l) == label {
                next.insert(t);
            }
        }
    }
    close(m, next)
}

fn outs(m: &Iolts, set: &BTreeSet<usize>) -> BTreeSet<String> {
    let mut o = BTreeSet::new();
    for &s in set {
        for &(l, _) in m.successors(s) {
            if let Some(i) = l {
                if m.is_output(i) {
                    o.insert(m.labels()[i].clone());
                }
            }
        }
    }
    o
}

/// State sets of models with at most 64 states, as bit masks.
fn close_mask(m: &Iolts, mut set: u64) -> u64 {
    loop {
        let mut next = set;
        for s in (0..m.states().len()).filter(|s| set >> s & 1 == 1) {
            for &(l, t) in m.successors(s) {
                if l.is_none() {
                    next |= 1 << t;
                }
            }
        }
        if next == set {
            return set;
        }
        set = next;
    }
}

fn step_mask(m: &Iolts, set: u64, label: usize) -> u64 {
    let mut next = 0;
    for s in (0..m.states().len()).filter(|s| set >> s & 1 == 1) {
        for &(l, t) in m.successors(s) {
            if l == Some(label) {
                next |= 1 << t;
            }
        }
    }
    close_mask(m, next)
}

fn out_mask(m: &Iolts, set: u64) -> u64 {
    let mut out = 0;
    for s in (0..m.states().len()).filter(|s| set >> s & 1 == 1) {
        for &(l, _) in m.successors(s) {
            if let Some(i) = l.filter(|&i| m.is_output(i)) {
                out |= 1 << i;
            }
        }
    }
    out
}

/// ioco by direct comparison of output sets along the subset product of
/// both models: breadth-first over traces of the specification, labels in
/// lexicographic order. Returns the first violating trace `σ·x`.
pub fn oracle_ioco(spec: &Iolts, imp: &Iolts) -> Option<Vec<String>> {
    assert_eq!(spec.labels(), imp.labels(), "oracle needs a shared alphabet");
    assert!(spec.states().len() <= 64 && imp.states().len() <= 64 && spec.labels().len() <= 64);
    let start = (close_mask(spec, 1 << spec.initial()), close_mask(imp, 1 << imp.initial()));
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([(start, Vec::<usize>::new())]);
    while let Some(((s, i), trace)) = queue.pop_front() {
        let extra = out_mask(imp, i) & !out_mask(spec, s);
        if extra != 0 {
            let mut t = trace;
            t.push(extra.trailing_zeros() as usize);
            return Some(spec.trace_names(&t));
        }
        for l in 0..spec.labels().len() {
            let s2 = step_mask(spec, s, l);
            if s2 == 0 {
                continue;
            }
            let key = (s2, step_mask(imp, i, l));
            if seen.insert(key) {
                let mut t = trace.clone();
                t.push(l);
                queue.push_back((key, t));
            }
        }
    }
    None
}

/// All observable traces of length at most `len`, in length-lexicographic order.
pub fn traces_up_to(m: &Iolts, len: usize) -> Vec<Vec<String>> {
    let labels = m.labels().to_vec();
    let mut all = vec![];
    let mut frontier = vec![(vec![], close(m, BTreeSet::from([m.initial()])))];
    for _ in 0..=len {
        let mut next = vec![];
        for (t, set) in frontier {
            for l in &labels {
                let s2 = move_on(m, &set, l);
                if !s2.is_empty() {
                    let mut t2: Vec<String> = t.clone();
                    t2.push(l.clone());
                    next.push((t2, s2));
                }
            }
            all.push(t);
        }
        frontier = next;
    }
    all
}

/// Output labels after `trace` from `start`, computed by the oracle.
pub fn oracle_out(m: &Iolts, start: usize, trace: &[String]) -> BTreeSet<String> {
    let mut set = close(m, BTreeSet::from([start]));
    for l in trace {
        set = move_on(m, &set, l);
    }
    outs(m, &set)
}

/// Counts labels per state for quick shape checks.
pub fn label_histogram(m: &Iolts) -> BTreeMap<String, usize> {
    let mut h = BTreeMap::new();
    for &(_, l, _) in m.transitions() {
        *h.entry(m.sym_name(l).to_string()).or_insert(0) += 1;
    }
    h
}
